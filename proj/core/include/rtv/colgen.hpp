#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtv/lp.hpp"
#include "rtv/model.hpp"

namespace rtv {

struct PriceResult {
  Trip trip;           // maximizer (possibly empty)
  double value = 0.0;  // sum_{r in t} y_r - c_tv
  double cost = 0.0;   // c_tv of the maximizer
};

/// Exact pricing for one vehicle: maximize sum_{r in t} y_r - c_tv over
/// feasible trips up to max_trip_size. Uses the instance's explicit
/// catalog when present, otherwise subset enumeration with per-vehicle
/// sub-trip feasibility pruning and exact routing costs. Enumeration order
/// is (size, lexicographic), so ties keep the lowest trip-id ordering.
PriceResult price_vehicle(const Vehicle& v,
                          const std::map<int, double>& y_by_request,
                          const Instance& inst, int max_trip_size);

struct SeparationResult {
  bool certified_feasible = true;
  Trip trip;
  int vehicle_id = -1;
  double violation = 0.0;  // price value minus z_v
};

/// Scans vehicles in ascending id; returns the first (t, v) with pricing
/// value > z_v + 1e-7, else certifies (y, z) feasible for the dual.
SeparationResult separate_dual(const DualSolution& yz, const Instance& inst,
                               int max_trip_size);

struct ColgenIterationLog {
  int iteration = 0;
  double master_objective = 0.0;
  int columns_added = 0;
  double max_violation = 0.0;
};

enum class ColgenStatus { Converged, IterationCapExceeded, MasterFailure };

struct ColgenResult {
  ColgenStatus status = ColgenStatus::MasterFailure;
  FractionalSolution x;  // trip ids refer to `pool`
  DualSolution dual;     // y by request order, z by vehicle order
  int iterations = 0;
  std::vector<ColgenIterationLog> log;
  /// Column pool as a catalog (restricted: not downward closed).
  TripCatalog pool;
};

/// Column generation for the LP relaxation. The instance must be in
/// penalty mode (one dummy vehicle per request), so the restricted master
/// is always feasible: initial columns are every vehicle's empty trip plus
/// the dummy singletons. The master is solved in covering/packing form,
/// whose optimal duals are the nonnegative (y, z) the pricer expects; one
/// best violating column per vehicle is added per iteration. Iteration cap
/// 10 * |R| * |V|.
ColgenResult solve_lp_by_colgen(const Instance& inst, int max_trip_size);

std::string colgen_log_to_csv(const std::vector<ColgenIterationLog>& log);

}  // namespace rtv
