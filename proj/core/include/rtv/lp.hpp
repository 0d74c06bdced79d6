#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "rtv/model.hpp"

namespace rtv {

/// Row senses of the assignment LP. Equality is canonical. CoveringPacking
/// uses >= for request rows and <= for vehicle rows, whose optimal duals
/// are nonnegative exactly as the dual program the pricer separates
/// against; the two forms have equal optima whenever empty trips cost zero
/// (no onboard passengers).
enum class LpForm { Equality, CoveringPacking };

struct LpColumn {
  int vehicle_id = -1;
  int trip_id = -1;
  double cost = 0.0;
  std::vector<int> request_rows;  // row indices < n_requests, coefficient 1
};

struct StandardFormLP {
  LpForm form = LpForm::Equality;
  std::vector<int> request_ids;  // request row i <-> request_ids[i]
  std::vector<int> vehicle_ids;  // vehicle row n_requests + j
  std::vector<LpColumn> columns;  // sorted by (vehicle id, trip id)

  int n_requests() const { return static_cast<int>(request_ids.size()); }
  int n_vehicles() const { return static_cast<int>(vehicle_ids.size()); }
  int rows() const { return n_requests() + n_vehicles(); }
  int vehicle_row(int vehicle_pos) const { return n_requests() + vehicle_pos; }
};

/// Assignment LP over a validated catalog; one column per admissible
/// (trip, vehicle) pair, columns sorted by (vehicle id, trip id).
StandardFormLP build_lp(const TripCatalog& cat, const Instance& inst,
                        LpForm form = LpForm::Equality);

enum class LpStatus { Optimal, Infeasible, NumericalFailure };

struct LpSolution {
  LpStatus status = LpStatus::NumericalFailure;
  FractionalSolution primal;
  DualSolution dual;  // y by request row, z by vehicle row
  int iterations = 0;
  /// (primal objective, dual objective) per pivot when recording is on.
  std::vector<std::pair<double, double>> duality_log;
};

struct LpOptions {
  bool record_duality_log = false;
};

/// Dense revised simplex, phase-1/phase-2 with artificial variables.
/// Dantzig pricing, Bland's rule after 5*(rows+cols) consecutive
/// degenerate pivots, product-form basis updates with refactorization
/// every 50 pivots. Feasibility and reduced-cost tolerances are 1e-9;
/// phase-1 objective above 1e-7 reports Infeasible; a forced pivot below
/// 1e-11 reports NumericalFailure. Deterministic: identical inputs produce
/// identical pivot sequences bit for bit.
LpSolution solve_lp(const StandardFormLP& lp, const LpOptions& opts = {});

struct SupportHistogram {
  std::vector<int> bin_counts;  // over supported values (> 1e-7) in (0, 1]
  int support_count = 0;
  int integral_count = 0;       // within 1e-6 of 1
  int half_integral_count = 0;  // within 1e-6 of 1/2, among non-integral
  double integral_fraction = 0.0;
  double half_integral_fraction = 0.0;  // among non-integral support
};

SupportHistogram support_histogram(const FractionalSolution& x, int bins);

/// Plain-text dump (LP file layout: objective row, constraint rows, bounds)
/// for cross-checking against external solvers.
void dump_lp(const StandardFormLP& lp, std::ostream& os);

}  // namespace rtv
