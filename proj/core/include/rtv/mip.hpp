#pragma once

#include <limits>
#include <map>

#include "rtv/lp.hpp"
#include "rtv/model.hpp"

namespace rtv {

enum class IlpStatus { Optimal, Infeasible, TimeLimit, NumericalFailure };

struct IlpResult {
  IlpStatus status = IlpStatus::NumericalFailure;
  std::map<int, int> trip_by_vehicle_id;  // vehicle id -> trip id
  double objective = 0.0;
  double root_lp_objective = 0.0;
  FractionalSolution root_fractional;  // LP relaxation optimum at the root
  long long nodes = 0;
  /// Remaining best-bound gap when the time limit cut the search short.
  double bound_gap = 0.0;
};

struct IlpOptions {
  double time_limit_seconds = std::numeric_limits<double>::infinity();
};

/// Exact best-bound branch-and-bound over the equality-form LP. Branching
/// variable: most fractional x (closest to 1/2), ties by lowest column
/// index; fix-to-1 child first; depth-first until the first incumbent,
/// then best-bound selection. Node LPs are solved by solve_lp on the
/// restricted problem. Integrality tolerance 1e-6, optimality gap 0.
IlpResult solve_ilp(const StandardFormLP& lp, const IlpOptions& opts = {});

/// Assignment for a catalog from an ILP result (all vehicles present).
Assignment ilp_to_assignment(const IlpResult& res, const TripCatalog& cat);

struct BruteForceOptions {
  bool penalty_mode = false;  // uncovered requests pay their penalty
};

/// Independent oracle: enumerates all vehicle->trip combinations in
/// lexicographic trip-id order, keeping the cheapest one where every
/// request is covered at most once (exactly once unless penalty mode).
/// Precondition: prod_v |T(v)| <= 1e7 (throws std::length_error).
struct BruteForceResult {
  bool feasible = false;
  Assignment assignment;
  double objective = 0.0;
};

BruteForceResult brute_force_opt(const TripCatalog& cat, const Instance& inst,
                                 const BruteForceOptions& opts = {});

}  // namespace rtv
