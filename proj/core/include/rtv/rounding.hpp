#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rtv/model.hpp"

namespace rtv {

enum class RoundingMethod { Independent, Dependent, Deterministic };

RoundingMethod rounding_method_from_string(const std::string& s);
std::string to_string(RoundingMethod m);

/// Checks the LP-point invariants against a catalog: every request row and
/// every vehicle row sums to 1 within 1e-6, and every supported pair is
/// admissible. Throws ValidationError naming the failing row.
void validate_fractional(const FractionalSolution& x, const TripCatalog& cat);

/// Raw output of independent rounding: each indicator drawn on its own, so
/// vehicles can end up with several trips (returned uncorrected on purpose).
struct IndependentDraw {
  std::vector<std::pair<int, int>> chosen;  // (vehicle id, trip id), sorted
};

/// Bernoulli per (t, v) with success probability x_tv. Entries are drawn
/// in ascending (vehicle id, trip id) order, one draw each, from
/// SplitMix64(seed).
IndependentDraw round_independent(const FractionalSolution& x,
                                  std::uint64_t seed);

/// One trip per vehicle sampled from the vehicle's categorical
/// distribution {x_tv}_t (inverse CDF over trips in ascending id order,
/// vehicles in catalog order), then multiplicity correction. Throws
/// ValidationError if some per-vehicle mass deviates from 1 by > 1e-6.
Assignment round_dependent(const FractionalSolution& x, const TripCatalog& cat,
                           std::uint64_t seed);

/// Per-vehicle raw categorical sample (no correction), by vehicle index.
std::vector<int> sample_dependent_raw(const FractionalSolution& x,
                                      const TripCatalog& cat,
                                      std::uint64_t seed);

/// Resolves multiply-covered requests: in ascending request id, each such
/// request stays in the chosen trip where removing it from all the other
/// trips saves the most (ties toward the lowest vehicle id); the other
/// trips shrink to their catalog sub-trips under the same vehicle. Total
/// cost never increases. Throws ValidationError if a required sub-trip is
/// missing (catalog closure bug).
Assignment multiplicity_correction(std::vector<int> trip_by_vehicle,
                                   const TripCatalog& cat);

/// argmax_t x_tv per vehicle (ties toward the lowest trip id), then
/// multiplicity correction. Fully deterministic.
Assignment round_deterministic(const FractionalSolution& x,
                               const TripCatalog& cat);

struct PairCovarianceSample {
  int vehicle_id = -1;
  int trip_a = -1;
  int trip_b = -1;
  double x_a = 0.0, x_b = 0.0;
  double freq_a = 0.0, freq_b = 0.0;
  double freq_ab = 0.0;
  double empirical_cov = 0.0;  // freq_ab - freq_a * freq_b
};

struct RoundingTrialStats {
  std::string method;
  std::string rng_algorithm;  // "splitmix64"
  long long trials = 0;
  std::uint64_t base_seed = 0;

  double mean_cost = 0.0;      // corrected cost (raw cost for independent)
  double cost_stddev = 0.0;    // sample standard deviation of trial costs
  double mean_raw_cost = 0.0;  // pre-correction catalog cost

  double unassigned_fraction_mean = 0.0;
  std::vector<int> request_ids;
  std::vector<double> per_request_unassigned_frequency;
  /// Per request, distribution of Y = number of chosen trips containing it
  /// before correction; y_counts[r][y] over y in [0, n_vehicles].
  std::vector<std::vector<long long>> y_counts;
  /// delta -> frequency of being over-assigned by exactly delta trips
  /// (delta = max(Y-1, 0)), averaged over requests; masses sum to 1.
  std::map<int, double> overassignment_histogram;

  /// Raw chosen frequency per (vehicle id, trip id) on the support of x.
  std::map<std::pair<int, int>, double> raw_pair_frequency;
  std::vector<PairCovarianceSample> pair_covariances;

  /// Fraction of trials where some vehicle held >= 2 trips (independent
  /// rounding only; always 0 for the other methods).
  double vehicle_violation_frequency = 0.0;

  /// Pr[Y > 1 + delta] for a request row, from y_counts.
  double deviation_frequency(std::size_t request_pos, int delta) const;
};

/// Monte-Carlo harness: trial i uses seed base_seed + i. Aggregation is
/// independent of `jobs` (integer counters plus a fixed-order reduction of
/// per-trial costs).
RoundingTrialStats run_trials(const FractionalSolution& x,
                              const TripCatalog& cat, RoundingMethod method,
                              long long trials, std::uint64_t base_seed,
                              int jobs = 1);

std::string trial_stats_to_json(const RoundingTrialStats& stats);

}  // namespace rtv
