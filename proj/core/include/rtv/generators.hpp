#pragma once

#include <cstdint>

#include "rtv/model.hpp"

namespace rtv {

/// Integrality-gap family: 2 vehicles of capacity k, k+1 requests, every
/// non-empty trip of size <= k admissible to both vehicles at unit cost
/// (abstract explicit catalog; the geometry is shared-endpoint filler).
/// LP optimum (k+1)/k, ILP optimum 2. The catalog is embedded in the
/// returned instance.
Instance gen_gap_family(int k);

struct TightnessFamily {
  Instance instance;  // k+1 vehicles, k+1 requests, catalog embedded
  /// Pathological LP-optimal point: vehicle i holds trip R \ {r_i} with
  /// value 1/k and the empty trip with value (k-1)/k. Objective (k+1)/k.
  FractionalSolution x;
};

/// Rejection-rate tightness family: per-request unassigned probability
/// under dependent rounding is exactly ((k-1)/k)^k.
TightnessFamily gen_tightness_family(int k);

struct RandomInstanceParams {
  int n_requests = 0;
  int n_vehicles = 0;
  int capacity = 2;
  double region_km = 5.0;
  double speed = 0.01;  // km/s (36 km/h)
  double max_wait = 300.0;
  double max_delay = 600.0;
  double penalty_multiplier = 10.0;  // penalty = multiplier * direct distance
  std::uint64_t seed = 0;
};

/// Uniform origins/destinations and vehicle positions in the square,
/// request times 0, deterministic per seed. No catalog attached.
Instance gen_random(const RandomInstanceParams& params);

}  // namespace rtv
