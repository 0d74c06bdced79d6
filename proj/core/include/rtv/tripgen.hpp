#pragma once

#include <limits>
#include <map>
#include <optional>

#include "rtv/model.hpp"

namespace rtv {

struct GenerateOptions {
  int max_trip_size = 0;  // 0 = max vehicle capacity
  double timeout_seconds = std::numeric_limits<double>::infinity();
};

/// Level-wise enumeration of the feasible trip catalog. Level 1 holds all
/// feasible (request, vehicle) pairs; a size-s set is a candidate for
/// vehicle v only if all of its size-(s-1) subsets are admissible to v,
/// which keeps T(v) downward closed per vehicle. Candidates are confirmed
/// with routing::exact_cost. Trip ids follow generation order: size, then
/// lexicographic request ids; trip 0 is the empty trip.
///
/// If the timeout elapses, generation stops at the current level and the
/// catalog records the truncation size. Dummy vehicles get exactly the
/// empty trip (cost 0) and their own request's singleton (cost = penalty).
TripCatalog generate_catalog(const Instance& inst,
                             const GenerateOptions& opts = {});

struct CatalogStats {
  std::map<int, int> trips_by_size;  // size -> count
  int total_trips = 0;
  long long admissible_pairs = 0;  // sum over vehicles of |T(v)|
  std::optional<int> truncated_at_size;
};

CatalogStats catalog_stats(const TripCatalog& cat);

}  // namespace rtv
