#pragma once

#include <vector>

#include "rtv/model.hpp"

namespace rtv {

enum class StopKind { Pickup, Dropoff, OnboardDropoff };

/// One service point of a single-vehicle route. `who` is the request id for
/// pickup/dropoff stops and the onboard index for onboard dropoffs.
struct Stop {
  StopKind kind;
  int who = -1;
  Point point;
  double deadline = 0.0;
  int load_delta = 0;  // +1 pickup, -1 any dropoff
};

struct RouteResult {
  std::vector<Stop> order;
  double length = 0.0;  // kilometers
  bool feasible = false;
};

/// Stop list for serving trip `t` with vehicle `v`: onboard dropoffs first
/// (by onboard index), then pickup/dropoff per request in ascending id.
/// Stop ids used by the routing tie-break rules are positions in this list.
std::vector<Stop> build_stops(const Trip& t, const Vehicle& v,
                              const Instance& inst);

inline constexpr int kMaxExactStops = 16;

/// Minimum-length feasible open route over the stops of (t, v): dynamic
/// program over (visited subset, last stop), pruning states that violate
/// deadlines, precedence, or capacity. Ties break toward the
/// lexicographically smaller last-stop id. Throws std::length_error when
/// the stop count exceeds kMaxExactStops.
RouteResult exact_cost(const Trip& t, const Vehicle& v, const Instance& inst);

/// Cheapest-insertion route: inserts stops one at a time at the position of
/// least length increase, retrying rotated insertion orders on failure.
/// Never beats exact_cost; may fail (feasible=false) on feasible inputs.
RouteResult heuristic_cost(const Trip& t, const Vehicle& v,
                           const Instance& inst);

/// True iff exact_cost finds a feasible route.
bool trip_feasible(const Trip& t, const Vehicle& v, const Instance& inst);

/// Service times along a route, starting from the vehicle's position at its
/// available time. times[i] is when order[i] is served.
std::vector<double> route_service_times(const RouteResult& route,
                                        const Vehicle& v,
                                        const Instance& inst);

}  // namespace rtv
