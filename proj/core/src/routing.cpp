#include "rtv/routing.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>

namespace rtv {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack on deadline comparisons so that equal-up-to-roundoff schedules do
// not flip feasibility between the DP and the enumeration oracle.
constexpr double kTimeTol = 1e-9;

struct StopContext {
  std::vector<Stop> stops;
  std::vector<int> pickup_of;  // for dropoff stop i, index of its pickup; -1
  int initial_load = 0;
  int capacity = 0;
};

StopContext make_context(const Trip& t, const Vehicle& v, const Instance& inst) {
  StopContext ctx;
  ctx.stops = build_stops(t, v, inst);
  ctx.initial_load = static_cast<int>(v.onboard.size());
  ctx.capacity = v.capacity;
  ctx.pickup_of.assign(ctx.stops.size(), -1);
  for (std::size_t i = 0; i < ctx.stops.size(); ++i) {
    if (ctx.stops[i].kind == StopKind::Dropoff) {
      for (std::size_t p = 0; p < ctx.stops.size(); ++p) {
        if (ctx.stops[p].kind == StopKind::Pickup &&
            ctx.stops[p].who == ctx.stops[i].who) {
          ctx.pickup_of[i] = static_cast<int>(p);
          break;
        }
      }
    }
  }
  return ctx;
}

}  // namespace

std::vector<Stop> build_stops(const Trip& t, const Vehicle& v,
                              const Instance& inst) {
  std::vector<Stop> stops;
  for (std::size_t i = 0; i < v.onboard.size(); ++i) {
    stops.push_back({StopKind::OnboardDropoff, static_cast<int>(i),
                     v.onboard[i].destination, v.onboard[i].latest_dropoff, -1});
  }
  for (int rid : t.requests()) {
    const Request& r = inst.request_by_id(rid);
    stops.push_back({StopKind::Pickup, rid, r.origin, r.latest_pickup(), +1});
    stops.push_back({StopKind::Dropoff, rid, r.destination,
                     inst.latest_dropoff(r), -1});
  }
  return stops;
}

RouteResult exact_cost(const Trip& t, const Vehicle& v, const Instance& inst) {
  const StopContext ctx = make_context(t, v, inst);
  const int n = static_cast<int>(ctx.stops.size());
  if (n > kMaxExactStops)
    throw std::length_error("exact_cost: stop count " + std::to_string(n) +
                            " exceeds " + std::to_string(kMaxExactStops));
  RouteResult out;
  if (n == 0) {
    out.feasible = true;
    return out;
  }

  const std::size_t nstates = std::size_t{1} << n;
  std::vector<double> best(nstates * static_cast<std::size_t>(n), kInf);
  std::vector<std::int8_t> parent(nstates * static_cast<std::size_t>(n), -1);
  auto at = [n](std::size_t mask, int last) {
    return mask * static_cast<std::size_t>(n) + static_cast<std::size_t>(last);
  };
  // Occupancy after serving a subset is order-independent.
  std::vector<int> load_after(nstates, ctx.initial_load);
  for (std::size_t mask = 1; mask < nstates; ++mask) {
    const int low = std::countr_zero(mask);
    load_after[mask] = load_after[mask & (mask - 1)] + ctx.stops[static_cast<std::size_t>(low)].load_delta;
  }

  auto admissible_next = [&](std::size_t mask, int j) {
    const Stop& s = ctx.stops[static_cast<std::size_t>(j)];
    if (s.kind == StopKind::Dropoff &&
        !(mask >> ctx.pickup_of[static_cast<std::size_t>(j)] & 1))
      return false;  // pickup must precede dropoff
    if (s.load_delta > 0 && load_after[mask] + 1 > ctx.capacity) return false;
    return true;
  };
  auto service_time = [&](double length) {
    return v.available_time + length / inst.speed;
  };

  for (int j = 0; j < n; ++j) {
    if (!admissible_next(0, j)) continue;
    const double len = inst.metric.distance(v.position, ctx.stops[static_cast<std::size_t>(j)].point);
    if (service_time(len) > ctx.stops[static_cast<std::size_t>(j)].deadline + kTimeTol) continue;
    best[at(std::size_t{1} << j, j)] = len;
  }

  for (std::size_t mask = 1; mask < nstates; ++mask) {
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      const double len = best[at(mask, i)];
      if (len == kInf) continue;
      for (int j = 0; j < n; ++j) {
        if (mask >> j & 1) continue;
        if (!admissible_next(mask, j)) continue;
        const double nlen =
            len + inst.metric.distance(ctx.stops[static_cast<std::size_t>(i)].point,
                                       ctx.stops[static_cast<std::size_t>(j)].point);
        if (service_time(nlen) > ctx.stops[static_cast<std::size_t>(j)].deadline + kTimeTol)
          continue;
        const std::size_t nmask = mask | (std::size_t{1} << j);
        if (nlen < best[at(nmask, j)]) {
          best[at(nmask, j)] = nlen;
          parent[at(nmask, j)] = static_cast<std::int8_t>(i);
        }
      }
    }
  }

  const std::size_t full = nstates - 1;
  int last = -1;
  double len = kInf;
  for (int i = 0; i < n; ++i) {
    if (best[at(full, i)] < len) {
      len = best[at(full, i)];
      last = i;
    }
  }
  if (last < 0) return out;  // infeasible

  std::vector<int> order;
  std::size_t mask = full;
  int cur = last;
  while (cur >= 0) {
    order.push_back(cur);
    const int prev = parent[at(mask, cur)];
    mask &= ~(std::size_t{1} << cur);
    cur = prev;
  }
  std::reverse(order.begin(), order.end());
  for (int i : order) out.order.push_back(ctx.stops[static_cast<std::size_t>(i)]);
  out.length = len;
  out.feasible = true;
  return out;
}

bool trip_feasible(const Trip& t, const Vehicle& v, const Instance& inst) {
  return exact_cost(t, v, inst).feasible;
}

namespace {

/// Length and feasibility of a fully specified stop sequence.
struct ScanResult {
  double length = 0.0;
  bool feasible = true;
};

ScanResult scan_route(const std::vector<int>& order, const StopContext& ctx,
                      const Vehicle& v, const Instance& inst) {
  ScanResult res;
  Point pos = v.position;
  int load = ctx.initial_load;
  std::vector<bool> visited(ctx.stops.size(), false);
  for (int idx : order) {
    const Stop& s = ctx.stops[static_cast<std::size_t>(idx)];
    if (s.kind == StopKind::Dropoff &&
        !visited[static_cast<std::size_t>(ctx.pickup_of[static_cast<std::size_t>(idx)])]) {
      res.feasible = false;
      return res;
    }
    res.length += inst.metric.distance(pos, s.point);
    pos = s.point;
    if (v.available_time + res.length / inst.speed > s.deadline + kTimeTol) {
      res.feasible = false;
      return res;
    }
    load += s.load_delta;
    if (load > ctx.capacity) {
      res.feasible = false;
      return res;
    }
    visited[static_cast<std::size_t>(idx)] = true;
  }
  return res;
}

}  // namespace

RouteResult heuristic_cost(const Trip& t, const Vehicle& v,
                           const Instance& inst) {
  const StopContext ctx = make_context(t, v, inst);
  const int n = static_cast<int>(ctx.stops.size());
  RouteResult out;
  if (n == 0) {
    out.feasible = true;
    return out;
  }

  // Insertion blocks: onboard dropoffs alone, then (pickup, dropoff) pairs,
  // so a dropoff is always inserted right after its pickup is placed.
  std::vector<std::vector<int>> blocks;
  for (int i = 0; i < n; ++i)
    if (ctx.stops[static_cast<std::size_t>(i)].kind == StopKind::OnboardDropoff)
      blocks.push_back({i});
  for (int i = 0; i < n; ++i) {
    if (ctx.stops[static_cast<std::size_t>(i)].kind != StopKind::Pickup) continue;
    for (int j = 0; j < n; ++j) {
      if (ctx.stops[static_cast<std::size_t>(j)].kind == StopKind::Dropoff &&
          ctx.stops[static_cast<std::size_t>(j)].who ==
              ctx.stops[static_cast<std::size_t>(i)].who) {
        blocks.push_back({i, j});
        break;
      }
    }
  }

  const int attempts = std::max(1, n);
  for (int shift = 0; shift < attempts; ++shift) {
    std::vector<int> sequence;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& blk = blocks[(b + static_cast<std::size_t>(shift)) % blocks.size()];
      sequence.insert(sequence.end(), blk.begin(), blk.end());
    }

    std::vector<int> route;
    std::vector<int> pos_of(static_cast<std::size_t>(n), -1);
    bool ok = true;
    double cur_len = 0.0;
    for (int stop : sequence) {
      const Stop& s = ctx.stops[static_cast<std::size_t>(stop)];
      int lo = 0;
      if (s.kind == StopKind::Dropoff)
        lo = pos_of[static_cast<std::size_t>(ctx.pickup_of[static_cast<std::size_t>(stop)])] + 1;
      int best_pos = -1;
      double best_len = kInf;
      for (int p = lo; p <= static_cast<int>(route.size()); ++p) {
        std::vector<int> cand = route;
        cand.insert(cand.begin() + p, stop);
        const ScanResult sr = scan_route(cand, ctx, v, inst);
        if (sr.feasible && sr.length < best_len - 1e-15) {
          best_len = sr.length;
          best_pos = p;
        }
      }
      if (best_pos < 0) {
        ok = false;
        break;
      }
      route.insert(route.begin() + best_pos, stop);
      for (std::size_t q = 0; q < route.size(); ++q)
        pos_of[static_cast<std::size_t>(route[q])] = static_cast<int>(q);
      cur_len = best_len;
    }
    if (ok) {
      out.feasible = true;
      out.length = cur_len;
      for (int i : route) out.order.push_back(ctx.stops[static_cast<std::size_t>(i)]);
      return out;
    }
  }
  return out;  // all insertion orders failed
}

std::vector<double> route_service_times(const RouteResult& route,
                                        const Vehicle& v,
                                        const Instance& inst) {
  std::vector<double> times;
  times.reserve(route.order.size());
  Point pos = v.position;
  double clock = v.available_time;
  for (const Stop& s : route.order) {
    clock += inst.travel_time(pos, s.point);
    pos = s.point;
    times.push_back(clock);
  }
  return times;
}

}  // namespace rtv
