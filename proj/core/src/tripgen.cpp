#include "rtv/tripgen.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "rtv/routing.hpp"

namespace rtv {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

TripCatalog generate_catalog(const Instance& inst, const GenerateOptions& opts) {
  const auto start = Clock::now();
  int max_size = opts.max_trip_size;
  if (max_size <= 0) {
    max_size = 1;
    for (const Vehicle& v : inst.vehicles)
      if (!v.is_dummy()) max_size = std::max(max_size, v.capacity);
  }

  TripCatalog cat;
  for (const Request& r : inst.requests) cat.request_ids.push_back(r.id);
  for (const Vehicle& v : inst.vehicles) cat.vehicle_ids.push_back(v.id);
  cat.trips.push_back(Trip());  // trip 0
  cat.per_vehicle.assign(inst.vehicles.size(), {});

  // Empty trip per vehicle. For a non-dummy vehicle its cost is the optimal
  // route over the onboard passengers alone.
  for (std::size_t v = 0; v < inst.vehicles.size(); ++v) {
    const Vehicle& veh = inst.vehicles[v];
    if (veh.is_dummy()) {
      cat.per_vehicle[v].push_back({0, 0.0});
      continue;
    }
    const RouteResult rr = exact_cost(Trip(), veh, inst);
    if (!rr.feasible)
      throw ValidationError("vehicles[" + std::to_string(veh.id) + "].onboard",
                            "onboard passengers cannot be served in time");
    cat.per_vehicle[v].push_back({0, rr.length});
  }

  // admissible[v] holds the request-id sets admissible to vehicle v, used
  // for the per-vehicle sub-trip pruning at the next level.
  std::vector<std::set<std::vector<int>>> admissible(inst.vehicles.size());
  // Pending (set, vehicle, cost) entries per level, flushed after trip ids
  // for the level are assigned.
  struct LevelEntry {
    std::vector<int> ids;
    std::size_t vehicle;
    double cost;
  };

  for (int size = 1; size <= max_size; ++size) {
    if (elapsed_seconds(start) > opts.timeout_seconds) {
      cat.truncated_at_size = size;
      break;
    }
    std::vector<LevelEntry> entries;
    std::set<std::vector<int>> level_sets;

    if (size == 1) {
      for (const Request& r : inst.requests) {
        const Trip t = Trip::of({r.id});
        for (std::size_t v = 0; v < inst.vehicles.size(); ++v) {
          const Vehicle& veh = inst.vehicles[v];
          if (veh.is_dummy()) {
            if (*veh.dummy_for == r.id) {
              entries.push_back({t.requests(), v, r.penalty});
              level_sets.insert(t.requests());
            }
            continue;
          }
          const RouteResult rr = exact_cost(t, veh, inst);
          if (rr.feasible) {
            entries.push_back({t.requests(), v, rr.length});
            level_sets.insert(t.requests());
          }
        }
      }
    } else {
      // Candidate sets: extend each admissible (s-1)-set of v with a larger
      // singleton admissible to v, then require every (s-1)-subset there.
      for (std::size_t v = 0; v < inst.vehicles.size(); ++v) {
        const Vehicle& veh = inst.vehicles[v];
        if (veh.is_dummy()) continue;
        std::vector<int> singles;
        for (const auto& s : admissible[v])
          if (s.size() == 1) singles.push_back(s[0]);
        std::set<std::vector<int>> tried;
        for (const auto& base : admissible[v]) {
          if (static_cast<int>(base.size()) != size - 1) continue;
          for (int r : singles) {
            if (r <= base.back()) continue;
            std::vector<int> cand = base;
            cand.push_back(r);
            if (!tried.insert(cand).second) continue;
            bool all_subsets = true;
            for (std::size_t drop = 0; drop + 1 < cand.size() && all_subsets;
                 ++drop) {
              std::vector<int> sub;
              for (std::size_t i = 0; i < cand.size(); ++i)
                if (i != drop) sub.push_back(cand[i]);
              if (!admissible[v].count(sub)) all_subsets = false;
            }
            if (!all_subsets) continue;
            const Trip t = Trip::of(cand);
            const RouteResult rr = exact_cost(t, veh, inst);
            if (rr.feasible) {
              entries.push_back({cand, v, rr.length});
              level_sets.insert(cand);
            }
          }
        }
      }
    }

    if (level_sets.empty()) break;
    // Assign trip ids in lexicographic order within the level.
    for (const auto& ids : level_sets) cat.trips.push_back(Trip::of(ids));
    cat.reindex();
    for (const auto& e : entries) {
      const int tid = cat.trip_id(Trip::of(e.ids));
      cat.per_vehicle[e.vehicle].push_back({tid, e.cost});
      admissible[e.vehicle].insert(e.ids);
    }
  }

  cat.reindex();
  return cat;
}

CatalogStats catalog_stats(const TripCatalog& cat) {
  CatalogStats st;
  st.total_trips = static_cast<int>(cat.trips.size());
  for (const Trip& t : cat.trips) st.trips_by_size[static_cast<int>(t.size())]++;
  for (const auto& lst : cat.per_vehicle)
    st.admissible_pairs += static_cast<long long>(lst.size());
  st.truncated_at_size = cat.truncated_at_size;
  return st;
}

}  // namespace rtv
