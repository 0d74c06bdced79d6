#include "rtv/colgen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "rtv/routing.hpp"

namespace rtv {

namespace {

constexpr double kViolationTol = 1e-7;

double profit(const Trip& t, const std::map<int, double>& y) {
  double s = 0.0;
  for (int r : t.requests()) {
    auto it = y.find(r);
    if (it != y.end()) s += it->second;
  }
  return s;
}

}  // namespace

PriceResult price_vehicle(const Vehicle& v,
                          const std::map<int, double>& y_by_request,
                          const Instance& inst, int max_trip_size) {
  PriceResult best;

  if (v.is_dummy()) {
    best.trip = Trip();
    best.value = 0.0;
    best.cost = 0.0;
    const Request& r = inst.request_by_id(*v.dummy_for);
    const double val = profit(Trip::of({r.id}), y_by_request) - r.penalty;
    if (val > best.value) {
      best.trip = Trip::of({r.id});
      best.value = val;
      best.cost = r.penalty;
    }
    return best;
  }

  if (inst.trips) {
    const TripCatalog& cat = *inst.trips;
    const int vidx = cat.vehicle_index(v.id);
    bool first = true;
    for (const auto& adm : cat.per_vehicle[static_cast<std::size_t>(vidx)]) {
      const Trip& t = cat.trips[static_cast<std::size_t>(adm.trip)];
      if (static_cast<int>(t.size()) > max_trip_size) continue;
      const double val = profit(t, y_by_request) - adm.cost;
      if (first || val > best.value) {
        best.trip = t;
        best.value = val;
        best.cost = adm.cost;
        first = false;
      }
    }
    return best;
  }

  // Geometric instance: level-wise enumeration under routing feasibility,
  // pruning supersets of infeasible sets (feasibility is downward closed).
  const RouteResult empty_route = exact_cost(Trip(), v, inst);
  best.trip = Trip();
  best.cost = empty_route.length;
  best.value = -empty_route.length;

  std::set<std::vector<int>> level;  // feasible sets of the current size
  for (const Request& r : inst.requests) {
    const Trip t = Trip::of({r.id});
    const RouteResult rr = exact_cost(t, v, inst);
    if (!rr.feasible) continue;
    level.insert(t.requests());
    const double val = profit(t, y_by_request) - rr.length;
    if (val > best.value) {
      best.trip = t;
      best.value = val;
      best.cost = rr.length;
    }
  }
  std::vector<int> singles;
  for (const auto& s : level) singles.push_back(s[0]);

  for (int size = 2; size <= max_trip_size && !level.empty(); ++size) {
    std::set<std::vector<int>> next;
    for (const auto& base : level) {
      for (int r : singles) {
        if (r <= base.back()) continue;
        std::vector<int> cand = base;
        cand.push_back(r);
        if (next.count(cand)) continue;
        bool subs_ok = true;
        for (std::size_t drop = 0; drop + 1 < cand.size() && subs_ok; ++drop) {
          std::vector<int> sub;
          for (std::size_t i = 0; i < cand.size(); ++i)
            if (i != drop) sub.push_back(cand[i]);
          if (!level.count(sub)) subs_ok = false;
        }
        if (!subs_ok) continue;
        const Trip t = Trip::of(cand);
        const RouteResult rr = exact_cost(t, v, inst);
        if (!rr.feasible) continue;
        next.insert(cand);
        const double val = profit(t, y_by_request) - rr.length;
        if (val > best.value) {
          best.trip = t;
          best.value = val;
          best.cost = rr.length;
        }
      }
    }
    level = std::move(next);
  }
  return best;
}

SeparationResult separate_dual(const DualSolution& yz, const Instance& inst,
                               int max_trip_size) {
  std::map<int, double> y;
  for (std::size_t i = 0; i < inst.requests.size(); ++i)
    y[inst.requests[i].id] = yz.y[i];

  std::vector<std::size_t> order(inst.vehicles.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return inst.vehicles[a].id < inst.vehicles[b].id;
  });

  SeparationResult res;
  for (std::size_t v : order) {
    const PriceResult pr =
        price_vehicle(inst.vehicles[v], y, inst, max_trip_size);
    const double violation = pr.value - yz.z[v];
    if (violation > kViolationTol) {
      res.certified_feasible = false;
      res.trip = pr.trip;
      res.vehicle_id = inst.vehicles[v].id;
      res.violation = violation;
      return res;
    }
  }
  return res;
}

namespace {

struct ColumnPool {
  std::vector<Trip> trips;                 // local trip id = index, 0 = empty
  std::map<std::vector<int>, int> index;   // request set -> local trip id
  // (vehicle index, trip id) -> cost
  std::map<std::pair<int, int>, double> columns;

  int intern(const Trip& t) {
    auto it = index.find(t.requests());
    if (it != index.end()) return it->second;
    const int id = static_cast<int>(trips.size());
    trips.push_back(t);
    index.emplace(t.requests(), id);
    return id;
  }
};

StandardFormLP master_lp(const ColumnPool& pool, const Instance& inst) {
  StandardFormLP lp;
  lp.form = LpForm::CoveringPacking;
  std::map<int, int> req_row;
  for (const Request& r : inst.requests) {
    req_row[r.id] = static_cast<int>(lp.request_ids.size());
    lp.request_ids.push_back(r.id);
  }
  for (const Vehicle& v : inst.vehicles) lp.vehicle_ids.push_back(v.id);

  struct Entry {
    int vehicle_id;
    int trip_id;
    double cost;
    const Trip* trip;
  };
  std::vector<Entry> entries;
  for (const auto& [key, cost] : pool.columns) {
    const Trip& t = pool.trips[static_cast<std::size_t>(key.second)];
    entries.push_back({inst.vehicles[static_cast<std::size_t>(key.first)].id,
                       key.second, cost, &t});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.vehicle_id != b.vehicle_id) return a.vehicle_id < b.vehicle_id;
    return a.trip_id < b.trip_id;
  });
  for (const Entry& e : entries) {
    LpColumn col;
    col.vehicle_id = e.vehicle_id;
    col.trip_id = e.trip_id;
    col.cost = e.cost;
    for (int r : e.trip->requests()) col.request_rows.push_back(req_row.at(r));
    lp.columns.push_back(std::move(col));
  }
  return lp;
}

}  // namespace

ColgenResult solve_lp_by_colgen(const Instance& inst, int max_trip_size) {
  ColgenResult res;
  int n_dummies = 0;
  for (const Vehicle& v : inst.vehicles)
    if (v.is_dummy()) ++n_dummies;
  if (n_dummies != static_cast<int>(inst.requests.size()))
    throw ValidationError("vehicles",
                          "column generation expects a penalty-mode instance "
                          "(one dummy vehicle per request)");

  ColumnPool pool;
  pool.intern(Trip());
  for (std::size_t v = 0; v < inst.vehicles.size(); ++v) {
    const Vehicle& veh = inst.vehicles[v];
    if (veh.is_dummy()) {
      pool.columns[{static_cast<int>(v), 0}] = 0.0;
      const Request& r = inst.request_by_id(*veh.dummy_for);
      pool.columns[{static_cast<int>(v), pool.intern(Trip::of({r.id}))}] =
          r.penalty;
      continue;
    }
    double empty_cost = 0.0;
    if (inst.trips) {
      empty_cost = inst.trips->cost(0, inst.trips->vehicle_index(veh.id));
    } else {
      const RouteResult rr = exact_cost(Trip(), veh, inst);
      if (!rr.feasible)
        throw ValidationError("vehicles", "vehicle cannot serve its onboard");
      empty_cost = rr.length;
    }
    pool.columns[{static_cast<int>(v), 0}] = empty_cost;
  }

  const int cap = 10 * std::max<int>(1, static_cast<int>(inst.requests.size())) *
                  std::max<int>(1, static_cast<int>(inst.vehicles.size()));
  std::map<int, double> y;

  for (int it = 1; it <= cap; ++it) {
    const StandardFormLP lp = master_lp(pool, inst);
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) {
      res.status = ColgenStatus::MasterFailure;
      return res;
    }
    res.iterations = it;

    y.clear();
    for (std::size_t i = 0; i < inst.requests.size(); ++i)
      y[inst.requests[i].id] = sol.dual.y[i];

    int added = 0;
    double max_violation = 0.0;
    for (std::size_t v = 0; v < inst.vehicles.size(); ++v) {
      const PriceResult pr =
          price_vehicle(inst.vehicles[v], y, inst, max_trip_size);
      const double violation = pr.value - sol.dual.z[v];
      max_violation = std::max(max_violation, violation);
      if (violation > kViolationTol) {
        const int tid = pool.intern(pr.trip);
        const auto key = std::make_pair(static_cast<int>(v), tid);
        if (!pool.columns.count(key)) {
          pool.columns[key] = pr.cost;
          ++added;
        }
      }
    }
    res.log.push_back({it, sol.primal.objective, added, max_violation});

    if (added == 0) {
      res.status = ColgenStatus::Converged;
      res.dual = sol.dual;
      res.x = sol.primal;
      // Materialize the pool as a catalog and move vehicle slack onto the
      // empty trip so per-vehicle masses are 1.
      res.pool.trips = pool.trips;
      res.pool.per_vehicle.assign(inst.vehicles.size(), {});
      for (const auto& [key, cost] : pool.columns)
        res.pool.per_vehicle[static_cast<std::size_t>(key.first)].push_back(
            {key.second, cost});
      for (const Vehicle& veh : inst.vehicles)
        res.pool.vehicle_ids.push_back(veh.id);
      for (const Request& r : inst.requests)
        res.pool.request_ids.push_back(r.id);
      res.pool.reindex();
      double adjusted = 0.0;
      for (std::size_t v = 0; v < inst.vehicles.size(); ++v) {
        const int vid = inst.vehicles[v].id;
        double mass = 0.0;
        for (const auto& adm : res.pool.per_vehicle[v])
          mass += res.x.value(vid, adm.trip);
        if (mass < 1.0 - 1e-12)
          res.x.set(vid, 0, res.x.value(vid, 0) + (1.0 - mass));
        for (const auto& adm : res.pool.per_vehicle[v])
          adjusted += adm.cost * res.x.value(vid, adm.trip);
      }
      res.x.objective = adjusted;
      return res;
    }
  }
  res.status = ColgenStatus::IterationCapExceeded;
  return res;
}

std::string colgen_log_to_csv(const std::vector<ColgenIterationLog>& log) {
  std::ostringstream os;
  os << "iteration,master_objective,columns_added,max_violation\n";
  for (const auto& row : log) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.12g,%d,%.12g\n", row.iteration,
                  row.master_objective, row.columns_added, row.max_violation);
    os << buf;
  }
  return os.str();
}

}  // namespace rtv
