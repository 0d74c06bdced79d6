#include "rtv/batchsim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "json_detail.hpp"
#include "rtv/generators.hpp"
#include "rtv/json_io.hpp"
#include "rtv/lp.hpp"
#include "rtv/mip.hpp"
#include "rtv/rng.hpp"
#include "rtv/rounding.hpp"
#include "rtv/routing.hpp"
#include "rtv/tripgen.hpp"

namespace rtv {

Instance add_dummies(const Instance& inst) {
  Instance out = inst;
  int next_id = -1;
  for (const Vehicle& v : out.vehicles) next_id = std::max(next_id, v.id);
  ++next_id;
  for (const Request& r : inst.requests) {
    Vehicle dummy;
    dummy.id = next_id++;
    dummy.position = r.origin;
    dummy.available_time = r.request_time;
    dummy.capacity = 1;
    dummy.dummy_for = r.id;
    out.vehicles.push_back(dummy);
  }
  if (out.trips) {
    TripCatalog& cat = *out.trips;
    for (std::size_t i = inst.vehicles.size(); i < out.vehicles.size(); ++i) {
      const Vehicle& dummy = out.vehicles[i];
      cat.vehicle_ids.push_back(dummy.id);
      const Request& r = inst.request_by_id(*dummy.dummy_for);
      int singleton = cat.trip_id(Trip::of({r.id}));
      if (singleton < 0) {
        singleton = static_cast<int>(cat.trips.size());
        cat.trips.push_back(Trip::of({r.id}));
      }
      cat.per_vehicle.push_back(
          {{0, 0.0}, {singleton, r.penalty}});
    }
    cat.reindex();
  }
  return out;
}

SolveMethod solve_method_from_string(const std::string& s) {
  if (s == "ilp") return SolveMethod::Ilp;
  if (s == "lp+rand" || s == "rand") return SolveMethod::LpRand;
  if (s == "lp+det" || s == "det") return SolveMethod::LpDet;
  throw std::invalid_argument("unknown solve method: " + s);
}

std::string to_string(SolveMethod m) {
  switch (m) {
    case SolveMethod::Ilp: return "ilp";
    case SolveMethod::LpRand: return "lp+rand";
    case SolveMethod::LpDet: return "lp+det";
  }
  return "?";
}

SimConfig sim_config_from_json(const std::string& text) {
  using detail::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }
  SimConfig cfg;
  auto num = [&](const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
  };
  cfg.arrival_rate = num("arrival_rate", cfg.arrival_rate);
  cfg.horizon_rounds = static_cast<int>(num("horizon_rounds", 0));
  cfg.batch_interval = num("batch_interval", cfg.batch_interval);
  cfg.fleet_size = static_cast<int>(num("fleet_size", 0));
  cfg.capacity = static_cast<int>(num("capacity", cfg.capacity));
  cfg.region_km = num("region_size_km", cfg.region_km);
  cfg.speed = num("speed", cfg.speed);
  if (j.contains("qos")) {
    cfg.qos.max_wait = j.at("qos").value("max_wait", cfg.qos.max_wait);
    cfg.qos.max_delay = j.at("qos").value("max_delay", cfg.qos.max_delay);
  }
  if (j.contains("penalty")) {
    cfg.penalty.base_multiplier =
        j.at("penalty").value("base_multiplier", cfg.penalty.base_multiplier);
    cfg.penalty.growth = j.at("penalty").value("growth", cfg.penalty.growth);
  }
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& m : j.at("methods"))
      cfg.methods.push_back(solve_method_from_string(m.get<std::string>()));
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("timing")) cfg.timing = j.at("timing").get<bool>();
  if (j.contains("max_trip_size"))
    cfg.max_trip_size = j.at("max_trip_size").get<int>();
  if (cfg.horizon_rounds < 0 || cfg.fleet_size < 0 || cfg.arrival_rate < 0 ||
      cfg.batch_interval <= 0 || cfg.capacity < 1 || cfg.speed <= 0)
    throw ValidationError("config", "invalid simulation configuration");
  if (cfg.methods.empty())
    throw ValidationError("config.methods", "at least one method required");
  return cfg;
}

SimConfig load_sim_config(const std::string& path) {
  return sim_config_from_json(read_text_file(path));
}

long long BatchState::onboard_count() const {
  long long n = 0;
  for (const SimVehicle& v : fleet) n += static_cast<long long>(v.onboard.size());
  return n;
}

long long BatchState::waiting_count() const {
  std::set<int> rej(rejected_now.begin(), rejected_now.end());
  long long n = 0;
  for (const WaitingRequest& w : waiting)
    if (!rej.count(w.request.id)) ++n;
  return n;
}

bool BatchState::conserved() const {
  return waiting_count() + static_cast<long long>(rejected_now.size()) +
             onboard_count() + served + reneged ==
         admitted;
}

BatchState init_state(const SimConfig& cfg) {
  BatchState state;
  SplitMix64 rng(mix_seed(cfg.seed, 1));  // fleet placement stream
  for (int v = 0; v < cfg.fleet_size; ++v) {
    SimVehicle veh;
    veh.id = v;
    veh.position = {rng.next_in(0, cfg.region_km), rng.next_in(0, cfg.region_km)};
    veh.available_time = 0.0;
    veh.capacity = cfg.capacity;
    state.fleet.push_back(veh);
  }
  return state;
}

namespace {

/// Frozen per-round problem: the instance (real fleet + waiting requests,
/// dummies appended), its catalog and LP, and the id bookkeeping.
struct FrozenBatch {
  Instance instance;  // with dummies, catalog embedded
  TripCatalog catalog;
  StandardFormLP lp;
  int n_real_vehicles = 0;
  int batch_size = 0;
};

FrozenBatch freeze_batch(const BatchState& state, const SimConfig& cfg) {
  FrozenBatch fb;
  Instance inst;
  inst.metric = Metric::euclidean();
  inst.speed = cfg.speed;
  inst.qos = cfg.qos;
  for (const WaitingRequest& w : state.waiting) inst.requests.push_back(w.request);
  for (const SimVehicle& sv : state.fleet) {
    Vehicle v;
    v.id = sv.id;
    v.position = sv.position;
    v.available_time = state.clock;
    v.capacity = sv.capacity;
    for (const auto& rider : sv.onboard)
      v.onboard.push_back({rider.destination, rider.latest_dropoff});
    inst.vehicles.push_back(v);
  }
  fb.n_real_vehicles = static_cast<int>(inst.vehicles.size());
  fb.batch_size = static_cast<int>(inst.requests.size());
  fb.instance = add_dummies(inst);
  GenerateOptions gopts;
  gopts.max_trip_size = cfg.max_trip_size > 0 ? cfg.max_trip_size : cfg.capacity;
  fb.catalog = generate_catalog(fb.instance, gopts);
  fb.lp = build_lp(fb.catalog, fb.instance, LpForm::Equality);
  return fb;
}

struct BatchSolve {
  bool ok = false;
  Assignment assignment;  // over fb.catalog (dummies included)
  int rejected = 0;
  double real_cost = 0.0;
  double solve_ms = 0.0;
  double lp_integral_frac = 0.0;
  double lp_half_integral_frac = 0.0;
};

/// Requests covered by no real vehicle are mapped onto their dummies
/// (formal coverage at penalty cost).
void map_uncovered_to_dummies(Assignment& a, const FrozenBatch& fb) {
  if (a.unassigned.empty()) return;
  std::vector<int> choice = a.trip_by_vehicle;
  for (int rid : a.unassigned) {
    for (std::size_t v = static_cast<std::size_t>(fb.n_real_vehicles);
         v < fb.instance.vehicles.size(); ++v) {
      if (fb.instance.vehicles[v].dummy_for == rid) {
        choice[v] = fb.catalog.trip_id(Trip::of({rid}));
        break;
      }
    }
  }
  a = finalize_assignment(std::move(choice), fb.catalog);
}

BatchSolve solve_batch(const FrozenBatch& fb, SolveMethod method,
                       std::uint64_t seed, bool timing) {
  using Clock = std::chrono::steady_clock;
  BatchSolve out;
  const auto t0 = Clock::now();
  FractionalSolution x;
  bool have_x = false;

  switch (method) {
    case SolveMethod::Ilp: {
      const IlpResult res = solve_ilp(fb.lp);
      if (res.status != IlpStatus::Optimal) return out;
      out.assignment = ilp_to_assignment(res, fb.catalog);
      x = res.root_fractional;
      have_x = true;
      break;
    }
    case SolveMethod::LpRand:
    case SolveMethod::LpDet: {
      const LpSolution sol = solve_lp(fb.lp);
      if (sol.status != LpStatus::Optimal) return out;
      x = sol.primal;
      have_x = true;
      out.assignment = method == SolveMethod::LpRand
                           ? round_dependent(x, fb.catalog, seed)
                           : round_deterministic(x, fb.catalog);
      break;
    }
  }
  map_uncovered_to_dummies(out.assignment, fb);
  if (timing) {
    out.solve_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  if (have_x) {
    const SupportHistogram h = support_histogram(x, 10);
    out.lp_integral_frac = h.integral_fraction;
    out.lp_half_integral_frac = h.half_integral_fraction;
  }
  // Rejections and real cost.
  for (std::size_t v = 0; v < out.assignment.trip_by_vehicle.size(); ++v) {
    const int trip = out.assignment.trip_by_vehicle[v];
    if (static_cast<int>(v) < fb.n_real_vehicles) {
      out.real_cost += fb.catalog.cost(trip, static_cast<int>(v));
    } else if (!fb.catalog.trips[static_cast<std::size_t>(trip)].empty()) {
      ++out.rejected;
    }
  }
  out.ok = true;
  return out;
}

/// Moves the fleet to `target_time` along committed routes, boarding and
/// dropping riders whose stops come due. Positions interpolate linearly
/// (the simulator runs on the Euclidean metric).
void advance_fleet(BatchState& state, const SimConfig& cfg,
                   double target_time) {
  for (SimVehicle& veh : state.fleet) {
    double t = veh.available_time;
    Point pos = veh.position;
    std::size_t next = 0;
    while (next < veh.committed.size() &&
           veh.committed[next].service_time <= target_time) {
      const CommittedStop& s = veh.committed[next];
      state.distance_traveled_km += euclidean_distance(pos, s.point);
      pos = s.point;
      t = s.service_time;
      if (s.is_pickup) {
        veh.onboard.push_back(
            {s.request_id, s.rider_destination, s.rider_latest_dropoff});
        std::erase_if(state.waiting, [&](const WaitingRequest& w) {
          return w.request.id == s.request_id;
        });
      } else {
        std::erase_if(veh.onboard, [&](const SimVehicle::Rider& r) {
          if (s.request_id >= 0) return r.request_id == s.request_id;
          return r.request_id == -1 && r.destination == s.point;
        });
        ++state.served;
      }
      ++next;
    }
    if (next < veh.committed.size()) {
      // Partway to the next stop at the cutoff.
      const CommittedStop& s = veh.committed[next];
      const double seg = euclidean_distance(pos, s.point);
      const double can = (target_time - t) * cfg.speed;
      if (seg > 1e-12 && can > 0) {
        const double frac = std::min(1.0, can / seg);
        state.distance_traveled_km += seg * frac;
        pos = {pos.x + (s.point.x - pos.x) * frac,
               pos.y + (s.point.y - pos.y) * frac};
      }
    }
    veh.committed.erase(veh.committed.begin(),
                        veh.committed.begin() + static_cast<long>(next));
    veh.position = pos;
    veh.available_time = target_time;
  }
}

/// Replaces each real vehicle's committed route with the optimal route of
/// its newly assigned trip.
void commit_assignment(BatchState& state, const FrozenBatch& fb,
                       const Assignment& a) {
  for (int v = 0; v < fb.n_real_vehicles; ++v) {
    SimVehicle& veh = state.fleet[static_cast<std::size_t>(v)];
    const int trip = a.trip_by_vehicle[static_cast<std::size_t>(v)];
    const Vehicle& model_vehicle = fb.instance.vehicles[static_cast<std::size_t>(v)];
    const RouteResult route = exact_cost(
        fb.catalog.trips[static_cast<std::size_t>(trip)], model_vehicle,
        fb.instance);
    if (!route.feasible)
      throw std::logic_error("committed trip lost feasibility");
    const std::vector<double> times =
        route_service_times(route, model_vehicle, fb.instance);
    veh.committed.clear();
    for (std::size_t s = 0; s < route.order.size(); ++s) {
      const Stop& stop = route.order[s];
      CommittedStop cs;
      cs.point = stop.point;
      cs.service_time = times[s];
      if (stop.kind == StopKind::Pickup) {
        cs.is_pickup = true;
        cs.request_id = stop.who;
        const Request& r = fb.instance.request_by_id(stop.who);
        cs.rider_destination = r.destination;
        cs.rider_latest_dropoff = fb.instance.latest_dropoff(r);
      } else if (stop.kind == StopKind::Dropoff) {
        cs.request_id = stop.who;
      } else {
        cs.request_id = veh.onboard[static_cast<std::size_t>(stop.who)].request_id;
      }
      veh.committed.push_back(cs);
    }
  }
}

}  // namespace

RoundReport run_round(BatchState& state, const SimConfig& cfg,
                      SolveMethod method, std::uint64_t seed, int round_index) {
  RoundReport rep;
  rep.round = round_index;
  rep.method = to_string(method);
  const BatchState entry_state = state;  // restored on solver failure

  // Reneging: requests whose latest pickup has passed cannot be served.
  std::vector<WaitingRequest> keep;
  for (const WaitingRequest& w : state.waiting) {
    if (w.request.latest_pickup() < state.clock) {
      ++state.reneged;
    } else {
      keep.push_back(w);
    }
  }
  state.waiting = std::move(keep);
  state.rejected_now.clear();

  rep.requests = static_cast<int>(state.waiting.size());
  if (rep.requests == 0) {
    // Fleet drifts along committed routes; no solve.
    advance_fleet(state, cfg, state.clock + cfg.batch_interval);
    state.clock += cfg.batch_interval;
    rep.lp_integral_frac = 1.0;
    return rep;
  }

  const FrozenBatch fb = freeze_batch(state, cfg);
  const BatchSolve bs = solve_batch(fb, method, seed, cfg.timing);
  if (!bs.ok) {
    state = entry_state;  // abort the round with the state unchanged
    rep.solved = false;
    return rep;
  }
  rep.rejected = bs.rejected;
  rep.rejected_pct = 100.0 * bs.rejected / std::max(1, rep.requests);
  rep.distance_km = bs.real_cost;
  rep.solve_ms = bs.solve_ms;
  rep.lp_integral_frac = bs.lp_integral_frac;
  rep.lp_half_integral_frac = bs.lp_half_integral_frac;

  commit_assignment(state, fb, bs.assignment);

  // Dummy-covered requests stay queued with augmented penalties.
  for (std::size_t v = static_cast<std::size_t>(fb.n_real_vehicles);
       v < bs.assignment.trip_by_vehicle.size(); ++v) {
    const Trip& t =
        fb.catalog.trips[static_cast<std::size_t>(bs.assignment.trip_by_vehicle[v])];
    for (int rid : t.requests()) state.rejected_now.push_back(rid);
  }
  std::sort(state.rejected_now.begin(), state.rejected_now.end());
  for (WaitingRequest& w : state.waiting) {
    if (std::binary_search(state.rejected_now.begin(), state.rejected_now.end(),
                           w.request.id)) {
      w.request.penalty *= cfg.penalty.growth;
      ++w.rounds_unassigned;
    }
  }

  advance_fleet(state, cfg, state.clock + cfg.batch_interval);
  state.clock += cfg.batch_interval;
  return rep;
}

SimulationReport run_simulation(const SimConfig& cfg) {
  SimulationReport report;
  BatchState state = init_state(cfg);

  // Poisson arrival stream, fully materialized up front.
  std::vector<Request> arrivals;
  {
    SplitMix64 rng(mix_seed(cfg.seed, 0));
    double t = 0.0;
    const double horizon = cfg.horizon_rounds * cfg.batch_interval;
    int id = 0;
    while (cfg.arrival_rate > 0) {
      t += rng.next_exponential(cfg.arrival_rate);
      if (t >= horizon) break;
      Request r;
      r.id = id++;
      r.origin = {rng.next_in(0, cfg.region_km), rng.next_in(0, cfg.region_km)};
      r.destination = {rng.next_in(0, cfg.region_km),
                       rng.next_in(0, cfg.region_km)};
      r.request_time = t;
      r.max_wait = cfg.qos.max_wait;
      r.max_delay = cfg.qos.max_delay;
      r.penalty = cfg.penalty.base_multiplier *
                  euclidean_distance(r.origin, r.destination);
      arrivals.push_back(r);
    }
  }
  report.total_arrivals = static_cast<long long>(arrivals.size());

  std::map<std::string, MethodAggregate> agg;
  for (SolveMethod m : cfg.methods) agg[to_string(m)].method = to_string(m);

  std::size_t next_arrival = 0;
  long long batch_total = 0;
  for (int round = 1; round <= cfg.horizon_rounds; ++round) {
    const double t_round = round * cfg.batch_interval;
    // Requests that arrived before this round join the queue.
    while (next_arrival < arrivals.size() &&
           arrivals[next_arrival].request_time <= t_round - cfg.batch_interval) {
      state.waiting.push_back({arrivals[next_arrival], 0});
      ++state.admitted;
      ++next_arrival;
    }
    std::sort(state.waiting.begin(), state.waiting.end(),
              [](const WaitingRequest& a, const WaitingRequest& b) {
                return a.request.id < b.request.id;
              });

    // Reneging happens inside run_round against the current clock; every
    // method sees the same frozen queue, the driver commits.
    BatchState probe = state;
    bool first = true;
    for (SolveMethod m : cfg.methods) {
      const std::uint64_t seed = mix_seed(
          cfg.seed, 1000003ULL * static_cast<std::uint64_t>(round) +
                        static_cast<std::uint64_t>(m) + 7);
      RoundReport rep;
      if (first) {
        rep = run_round(state, cfg, m, seed, round);
        first = false;
      } else {
        BatchState shadow = probe;
        rep = run_round(shadow, cfg, m, seed, round);
      }
      report.rounds.push_back(rep);
      MethodAggregate& a = agg[rep.method];
      a.requests += rep.requests;
      a.rejected += rep.rejected;
      a.distance_km += rep.distance_km;
      a.mean_solve_ms += rep.solve_ms;
      a.mean_lp_integral_frac += rep.lp_integral_frac;
      a.mean_lp_half_integral_frac += rep.lp_half_integral_frac;
    }
    batch_total +=
        report.rounds[report.rounds.size() - cfg.methods.size()].requests;
  }

  for (auto& [name, a] : agg) {
    a.rejected_pct =
        a.requests == 0 ? 0.0 : 100.0 * static_cast<double>(a.rejected) /
                                    static_cast<double>(a.requests);
    a.mean_solve_ms /= std::max(1, cfg.horizon_rounds);
    a.mean_lp_integral_frac /= std::max(1, cfg.horizon_rounds);
    a.mean_lp_half_integral_frac /= std::max(1, cfg.horizon_rounds);
    report.aggregates.push_back(a);
  }
  report.mean_batch_size =
      cfg.horizon_rounds == 0
          ? 0.0
          : static_cast<double>(batch_total) / cfg.horizon_rounds;
  report.final_state = std::move(state);
  return report;
}

std::string rounds_to_csv(const SimulationReport& report) {
  std::ostringstream os;
  os << "round,method,requests,rejected_pct,distance_km,solve_ms,"
        "lp_integral_frac,lp_half_integral_frac\n";
  for (const RoundReport& r : report.rounds) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%s,%d,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                  r.round, r.method.c_str(), r.requests, r.rejected_pct,
                  r.distance_km, r.solve_ms, r.lp_integral_frac,
                  r.lp_half_integral_frac);
    os << buf;
  }
  return os.str();
}

std::string aggregate_to_json(const SimulationReport& report,
                              const SimConfig& cfg) {
  using detail::json;
  json j;
  j["seed"] = cfg.seed;
  j["rng_algorithm"] = SplitMix64::kAlgorithmId;
  j["total_arrivals"] = report.total_arrivals;
  j["mean_batch_size"] = report.mean_batch_size;
  j["served"] = report.final_state.served;
  j["reneged"] = report.final_state.reneged;
  j["distance_traveled_km"] = report.final_state.distance_traveled_km;
  json methods = json::array();
  for (const MethodAggregate& a : report.aggregates) {
    json m;
    m["method"] = a.method;
    m["requests"] = a.requests;
    m["rejected"] = a.rejected;
    m["rejected_pct"] = a.rejected_pct;
    m["distance_km"] = a.distance_km;
    m["mean_solve_ms"] = a.mean_solve_ms;
    m["mean_lp_integral_frac"] = a.mean_lp_integral_frac;
    m["mean_lp_half_integral_frac"] = a.mean_lp_half_integral_frac;
    methods.push_back(m);
  }
  j["methods"] = methods;
  return detail::canonical_dump(j);
}

std::vector<double> run_scripted_carryover(int k, int rounds, int replications,
                                           std::uint64_t base_seed) {
  const TightnessFamily fam = gen_tightness_family(k);
  const TripCatalog& cat = *fam.instance.trips;
  const int nr = k + 1;
  std::vector<long long> still_unassigned(static_cast<std::size_t>(rounds), 0);
  for (int rep = 0; rep < replications; ++rep) {
    std::vector<bool> unassigned(static_cast<std::size_t>(nr), true);
    for (int round = 0; round < rounds; ++round) {
      const std::uint64_t seed =
          base_seed + 1000003ULL * static_cast<std::uint64_t>(rep) +
          static_cast<std::uint64_t>(round);
      const Assignment a = round_dependent(fam.x, cat, seed);
      std::set<int> missed(a.unassigned.begin(), a.unassigned.end());
      for (int r = 0; r < nr; ++r) {
        if (unassigned[static_cast<std::size_t>(r)] && !missed.count(r))
          unassigned[static_cast<std::size_t>(r)] = false;
      }
      for (int r = 0; r < nr; ++r)
        if (unassigned[static_cast<std::size_t>(r)])
          ++still_unassigned[static_cast<std::size_t>(round)];
    }
  }
  std::vector<double> fractions;
  for (int n = 0; n < rounds; ++n) {
    fractions.push_back(static_cast<double>(still_unassigned[static_cast<std::size_t>(n)]) /
                        (static_cast<double>(replications) * nr));
  }
  return fractions;
}

}  // namespace rtv
