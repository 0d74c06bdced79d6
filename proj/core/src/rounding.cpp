#include "rtv/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "json_detail.hpp"
#include "rtv/rng.hpp"

namespace rtv {

namespace {

constexpr double kMassTol = 1e-6;
constexpr double kSupportTol = 1e-7;

/// Per-vehicle slices of the sparse solution, by catalog vehicle index,
/// entries in ascending trip id.
std::vector<std::vector<std::pair<int, double>>> slice_by_vehicle(
    const FractionalSolution& x, const TripCatalog& cat) {
  std::vector<std::vector<std::pair<int, double>>> by_vehicle(
      cat.vehicle_ids.size());
  for (const auto& [key, v] : x.values) {
    const int vidx = cat.vehicle_index(key.first);
    by_vehicle[static_cast<std::size_t>(vidx)].push_back({key.second, v});
  }
  for (auto& lst : by_vehicle)
    std::sort(lst.begin(), lst.end());
  return by_vehicle;
}

void check_vehicle_masses(
    const std::vector<std::vector<std::pair<int, double>>>& by_vehicle,
    const TripCatalog& cat) {
  for (std::size_t v = 0; v < by_vehicle.size(); ++v) {
    double mass = 0.0;
    for (const auto& [t, val] : by_vehicle[v]) mass += val;
    if (std::abs(mass - 1.0) > kMassTol) {
      throw ValidationError(
          "x.vehicle[" + std::to_string(cat.vehicle_ids[v]) + "]",
          "trip mass " + std::to_string(mass) + " deviates from 1");
    }
  }
}

int sample_categorical(const std::vector<std::pair<int, double>>& dist,
                       double u) {
  double cum = 0.0;
  int last_supported = 0;
  for (const auto& [trip, val] : dist) {
    if (val <= 0.0) continue;
    cum += val;
    last_supported = trip;
    if (u < cum) return trip;
  }
  return last_supported;  // u beyond accumulated mass (roundoff)
}

}  // namespace

void validate_fractional(const FractionalSolution& x, const TripCatalog& cat) {
  const auto by_vehicle = slice_by_vehicle(x, cat);
  check_vehicle_masses(by_vehicle, cat);
  std::map<int, double> request_mass;
  for (int r : cat.request_ids) request_mass[r] = 0.0;
  for (const auto& [key, v] : x.values) {
    const int vidx = cat.vehicle_index(key.first);
    if (!cat.admissible(key.second, vidx)) {
      throw ValidationError("x",
                            "pair (trip " + std::to_string(key.second) +
                                ", vehicle " + std::to_string(key.first) +
                                ") not admissible");
    }
    if (v < -kMassTol || v > 1.0 + kMassTol)
      throw ValidationError("x", "value out of [0, 1]");
    for (int r : cat.trips[static_cast<std::size_t>(key.second)].requests())
      request_mass[r] += v;
  }
  for (const auto& [r, mass] : request_mass) {
    if (std::abs(mass - 1.0) > kMassTol)
      throw ValidationError("x.request[" + std::to_string(r) + "]",
                            "coverage mass " + std::to_string(mass) +
                                " deviates from 1");
  }
}

RoundingMethod rounding_method_from_string(const std::string& s) {
  if (s == "indep" || s == "independent") return RoundingMethod::Independent;
  if (s == "rand" || s == "dependent") return RoundingMethod::Dependent;
  if (s == "det" || s == "deterministic") return RoundingMethod::Deterministic;
  throw std::invalid_argument("unknown rounding method: " + s);
}

std::string to_string(RoundingMethod m) {
  switch (m) {
    case RoundingMethod::Independent: return "indep";
    case RoundingMethod::Dependent: return "rand";
    case RoundingMethod::Deterministic: return "det";
  }
  return "?";
}

IndependentDraw round_independent(const FractionalSolution& x,
                                  std::uint64_t seed) {
  IndependentDraw out;
  SplitMix64 rng(seed);
  for (const auto& [key, v] : x.values) {
    const double u = rng.next_unit();
    if (u < v) out.chosen.push_back(key);
  }
  return out;
}

std::vector<int> sample_dependent_raw(const FractionalSolution& x,
                                      const TripCatalog& cat,
                                      std::uint64_t seed) {
  const auto by_vehicle = slice_by_vehicle(x, cat);
  check_vehicle_masses(by_vehicle, cat);
  SplitMix64 rng(seed);
  std::vector<int> choice(by_vehicle.size(), 0);
  for (std::size_t v = 0; v < by_vehicle.size(); ++v)
    choice[v] = sample_categorical(by_vehicle[v], rng.next_unit());
  return choice;
}

Assignment round_dependent(const FractionalSolution& x, const TripCatalog& cat,
                           std::uint64_t seed) {
  return multiplicity_correction(sample_dependent_raw(x, cat, seed), cat);
}

Assignment multiplicity_correction(std::vector<int> trip_by_vehicle,
                                   const TripCatalog& cat) {
  // Requests covered by two or more chosen trips, ascending id.
  std::map<int, std::vector<int>> coverage;  // request id -> vehicle indices
  for (std::size_t v = 0; v < trip_by_vehicle.size(); ++v) {
    for (int r : cat.trips[static_cast<std::size_t>(trip_by_vehicle[v])].requests())
      coverage[r].push_back(static_cast<int>(v));
  }
  for (const auto& [rid, vehicles] : coverage) {
    if (vehicles.size() < 2) continue;
    // Keep rid where removing it from all the other trips saves the most.
    double best_saving = -1.0;
    int keep = -1;
    for (int vi : vehicles) {
      double saving = 0.0;
      for (int vj : vehicles) {
        if (vj == vi) continue;
        const int t = trip_by_vehicle[static_cast<std::size_t>(vj)];
        const Trip& trip = cat.trips[static_cast<std::size_t>(t)];
        const int sub = cat.trip_id(trip.without(rid));
        if (sub < 0 || !cat.admissible(sub, vj)) {
          throw ValidationError("catalog",
                                "closure violation: reduced trip missing for "
                                "request " + std::to_string(rid));
        }
        saving += cat.cost(t, vj) - cat.cost(sub, vj);
      }
      const bool better =
          saving > best_saving ||
          (saving == best_saving && keep >= 0 &&
           cat.vehicle_ids[static_cast<std::size_t>(vi)] <
               cat.vehicle_ids[static_cast<std::size_t>(keep)]);
      if (better) {
        best_saving = saving;
        keep = vi;
      }
    }
    for (int vj : vehicles) {
      if (vj == keep) continue;
      const int t = trip_by_vehicle[static_cast<std::size_t>(vj)];
      const int sub = cat.trip_id(cat.trips[static_cast<std::size_t>(t)].without(rid));
      trip_by_vehicle[static_cast<std::size_t>(vj)] = sub;
    }
  }
  return finalize_assignment(std::move(trip_by_vehicle), cat);
}

Assignment round_deterministic(const FractionalSolution& x,
                               const TripCatalog& cat) {
  const auto by_vehicle = slice_by_vehicle(x, cat);
  check_vehicle_masses(by_vehicle, cat);
  std::vector<int> choice(by_vehicle.size(), 0);
  for (std::size_t v = 0; v < by_vehicle.size(); ++v) {
    double best = -1.0;
    for (const auto& [trip, val] : by_vehicle[v]) {
      if (val > best) {  // ascending trip id, so ties keep the lowest id
        best = val;
        choice[v] = trip;
      }
    }
  }
  return multiplicity_correction(std::move(choice), cat);
}

double RoundingTrialStats::deviation_frequency(std::size_t request_pos,
                                               int delta) const {
  long long count = 0, total = 0;
  const auto& hist = y_counts[request_pos];
  for (std::size_t y = 0; y < hist.size(); ++y) {
    total += hist[y];
    if (static_cast<int>(y) > 1 + delta) count += hist[y];
  }
  return total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
}

namespace {

struct WorkerCounters {
  std::vector<long long> unassigned;               // per request position
  std::vector<std::vector<long long>> y_counts;    // [request][y]
  std::vector<long long> pair_chosen;              // per x support entry
  std::vector<long long> pair_both;                // per covariance pair
  long long vehicle_violations = 0;

  void init(std::size_t nr, std::size_t nv, std::size_t nsupport,
            std::size_t npairs) {
    unassigned.assign(nr, 0);
    y_counts.assign(nr, std::vector<long long>(nv + 1, 0));
    pair_chosen.assign(nsupport, 0);
    pair_both.assign(npairs, 0);
  }

  void merge(const WorkerCounters& o) {
    for (std::size_t i = 0; i < unassigned.size(); ++i)
      unassigned[i] += o.unassigned[i];
    for (std::size_t i = 0; i < y_counts.size(); ++i)
      for (std::size_t y = 0; y < y_counts[i].size(); ++y)
        y_counts[i][y] += o.y_counts[i][y];
    for (std::size_t i = 0; i < pair_chosen.size(); ++i)
      pair_chosen[i] += o.pair_chosen[i];
    for (std::size_t i = 0; i < pair_both.size(); ++i)
      pair_both[i] += o.pair_both[i];
    vehicle_violations += o.vehicle_violations;
  }
};

}  // namespace

RoundingTrialStats run_trials(const FractionalSolution& x,
                              const TripCatalog& cat, RoundingMethod method,
                              long long trials, std::uint64_t base_seed,
                              int jobs) {
  if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
  const auto by_vehicle = slice_by_vehicle(x, cat);
  if (method != RoundingMethod::Independent) check_vehicle_masses(by_vehicle, cat);

  const std::size_t nr = cat.request_ids.size();
  const std::size_t nv = cat.vehicle_ids.size();
  std::map<int, int> request_pos;
  for (std::size_t r = 0; r < nr; ++r)
    request_pos[cat.request_ids[r]] = static_cast<int>(r);

  // Support entries in deterministic order, with request membership
  // resolved to request positions once.
  struct SupportEntry {
    int vehicle_idx;
    int trip;
    double value;
    std::vector<int> request_positions;
  };
  std::vector<SupportEntry> support;
  std::map<std::pair<int, int>, std::size_t> support_pos;  // (veh idx, trip)
  for (std::size_t v = 0; v < by_vehicle.size(); ++v) {
    for (const auto& [trip, val] : by_vehicle[v]) {
      SupportEntry e{static_cast<int>(v), trip, val, {}};
      for (int r : cat.trips[static_cast<std::size_t>(trip)].requests())
        e.request_positions.push_back(request_pos.at(r));
      support_pos[{static_cast<int>(v), trip}] = support.size();
      support.push_back(std::move(e));
    }
  }
  // Same-vehicle covariance pairs over the support (> kSupportTol).
  struct CovPair {
    std::size_t a, b;  // support indices
  };
  std::vector<CovPair> pairs;
  for (std::size_t v = 0; v < by_vehicle.size(); ++v) {
    const auto& lst = by_vehicle[v];
    for (std::size_t i = 0; i < lst.size(); ++i) {
      if (lst[i].second <= kSupportTol) continue;
      for (std::size_t j = i + 1; j < lst.size(); ++j) {
        if (lst[j].second <= kSupportTol) continue;
        pairs.push_back({support_pos.at({static_cast<int>(v), lst[i].first}),
                         support_pos.at({static_cast<int>(v), lst[j].first})});
      }
    }
  }

  std::vector<double> costs(static_cast<std::size_t>(trials), 0.0);
  std::vector<double> raw_costs(static_cast<std::size_t>(trials), 0.0);

  const int nworkers = std::max(1, jobs);
  std::vector<WorkerCounters> counters(static_cast<std::size_t>(nworkers));
  for (auto& c : counters) c.init(nr, nv, support.size(), pairs.size());

  auto run_range = [&](int w, long long lo, long long hi) {
    WorkerCounters& ctr = counters[static_cast<std::size_t>(w)];
    std::vector<int> y_local(nr, 0);
    std::vector<int> chosen_trip(nv, 0);
    for (long long i = lo; i < hi; ++i) {
      const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
      std::fill(y_local.begin(), y_local.end(), 0);

      if (method == RoundingMethod::Independent) {
        SplitMix64 rng(seed);
        double raw_cost = 0.0;
        std::vector<int> per_vehicle_count(nv, 0);
        std::vector<bool> chosen(support.size(), false);
        // Draw in the same order as round_independent (vehicle, trip).
        for (std::size_t s = 0; s < support.size(); ++s) {
          const double u = rng.next_unit();
          if (u < support[s].value) {
            chosen[s] = true;
            ++ctr.pair_chosen[s];
            raw_cost += cat.cost(support[s].trip, support[s].vehicle_idx);
            ++per_vehicle_count[static_cast<std::size_t>(support[s].vehicle_idx)];
            for (int rp : support[s].request_positions)
              ++y_local[static_cast<std::size_t>(rp)];
          }
        }
        for (std::size_t p = 0; p < pairs.size(); ++p)
          if (chosen[pairs[p].a] && chosen[pairs[p].b]) ++ctr.pair_both[p];
        bool violated = false;
        for (int c : per_vehicle_count)
          if (c >= 2) violated = true;
        if (violated) ++ctr.vehicle_violations;
        raw_costs[static_cast<std::size_t>(i)] = raw_cost;
        costs[static_cast<std::size_t>(i)] = raw_cost;
        for (std::size_t r = 0; r < nr; ++r) {
          ++ctr.y_counts[r][static_cast<std::size_t>(y_local[r])];
          if (y_local[r] == 0) ++ctr.unassigned[r];
        }
        continue;
      }

      // Dependent / deterministic: one trip per vehicle.
      if (method == RoundingMethod::Dependent) {
        SplitMix64 rng(seed);
        for (std::size_t v = 0; v < nv; ++v)
          chosen_trip[v] = sample_categorical(by_vehicle[v], rng.next_unit());
      } else {
        for (std::size_t v = 0; v < nv; ++v) {
          double best = -1.0;
          chosen_trip[v] = 0;
          for (const auto& [trip, val] : by_vehicle[v]) {
            if (val > best) {
              best = val;
              chosen_trip[v] = trip;
            }
          }
        }
      }
      double raw_cost = 0.0;
      for (std::size_t v = 0; v < nv; ++v) {
        raw_cost += cat.cost(chosen_trip[v], static_cast<int>(v));
        auto it = support_pos.find({static_cast<int>(v), chosen_trip[v]});
        if (it != support_pos.end()) {
          ++ctr.pair_chosen[it->second];
          for (int rp : support[it->second].request_positions)
            ++y_local[static_cast<std::size_t>(rp)];
        } else {
          for (int r :
               cat.trips[static_cast<std::size_t>(chosen_trip[v])].requests())
            ++y_local[static_cast<std::size_t>(request_pos.at(r))];
        }
      }
      raw_costs[static_cast<std::size_t>(i)] = raw_cost;
      const Assignment corrected = multiplicity_correction(chosen_trip, cat);
      costs[static_cast<std::size_t>(i)] = corrected.cost;
      for (std::size_t r = 0; r < nr; ++r)
        ++ctr.y_counts[r][static_cast<std::size_t>(y_local[r])];
      for (int rid : corrected.unassigned)
        ++ctr.unassigned[static_cast<std::size_t>(request_pos.at(rid))];
    }
  };

  if (nworkers == 1) {
    run_range(0, 0, trials);
  } else {
    std::vector<std::thread> threads;
    const long long chunk = (trials + nworkers - 1) / nworkers;
    for (int w = 0; w < nworkers; ++w) {
      const long long lo = w * chunk;
      const long long hi = std::min(trials, lo + chunk);
      if (lo >= hi) break;
      threads.emplace_back(run_range, w, lo, hi);
    }
    for (auto& t : threads) t.join();
  }
  for (int w = 1; w < nworkers; ++w)
    counters[0].merge(counters[static_cast<std::size_t>(w)]);
  const WorkerCounters& total = counters[0];

  RoundingTrialStats st;
  st.method = to_string(method);
  st.rng_algorithm = SplitMix64::kAlgorithmId;
  st.trials = trials;
  st.base_seed = base_seed;
  st.request_ids = cat.request_ids;

  double sum = 0.0, raw_sum = 0.0;
  for (long long i = 0; i < trials; ++i) {
    sum += costs[static_cast<std::size_t>(i)];
    raw_sum += raw_costs[static_cast<std::size_t>(i)];
  }
  st.mean_cost = sum / static_cast<double>(trials);
  st.mean_raw_cost = raw_sum / static_cast<double>(trials);
  double ss = 0.0;
  for (long long i = 0; i < trials; ++i) {
    const double d = costs[static_cast<std::size_t>(i)] - st.mean_cost;
    ss += d * d;
  }
  st.cost_stddev = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1)) : 0.0;

  st.per_request_unassigned_frequency.assign(nr, 0.0);
  long long unassigned_total = 0;
  for (std::size_t r = 0; r < nr; ++r) {
    st.per_request_unassigned_frequency[r] =
        static_cast<double>(total.unassigned[r]) / static_cast<double>(trials);
    unassigned_total += total.unassigned[r];
  }
  st.unassigned_fraction_mean =
      nr == 0 ? 0.0
              : static_cast<double>(unassigned_total) /
                    (static_cast<double>(trials) * static_cast<double>(nr));
  st.y_counts = total.y_counts;
  for (std::size_t r = 0; r < nr; ++r) {
    for (std::size_t y = 0; y < total.y_counts[r].size(); ++y) {
      const int delta = std::max(0, static_cast<int>(y) - 1);
      st.overassignment_histogram[delta] +=
          static_cast<double>(total.y_counts[r][y]) /
          (static_cast<double>(trials) * static_cast<double>(std::max<std::size_t>(nr, 1)));
    }
  }
  for (std::size_t s = 0; s < support.size(); ++s) {
    st.raw_pair_frequency[{cat.vehicle_ids[static_cast<std::size_t>(
                               support[s].vehicle_idx)],
                           support[s].trip}] =
        static_cast<double>(total.pair_chosen[s]) / static_cast<double>(trials);
  }
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const SupportEntry& a = support[pairs[p].a];
    const SupportEntry& b = support[pairs[p].b];
    PairCovarianceSample s;
    s.vehicle_id = cat.vehicle_ids[static_cast<std::size_t>(a.vehicle_idx)];
    s.trip_a = a.trip;
    s.trip_b = b.trip;
    s.x_a = a.value;
    s.x_b = b.value;
    s.freq_a = static_cast<double>(total.pair_chosen[pairs[p].a]) /
               static_cast<double>(trials);
    s.freq_b = static_cast<double>(total.pair_chosen[pairs[p].b]) /
               static_cast<double>(trials);
    s.freq_ab = static_cast<double>(total.pair_both[p]) /
                static_cast<double>(trials);
    s.empirical_cov = s.freq_ab - s.freq_a * s.freq_b;
    st.pair_covariances.push_back(s);
  }
  st.vehicle_violation_frequency =
      static_cast<double>(total.vehicle_violations) / static_cast<double>(trials);
  return st;
}

std::string trial_stats_to_json(const RoundingTrialStats& st) {
  using detail::json;
  json j;
  j["method"] = st.method;
  j["rng_algorithm"] = st.rng_algorithm;
  j["trials"] = st.trials;
  j["base_seed"] = st.base_seed;
  j["mean_cost"] = st.mean_cost;
  j["cost_stddev"] = st.cost_stddev;
  j["mean_raw_cost"] = st.mean_raw_cost;
  j["unassigned_fraction_mean"] = st.unassigned_fraction_mean;
  json freq = json::object();
  for (std::size_t r = 0; r < st.request_ids.size(); ++r)
    freq[std::to_string(st.request_ids[r])] =
        st.per_request_unassigned_frequency[r];
  j["per_request_unassigned_frequency"] = freq;
  json hist = json::object();
  for (const auto& [delta, f] : st.overassignment_histogram)
    hist[std::to_string(delta)] = f;
  j["overassignment_histogram"] = hist;
  json covs = json::array();
  for (const auto& c : st.pair_covariances) {
    json e;
    e["vehicle"] = c.vehicle_id;
    e["trip_a"] = c.trip_a;
    e["trip_b"] = c.trip_b;
    e["x_a"] = c.x_a;
    e["x_b"] = c.x_b;
    e["empirical_cov"] = c.empirical_cov;
    e["product_bound"] = -c.x_a * c.x_b;
    covs.push_back(e);
  }
  j["pair_covariances"] = covs;
  j["vehicle_violation_frequency"] = st.vehicle_violation_frequency;
  return detail::canonical_dump(j);
}

}  // namespace rtv
