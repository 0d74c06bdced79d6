#include "rtv/generators.hpp"

#include <algorithm>
#include <stdexcept>

#include "rtv/rng.hpp"

namespace rtv {

namespace {

/// All non-empty subsets of {0..n-1} of size <= max_size, in catalog order
/// (size, then lexicographic), as request-id vectors.
std::vector<std::vector<int>> subsets_by_size(int n, int max_size) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start, int remaining) -> void {
    if (!cur.empty()) out.push_back(cur);
    if (remaining == 0) return;
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      self(self, i + 1, remaining - 1);
      cur.pop_back();
    }
  };
  rec(rec, 0, max_size);
  // Ids follow catalog generation order: size, then lexicographic.
  std::stable_sort(out.begin(), out.end(),
                   [](const std::vector<int>& a, const std::vector<int>& b) {
                     if (a.size() != b.size()) return a.size() < b.size();
                     return a < b;
                   });
  return out;
}

/// Shared-endpoint geometry and unit-cost catalog for the analytic
/// families; costs are abstract, so routing is bypassed entirely.
Instance abstract_family(int k, int n_vehicles) {
  if (k < 2) throw std::invalid_argument("family requires k >= 2");
  Instance inst;
  const int n_requests = k + 1;
  for (int r = 0; r < n_requests; ++r) {
    Request req;
    req.id = r;
    req.origin = {0.0, 0.0};
    req.destination = {1.0, 0.0};
    req.request_time = 0.0;
    req.max_wait = 1e9;
    req.max_delay = 1e9;
    req.penalty = 10.0;
    inst.requests.push_back(req);
  }
  for (int v = 0; v < n_vehicles; ++v) {
    Vehicle veh;
    veh.id = v;
    veh.position = {0.0, 0.0};
    veh.available_time = 0.0;
    veh.capacity = k;
    inst.vehicles.push_back(veh);
  }
  inst.metric = Metric::euclidean();
  inst.speed = 1.0;
  inst.qos = {1e9, 1e9};

  TripCatalog cat;
  for (const Request& r : inst.requests) cat.request_ids.push_back(r.id);
  for (const Vehicle& v : inst.vehicles) cat.vehicle_ids.push_back(v.id);
  cat.trips.push_back(Trip());
  for (const auto& ids : subsets_by_size(n_requests, k))
    cat.trips.push_back(Trip::of(ids));
  cat.per_vehicle.assign(static_cast<std::size_t>(n_vehicles), {});
  for (int v = 0; v < n_vehicles; ++v) {
    cat.per_vehicle[static_cast<std::size_t>(v)].push_back({0, 0.0});
    for (std::size_t t = 1; t < cat.trips.size(); ++t)
      cat.per_vehicle[static_cast<std::size_t>(v)].push_back(
          {static_cast<int>(t), 1.0});
  }
  cat.reindex();
  inst.trips = std::move(cat);
  return inst;
}

}  // namespace

Instance gen_gap_family(int k) { return abstract_family(k, 2); }

TightnessFamily gen_tightness_family(int k) {
  TightnessFamily fam;
  fam.instance = abstract_family(k, k + 1);
  const TripCatalog& cat = *fam.instance.trips;
  // Vehicle i carries the k-passenger trip missing request i.
  for (int v = 0; v <= k; ++v) {
    std::vector<int> ids;
    for (int r = 0; r <= k; ++r)
      if (r != v) ids.push_back(r);
    const int tid = cat.trip_id(Trip::of(ids));
    if (tid < 0) throw std::logic_error("tightness trip missing from catalog");
    fam.x.set(v, tid, 1.0 / k);
    fam.x.set(v, 0, (k - 1.0) / k);
  }
  fam.x.objective = (k + 1.0) / k;
  return fam;
}

Instance gen_random(const RandomInstanceParams& p) {
  if (p.n_requests < 0 || p.n_vehicles < 0)
    throw std::invalid_argument("gen_random: counts must be >= 0");
  Instance inst;
  SplitMix64 rng(p.seed);
  for (int r = 0; r < p.n_requests; ++r) {
    Request req;
    req.id = r;
    req.origin = {rng.next_in(0, p.region_km), rng.next_in(0, p.region_km)};
    req.destination = {rng.next_in(0, p.region_km), rng.next_in(0, p.region_km)};
    req.request_time = 0.0;
    req.max_wait = p.max_wait;
    req.max_delay = p.max_delay;
    req.penalty =
        p.penalty_multiplier * euclidean_distance(req.origin, req.destination);
    inst.requests.push_back(req);
  }
  for (int v = 0; v < p.n_vehicles; ++v) {
    Vehicle veh;
    veh.id = v;
    veh.position = {rng.next_in(0, p.region_km), rng.next_in(0, p.region_km)};
    veh.available_time = 0.0;
    veh.capacity = p.capacity;
    inst.vehicles.push_back(veh);
  }
  inst.metric = Metric::euclidean();
  inst.speed = p.speed;
  inst.qos = {p.max_wait, p.max_delay};
  validate_instance(inst);
  return inst;
}

}  // namespace rtv
