#include "rtv/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace rtv {

Metric Metric::explicit_matrix(std::vector<Point> points,
                               std::vector<std::vector<double>> matrix) {
  const std::size_t n = points.size();
  if (matrix.size() != n)
    throw std::invalid_argument("metric: matrix row count != point count");
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i].size() != n)
      throw std::invalid_argument("metric: matrix is not square");
    if (matrix[i][i] != 0.0)
      throw std::invalid_argument("metric: nonzero diagonal entry");
    for (std::size_t j = 0; j < n; ++j) {
      if (matrix[i][j] < 0.0)
        throw std::invalid_argument("metric: negative distance");
      if (matrix[i][j] != matrix[j][i])
        throw std::invalid_argument("metric: matrix is not symmetric");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (matrix[i][j] > matrix[i][k] + matrix[k][j] + 1e-12)
          throw std::invalid_argument("metric: triangle inequality violated");

  Metric m;
  m.points_ = std::move(points);
  m.matrix_ = std::move(matrix);
  for (std::size_t i = 0; i < m.points_.size(); ++i)
    m.index_.emplace(std::make_pair(m.points_[i].x, m.points_[i].y), i);
  return m;
}

std::size_t Metric::index_of(const Point& p) const {
  auto it = index_.find({p.x, p.y});
  if (it == index_.end())
    throw std::invalid_argument("metric: point not in explicit point set");
  return it->second;
}

double Metric::distance(const Point& a, const Point& b) const {
  if (is_euclidean()) return euclidean_distance(a, b);
  return matrix_[index_of(a)][index_of(b)];
}

Trip Trip::of(std::vector<int> request_ids) {
  std::sort(request_ids.begin(), request_ids.end());
  request_ids.erase(std::unique(request_ids.begin(), request_ids.end()),
                    request_ids.end());
  Trip t;
  t.requests_ = std::move(request_ids);
  return t;
}

bool Trip::contains(int request_id) const {
  return std::binary_search(requests_.begin(), requests_.end(), request_id);
}

Trip Trip::without(int request_id) const {
  Trip t;
  t.requests_.reserve(requests_.size());
  for (int r : requests_)
    if (r != request_id) t.requests_.push_back(r);
  return t;
}

Trip Trip::with(int request_id) const {
  std::vector<int> ids = requests_;
  ids.push_back(request_id);
  return Trip::of(std::move(ids));
}

void TripCatalog::reindex() {
  trip_lookup_.clear();
  for (std::size_t i = 0; i < trips.size(); ++i)
    trip_lookup_[trips[i].requests()] = static_cast<int>(i);
  per_request.assign(request_ids.size(), {});
  std::map<int, int> req_index;
  for (std::size_t i = 0; i < request_ids.size(); ++i)
    req_index[request_ids[i]] = static_cast<int>(i);
  std::set<int> seen_trips;
  for (const auto& lst : per_vehicle)
    for (const auto& adm : lst) seen_trips.insert(adm.trip);
  for (int t : seen_trips) {
    for (int r : trips[static_cast<std::size_t>(t)].requests()) {
      auto it = req_index.find(r);
      if (it == req_index.end())
        throw std::out_of_range("catalog trip references unknown request id " +
                                std::to_string(r));
      per_request[static_cast<std::size_t>(it->second)].push_back(t);
    }
  }
  for (auto& lst : per_vehicle) {
    std::sort(lst.begin(), lst.end(),
              [](const Admissible& a, const Admissible& b) { return a.trip < b.trip; });
  }
}

int TripCatalog::trip_id(const Trip& t) const {
  auto it = trip_lookup_.find(t.requests());
  return it == trip_lookup_.end() ? -1 : it->second;
}

bool TripCatalog::admissible(int trip, int vehicle_index) const {
  const auto& lst = per_vehicle[static_cast<std::size_t>(vehicle_index)];
  auto it = std::lower_bound(
      lst.begin(), lst.end(), trip,
      [](const Admissible& a, int t) { return a.trip < t; });
  return it != lst.end() && it->trip == trip;
}

double TripCatalog::cost(int trip, int vehicle_index) const {
  const auto& lst = per_vehicle[static_cast<std::size_t>(vehicle_index)];
  auto it = std::lower_bound(
      lst.begin(), lst.end(), trip,
      [](const Admissible& a, int t) { return a.trip < t; });
  if (it == lst.end() || it->trip != trip) {
    throw std::out_of_range("inadmissible pair (trip " + std::to_string(trip) +
                            ", vehicle index " + std::to_string(vehicle_index) +
                            ")");
  }
  return it->cost;
}

int TripCatalog::request_index(int request_id) const {
  for (std::size_t i = 0; i < request_ids.size(); ++i)
    if (request_ids[i] == request_id) return static_cast<int>(i);
  throw std::out_of_range("unknown request id " + std::to_string(request_id));
}

int TripCatalog::vehicle_index(int vehicle_id) const {
  for (std::size_t i = 0; i < vehicle_ids.size(); ++i)
    if (vehicle_ids[i] == vehicle_id) return static_cast<int>(i);
  throw std::out_of_range("unknown vehicle id " + std::to_string(vehicle_id));
}

int Instance::request_index(int request_id) const {
  for (std::size_t i = 0; i < requests.size(); ++i)
    if (requests[i].id == request_id) return static_cast<int>(i);
  throw std::out_of_range("unknown request id " + std::to_string(request_id));
}

int Instance::vehicle_index(int vehicle_id) const {
  for (std::size_t i = 0; i < vehicles.size(); ++i)
    if (vehicles[i].id == vehicle_id) return static_cast<int>(i);
  throw std::out_of_range("unknown vehicle id " + std::to_string(vehicle_id));
}

double DualSolution::objective() const {
  double s = 0.0;
  for (double v : y) s += v;
  for (double v : z) s -= v;
  return s;
}

double DualSolution::reduced_cost(const TripCatalog& cat, int trip,
                                  int vehicle_index) const {
  double rc = cat.cost(trip, vehicle_index) + z[static_cast<std::size_t>(vehicle_index)];
  for (int r : cat.trips[static_cast<std::size_t>(trip)].requests())
    rc -= y[static_cast<std::size_t>(cat.request_index(r))];
  return rc;
}

std::string CatalogViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::MissingEmptyTrip:
      os << "empty trip not admissible for vehicle index " << vehicle_index;
      break;
    case Kind::ClosureViolation:
      os << "closure: trip " << trip << " in T(v" << vehicle_index
         << ") but trip minus request " << request << " is not";
      break;
    case Kind::MonotonicityViolation:
      os << "monotonicity: removing request " << request << " from trip "
         << trip << " raises cost for vehicle index " << vehicle_index;
      break;
  }
  return os.str();
}

std::vector<CatalogViolation> validate_catalog(const TripCatalog& cat) {
  std::vector<CatalogViolation> out;
  constexpr double kCostTol = 1e-9;
  for (std::size_t v = 0; v < cat.per_vehicle.size(); ++v) {
    const int vi = static_cast<int>(v);
    if (!cat.admissible(0, vi)) {
      out.push_back({CatalogViolation::Kind::MissingEmptyTrip, 0, vi, -1});
    }
    for (const auto& adm : cat.per_vehicle[v]) {
      const Trip& t = cat.trips[static_cast<std::size_t>(adm.trip)];
      for (int r : t.requests()) {
        const int sub = cat.trip_id(t.without(r));
        if (sub < 0 || !cat.admissible(sub, vi)) {
          out.push_back({CatalogViolation::Kind::ClosureViolation, adm.trip, vi, r});
          continue;
        }
        if (cat.cost(sub, vi) > adm.cost + kCostTol) {
          out.push_back(
              {CatalogViolation::Kind::MonotonicityViolation, adm.trip, vi, r});
        }
      }
    }
  }
  return out;
}

double assignment_cost(const Assignment& a, const TripCatalog& cat) {
  double total = 0.0;
  for (std::size_t v = 0; v < a.trip_by_vehicle.size(); ++v)
    total += cat.cost(a.trip_by_vehicle[v], static_cast<int>(v));
  return total;
}

Assignment finalize_assignment(std::vector<int> trip_by_vehicle,
                               const TripCatalog& cat) {
  Assignment a;
  a.trip_by_vehicle = std::move(trip_by_vehicle);
  a.cost = assignment_cost(a, cat);
  std::set<int> covered;
  for (int t : a.trip_by_vehicle)
    for (int r : cat.trips[static_cast<std::size_t>(t)].requests())
      covered.insert(r);
  for (int r : cat.request_ids)
    if (!covered.count(r)) a.unassigned.push_back(r);
  std::sort(a.unassigned.begin(), a.unassigned.end());
  return a;
}

void validate_instance(const Instance& inst) {
  std::set<int> request_ids;
  bool shared_endpoints = true;
  for (std::size_t i = 1; i < inst.requests.size(); ++i) {
    if (!(inst.requests[i].origin == inst.requests[0].origin) ||
        !(inst.requests[i].destination == inst.requests[0].destination)) {
      shared_endpoints = false;
      break;
    }
  }
  for (const Request& r : inst.requests) {
    const std::string who = "requests[" + std::to_string(r.id) + "]";
    if (r.id < 0) throw ValidationError(who + ".id", "must be >= 0");
    if (!request_ids.insert(r.id).second)
      throw ValidationError(who + ".id", "duplicate request id");
    if (r.max_wait < 0) throw ValidationError(who + ".max_wait", "must be >= 0");
    if (r.max_delay < 0) throw ValidationError(who + ".max_delay", "must be >= 0");
    if (r.penalty < 0) throw ValidationError(who + ".penalty", "must be >= 0");
    if (r.origin == r.destination && !shared_endpoints) {
      throw ValidationError(
          who + ".destination",
          "origin equals destination (only synthetic shared-endpoint "
          "instances may do this)");
    }
  }
  std::set<int> vehicle_ids;
  for (const Vehicle& v : inst.vehicles) {
    const std::string who = "vehicles[" + std::to_string(v.id) + "]";
    if (v.id < 0) throw ValidationError(who + ".id", "must be >= 0");
    if (!vehicle_ids.insert(v.id).second)
      throw ValidationError(who + ".id", "duplicate vehicle id");
    if (v.capacity < 1) throw ValidationError(who + ".capacity", "must be >= 1");
    if (static_cast<int>(v.onboard.size()) > v.capacity)
      throw ValidationError(who + ".onboard", "more passengers than capacity");
    for (const OnboardPassenger& p : v.onboard) {
      if (p.latest_dropoff < v.available_time)
        throw ValidationError(who + ".onboard.latest_dropoff",
                              "deadline before vehicle availability");
    }
    if (v.dummy_for && !request_ids.count(*v.dummy_for))
      throw ValidationError(who + ".dummy_for", "references unknown request");
  }
  if (inst.speed <= 0) throw ValidationError("speed", "must be > 0");
  if (inst.qos.max_wait < 0) throw ValidationError("qos.max_wait", "must be >= 0");
  if (inst.qos.max_delay < 0) throw ValidationError("qos.max_delay", "must be >= 0");
}

}  // namespace rtv
