#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtv/geom.hpp"

namespace rtv {

/// Travel request. Times in seconds, distances in kilometers, penalty in
/// the same cost units as trip-vehicle costs (kilometers here).
struct Request {
  int id = 0;
  Point origin;
  Point destination;
  double request_time = 0.0;
  double max_wait = 0.0;   // latest pickup = request_time + max_wait
  double max_delay = 0.0;  // latest dropoff = request_time + direct time + max_delay
  double penalty = 0.0;    // cost of leaving the request unserved

  double latest_pickup() const { return request_time + max_wait; }
};

/// A passenger already inside a vehicle: only its remaining dropoff matters.
struct OnboardPassenger {
  Point destination;
  double latest_dropoff = 0.0;
};

struct Vehicle {
  int id = 0;
  Point position;
  double available_time = 0.0;
  int capacity = 1;
  std::vector<OnboardPassenger> onboard;
  /// Set for penalty-mode dummy vehicles: the single request this vehicle
  /// may serve (at its penalty cost).
  std::optional<int> dummy_for;

  bool is_dummy() const { return dummy_for.has_value(); }
};

/// A trip is a canonical (sorted, duplicate-free) set of request ids. The
/// empty trip is valid and always has trip id 0 in a catalog.
class Trip {
 public:
  Trip() = default;
  /// Canonicalizes: sorts and removes duplicates.
  static Trip of(std::vector<int> request_ids);

  const std::vector<int>& requests() const { return requests_; }
  bool empty() const { return requests_.empty(); }
  std::size_t size() const { return requests_.size(); }
  bool contains(int request_id) const;
  Trip without(int request_id) const;
  Trip with(int request_id) const;

  friend bool operator==(const Trip& a, const Trip& b) = default;
  friend std::strong_ordering operator<=>(const Trip& a, const Trip& b) {
    // Size-then-lexicographic: matches catalog generation order.
    if (a.requests_.size() != b.requests_.size())
      return a.requests_.size() <=> b.requests_.size();
    return a.requests_ <=> b.requests_;
  }

 private:
  std::vector<int> requests_;
};

struct Instance;

/// Downward-closed trip catalog with per-vehicle admissible lists and
/// per-request membership lists. Vehicle entries are indexed by position in
/// the originating instance's vehicle list; `vehicle_ids` maps back to ids.
struct TripCatalog {
  struct Admissible {
    int trip = 0;
    double cost = 0.0;
  };

  std::vector<Trip> trips;  // trip id = index; trips[0] is the empty trip
  std::vector<std::vector<Admissible>> per_vehicle;  // sorted by trip id
  std::vector<std::vector<int>> per_request;         // request index -> trip ids
  std::vector<int> vehicle_ids;
  std::vector<int> request_ids;
  /// Trip size at which generation was cut off by the timeout, if it was.
  std::optional<int> truncated_at_size;

  /// Trip id for a given request set, or -1 if absent.
  int trip_id(const Trip& t) const;
  /// Cost of an admissible (trip, vehicle-index) pair; throws
  /// std::out_of_range naming the pair if inadmissible.
  double cost(int trip, int vehicle_index) const;
  bool admissible(int trip, int vehicle_index) const;

  int request_index(int request_id) const;
  int vehicle_index(int vehicle_id) const;

  /// Rebuilds per_request and the trip id lookup from `trips`/`per_vehicle`.
  void reindex();

 private:
  std::map<std::vector<int>, int> trip_lookup_;
};

struct QoS {
  double max_wait = 0.0;
  double max_delay = 0.0;
};

struct Instance {
  std::vector<Request> requests;
  std::vector<Vehicle> vehicles;
  Metric metric;
  double speed = 1.0;  // kilometers per second
  QoS qos;
  std::optional<TripCatalog> trips;  // precomputed catalog, if any

  double travel_time(const Point& a, const Point& b) const {
    return metric.distance(a, b) / speed;
  }
  double direct_distance(const Request& r) const {
    return metric.distance(r.origin, r.destination);
  }
  /// Latest dropoff for a request under this instance's metric and speed.
  double latest_dropoff(const Request& r) const {
    return r.request_time + travel_time(r.origin, r.destination) + r.max_delay;
  }

  int request_index(int request_id) const;
  int vehicle_index(int vehicle_id) const;
  const Request& request_by_id(int request_id) const {
    return requests[request_index(request_id)];
  }
  const Vehicle& vehicle_by_id(int vehicle_id) const {
    return vehicles[vehicle_index(vehicle_id)];
  }
};

/// Sparse LP point: values keyed by (vehicle id, trip id); absent means 0.
/// Keyed vehicle-first so iteration enumerates each vehicle's trips in
/// ascending trip id, the order the rounding procedures rely on.
struct FractionalSolution {
  std::map<std::pair<int, int>, double> values;  // (vehicle id, trip id) -> x
  double objective = 0.0;

  double value(int vehicle_id, int trip_id) const {
    auto it = values.find({vehicle_id, trip_id});
    return it == values.end() ? 0.0 : it->second;
  }
  void set(int vehicle_id, int trip_id, double v) {
    values[{vehicle_id, trip_id}] = v;
  }
};

/// One trip per vehicle (empty trip by default). `cost` is the catalog sum;
/// `unassigned` lists requests covered by no chosen trip.
struct Assignment {
  std::vector<int> trip_by_vehicle;  // vehicle index -> trip id
  double cost = 0.0;
  std::vector<int> unassigned;  // request ids, sorted
};

struct DualSolution {
  std::vector<double> y;  // per request index
  std::vector<double> z;  // per vehicle index

  double objective() const;
  /// c_tv - sum_{r in t} y_r + z_v for a catalog pair.
  double reduced_cost(const TripCatalog& cat, int trip, int vehicle_index) const;
};

/// Validation report entry for validate_catalog. `request` is -1 for
/// violations that do not involve a specific request (missing empty trip).
struct CatalogViolation {
  enum class Kind { MissingEmptyTrip, ClosureViolation, MonotonicityViolation };
  Kind kind;
  int trip = -1;
  int vehicle_index = -1;
  int request = -1;
  std::string describe() const;
};

/// Empty result iff downward closure, cost monotonicity, and empty-trip
/// membership all hold. Violations are data, not errors.
std::vector<CatalogViolation> validate_catalog(const TripCatalog& cat);

/// Sum of catalog costs of the chosen pairs. Throws std::out_of_range for
/// an inadmissible pair.
double assignment_cost(const Assignment& a, const TripCatalog& cat);

/// Recomputes `unassigned` and `cost` of an assignment from the catalog.
Assignment finalize_assignment(std::vector<int> trip_by_vehicle,
                               const TripCatalog& cat);

/// Thrown by loaders/validators; `field` names the offending field.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Checks every type invariant of an instance; throws ValidationError.
void validate_instance(const Instance& inst);

}  // namespace rtv
