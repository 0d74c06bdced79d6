#include <doctest.h>

#include "rtv/generators.hpp"
#include "rtv/json_io.hpp"
#include "rtv/model.hpp"
#include "rtv/tripgen.hpp"

#include <set>

using namespace rtv;

namespace {

Instance small_instance() {
  RandomInstanceParams p;
  p.n_requests = 3;
  p.n_vehicles = 2;
  p.capacity = 2;
  p.seed = 11;
  return gen_random(p);
}

}  // namespace

TEST_CASE("instance json round trip is canonical and idempotent") {
  Instance inst = small_instance();
  const std::string once = instance_to_json(inst);
  const Instance reloaded = instance_from_json(once);
  CHECK(reloaded.requests.size() == 3);
  CHECK(reloaded.vehicles.size() == 2);
  CHECK(instance_to_json(reloaded) == once);

  // With an embedded catalog.
  Instance gap = gen_gap_family(2);
  const std::string gap_once = instance_to_json(gap);
  CHECK(instance_to_json(instance_from_json(gap_once)) == gap_once);
}

TEST_CASE("loader reports invariant violations by field") {
  Instance inst = small_instance();
  inst.requests[1].max_wait = -5;
  CHECK_THROWS_WITH_AS(validate_instance(inst),
                       doctest::Contains("max_wait"), ValidationError);

  inst = small_instance();
  inst.requests[0].penalty = -1;
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);

  inst = small_instance();
  inst.vehicles[0].onboard.assign(5, {Point{0, 0}, 100.0});
  CHECK_THROWS_WITH_AS(validate_instance(inst),
                       doctest::Contains("onboard"), ValidationError);
}

TEST_CASE("explicit matrix metric validation") {
  std::vector<Point> pts = {{0, 0}, {1, 0}, {0, 1}};
  std::vector<std::vector<double>> asym = {
      {0, 1, 2}, {1.5, 0, 1}, {2, 1, 0}};
  CHECK_THROWS_WITH_AS(Metric::explicit_matrix(pts, asym),
                       doctest::Contains("symmetric"), std::invalid_argument);

  std::vector<std::vector<double>> tri = {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}};
  CHECK_THROWS_WITH_AS(Metric::explicit_matrix(pts, tri),
                       doctest::Contains("triangle"), std::invalid_argument);

  std::vector<std::vector<double>> good = {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  const Metric m = Metric::explicit_matrix(pts, good);
  CHECK(m.distance(pts[0], pts[2]) == 1.0);
  CHECK_THROWS_AS(m.distance(pts[0], Point{9, 9}), std::invalid_argument);
}

TEST_CASE("trips are canonical under permutation") {
  CHECK(Trip::of({3, 1, 2}) == Trip::of({2, 3, 1}));
  CHECK(Trip::of({1, 1, 2}) == Trip::of({1, 2}));
  CHECK(Trip::of({}).empty());
  CHECK(Trip::of({1, 2}).without(1) == Trip::of({2}));
}

TEST_CASE("validate_catalog flags constructed violations") {
  Instance gap = gen_gap_family(2);
  TripCatalog cat = *gap.trips;
  CHECK(validate_catalog(cat).empty());

  SUBCASE("closure violation") {
    TripCatalog broken = cat;
    // Remove {1} from vehicle 0 while keeping {1,2}: dropping request 2
    // from {1,2} now exposes the missing sub-trip.
    auto& lst = broken.per_vehicle[0];
    const int singleton = broken.trip_id(Trip::of({1}));
    const int pair12 = broken.trip_id(Trip::of({1, 2}));
    std::erase_if(lst, [&](const TripCatalog::Admissible& a) {
      return a.trip == singleton;
    });
    broken.reindex();
    const auto report = validate_catalog(broken);
    REQUIRE(!report.empty());
    bool found = false;
    for (const auto& v : report)
      if (v.kind == CatalogViolation::Kind::ClosureViolation &&
          v.vehicle_index == 0 && v.trip == pair12 && v.request == 2)
        found = true;
    CHECK(found);
  }

  SUBCASE("monotonicity violation") {
    TripCatalog broken = cat;
    const int singleton = broken.trip_id(Trip::of({1}));
    for (auto& adm : broken.per_vehicle[0])
      if (adm.trip == singleton) adm.cost = 5.0;  // pairs cost 1: 5 > 1
    const auto report = validate_catalog(broken);
    bool found = false;
    for (const auto& v : report)
      if (v.kind == CatalogViolation::Kind::MonotonicityViolation) found = true;
    CHECK(found);
  }

  SUBCASE("missing empty trip") {
    TripCatalog broken = cat;
    std::erase_if(broken.per_vehicle[1], [](const TripCatalog::Admissible& a) {
      return a.trip == 0;
    });
    const auto report = validate_catalog(broken);
    bool found = false;
    for (const auto& v : report)
      if (v.kind == CatalogViolation::Kind::MissingEmptyTrip &&
          v.vehicle_index == 1)
        found = true;
    CHECK(found);
  }
}

TEST_CASE("assignment cost sums catalog entries") {
  Instance gap = gen_gap_family(2);
  const TripCatalog& cat = *gap.trips;

  Assignment idle = finalize_assignment({0, 0}, cat);
  CHECK(idle.cost == 0.0);
  CHECK(idle.unassigned.size() == 3);

  // Two unit-cost trips covering all three requests.
  const int pair01 = cat.trip_id(Trip::of({0, 1}));
  const int single2 = cat.trip_id(Trip::of({2}));
  Assignment a = finalize_assignment({pair01, single2}, cat);
  CHECK(a.cost == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a.unassigned.empty());
  CHECK(assignment_cost(a, cat) == doctest::Approx(a.cost).epsilon(1e-12));

  Assignment bad;
  bad.trip_by_vehicle = {9999, 0};
  CHECK_THROWS_AS(assignment_cost(bad, cat), std::out_of_range);
}

TEST_CASE("single-term assignment cost") {
  TripCatalog cat;
  cat.request_ids = {0, 1, 2};
  cat.vehicle_ids = {0};
  cat.trips = {Trip(), Trip::of({0})};
  cat.per_vehicle = {{{0, 0.0}, {1, 7.25}}};
  cat.reindex();
  const Assignment a = finalize_assignment({1}, cat);
  CHECK(a.cost == 7.25);
}

TEST_CASE("full assignments are exact covers of R union V") {
  Instance gap = gen_gap_family(2);
  const TripCatalog& cat = *gap.trips;
  const int pair01 = cat.trip_id(Trip::of({0, 1}));
  const int single2 = cat.trip_id(Trip::of({2}));
  const Assignment a = finalize_assignment({pair01, single2}, cat);
  REQUIRE(a.unassigned.empty());

  // Ground set R u V with requests tagged (id, 0) and vehicles (id, 1).
  std::set<std::pair<int, int>> ground;
  for (int r : cat.request_ids) ground.insert({r, 0});
  for (int v : cat.vehicle_ids) ground.insert({v, 1});
  std::set<std::pair<int, int>> covered;
  std::size_t total = 0;
  for (std::size_t v = 0; v < a.trip_by_vehicle.size(); ++v) {
    covered.insert({cat.vehicle_ids[v], 1});
    ++total;
    for (int r : cat.trips[static_cast<std::size_t>(a.trip_by_vehicle[v])].requests()) {
      covered.insert({r, 0});
      ++total;
    }
  }
  CHECK(covered == ground);       // covers everything
  CHECK(total == ground.size());  // each element exactly once
}

TEST_CASE("fractional and assignment serialization round trips") {
  FractionalSolution x;
  x.set(0, 1, 0.5);
  x.set(0, 0, 0.5);
  x.set(1, 2, 1.0);
  x.objective = 1.5;
  const std::string text = fractional_to_json(x);
  const FractionalSolution back = fractional_from_json(text);
  CHECK(back.values == x.values);
  CHECK(back.objective == x.objective);

  Instance gap = gen_gap_family(2);
  const TripCatalog& cat = *gap.trips;
  const Assignment a =
      finalize_assignment({cat.trip_id(Trip::of({0, 1})), 0}, cat);
  const std::string sol = assignment_to_json(a, cat);
  CHECK(sol.find("\"by_vehicle\"") != std::string::npos);
  CHECK(sol.find("\"unassigned\"") != std::string::npos);
}

TEST_CASE("parse errors carry line context") {
  const std::string bad = "{\n  \"requests\": [\n  broken\n";
  try {
    instance_from_json(bad);
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}
