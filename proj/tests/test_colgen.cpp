#include <doctest.h>

#include "rtv/batchsim.hpp"
#include "rtv/colgen.hpp"
#include "rtv/generators.hpp"
#include "rtv/lp.hpp"
#include "rtv/rng.hpp"
#include "rtv/tripgen.hpp"

#include <cmath>

using namespace rtv;

namespace {

Instance penalty_instance(std::uint64_t seed, int requests, int vehicles,
                          int capacity) {
  RandomInstanceParams p;
  p.n_requests = requests;
  p.n_vehicles = vehicles;
  p.capacity = capacity;
  p.seed = seed;
  return add_dummies(gen_random(p));
}

}  // namespace

TEST_CASE("pricer basics") {
  SUBCASE("zero profits on an empty vehicle pick the empty trip") {
    Instance inst = penalty_instance(1, 3, 1, 2);
    std::map<int, double> y;
    for (const Request& r : inst.requests) y[r.id] = 0.0;
    const PriceResult pr = price_vehicle(inst.vehicles[0], y, inst, 2);
    CHECK(pr.trip.empty());
    CHECK(pr.value == 0.0);
  }

  SUBCASE("a single dominating request") {
    TripCatalog cat;
    cat.request_ids = {0};
    cat.vehicle_ids = {0};
    cat.trips = {Trip(), Trip::of({0})};
    cat.per_vehicle = {{{0, 0.0}, {1, 3.0}}};
    cat.reindex();
    Instance inst;
    inst.requests.push_back({0, {0, 0}, {1, 0}, 0, 100, 100, 0});
    inst.vehicles.push_back({0, {0, 0}, 0, 1, {}, std::nullopt});
    inst.metric = Metric::euclidean();
    inst.speed = 1.0;
    inst.trips = cat;
    const PriceResult pr = price_vehicle(inst.vehicles[0], {{0, 10.0}}, inst, 1);
    CHECK(pr.trip == Trip::of({0}));
    CHECK(pr.value == doctest::Approx(7.0));
    CHECK(pr.cost == doctest::Approx(3.0));
  }
}

TEST_CASE("pricer equals brute-force maximization over the full catalog") {
  for (std::uint64_t seed : {10u, 11u, 12u, 13u}) {
    RandomInstanceParams p;
    p.n_requests = 6 + static_cast<int>(seed % 3);
    p.n_vehicles = 2;
    p.capacity = 3;
    p.seed = seed;
    Instance inst = gen_random(p);
    const TripCatalog cat = generate_catalog(inst, {});

    std::map<int, double> y;
    SplitMix64 rng(seed);
    for (const Request& r : inst.requests) y[r.id] = rng.next_in(0, 3);

    for (std::size_t v = 0; v < inst.vehicles.size(); ++v) {
      const PriceResult pr = price_vehicle(inst.vehicles[v], y, inst, 3);
      double best = -1e18;
      Trip best_trip;
      for (const auto& adm : cat.per_vehicle[v]) {
        const Trip& t = cat.trips[static_cast<std::size_t>(adm.trip)];
        double val = -adm.cost;
        for (int r : t.requests()) val += y.at(r);
        if (val > best) {
          best = val;
          best_trip = t;
        }
      }
      CHECK(pr.value == doctest::Approx(best).epsilon(1e-9));
      CHECK(pr.trip == best_trip);
      // The pricer value is the profit-minus-route-cost recomputed here.
      double recomputed = -pr.cost;
      for (int r : pr.trip.requests()) recomputed += y.at(r);
      CHECK(pr.value == doctest::Approx(recomputed).epsilon(1e-12));
    }
  }
}

TEST_CASE("separation certifies optimal duals and finds forced violations") {
  Instance inst = penalty_instance(21, 5, 2, 2);
  const TripCatalog cat = generate_catalog(inst, {});
  const LpSolution sol =
      solve_lp(build_lp(cat, inst, LpForm::CoveringPacking));
  REQUIRE(sol.status == LpStatus::Optimal);

  SUBCASE("the optimal dual is certified feasible") {
    const SeparationResult res = separate_dual(sol.dual, inst, 2);
    CHECK(res.certified_feasible);
  }

  SUBCASE("inflating one y forces a violation naming that request") {
    DualSolution bumped = sol.dual;
    bumped.y[2] += 100.0;
    const SeparationResult res = separate_dual(bumped, inst, 2);
    REQUIRE_FALSE(res.certified_feasible);
    CHECK(res.trip.contains(inst.requests[2].id));
    CHECK(res.violation > 0);
  }

  SUBCASE("zero duals are certified for empty vehicles") {
    DualSolution zero;
    zero.y.assign(inst.requests.size(), 0.0);
    zero.z.assign(inst.vehicles.size(), 0.0);
    CHECK(separate_dual(zero, inst, 2).certified_feasible);
  }
}

TEST_CASE("column generation reaches the gap-family LP optimum") {
  Instance dummied = add_dummies(gen_gap_family(2));
  const ColgenResult res = solve_lp_by_colgen(dummied, 2);
  REQUIRE(res.status == ColgenStatus::Converged);
  CHECK(res.x.objective == doctest::Approx(1.5).epsilon(1e-6));

  // Master objective is non-increasing.
  for (std::size_t i = 1; i < res.log.size(); ++i)
    CHECK(res.log[i].master_objective <=
          res.log[i - 1].master_objective + 1e-9);
  CHECK(res.log.back().columns_added == 0);

  const std::string csv = colgen_log_to_csv(res.log);
  CHECK(csv.find("iteration,master_objective") != std::string::npos);
}

TEST_CASE("colgen requires penalty mode") {
  Instance gap = gen_gap_family(2);
  CHECK_THROWS_AS(solve_lp_by_colgen(gap, 2), ValidationError);
}

TEST_CASE("only empty trips and dummies: no columns added, objective sum k") {
  RandomInstanceParams p;
  p.n_requests = 3;
  p.n_vehicles = 2;
  p.capacity = 2;
  p.seed = 31;
  Instance inst = gen_random(p);
  for (Request& r : inst.requests) {
    r.max_wait = 0.0;  // unreachable by any real vehicle
    r.penalty = 4.0;
  }
  for (Vehicle& v : inst.vehicles) v.position = {40, 40};
  Instance dummied = add_dummies(inst);
  const ColgenResult res = solve_lp_by_colgen(dummied, 2);
  REQUIRE(res.status == ColgenStatus::Converged);
  CHECK(res.iterations == 1);
  CHECK(res.log.back().columns_added == 0);
  CHECK(res.x.objective == doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("colgen equals the full-catalog LP with a feasibility certificate") {
  for (std::uint64_t seed : {50u, 51u, 52u, 53u, 54u}) {
    Instance inst = penalty_instance(seed, 6, 3, 2);
    const ColgenResult res = solve_lp_by_colgen(inst, 2);
    REQUIRE(res.status == ColgenStatus::Converged);

    const TripCatalog cat = generate_catalog(inst, {});
    const LpSolution full = solve_lp(build_lp(cat, inst));
    REQUIRE(full.status == LpStatus::Optimal);
    CHECK(res.x.objective ==
          doctest::Approx(full.primal.objective).epsilon(1e-6));

    // Termination certificate: full sweep over every admissible pair.
    std::map<int, double> y;
    for (std::size_t i = 0; i < inst.requests.size(); ++i)
      y[inst.requests[i].id] = res.dual.y[i];
    for (std::size_t v = 0; v < cat.per_vehicle.size(); ++v) {
      for (const auto& adm : cat.per_vehicle[v]) {
        double lhs = -res.dual.z[v];
        for (int r :
             cat.trips[static_cast<std::size_t>(adm.trip)].requests())
          lhs += y.at(r);
        CHECK(lhs <= adm.cost + 1e-6);
      }
    }
  }
}
