#pragma once

// Test-only oracles, kept independent of the implementation paths they
// check: a permutation-enumeration routing oracle and an LP optimality
// certificate (feasibility + strong duality + complementary slackness).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rtv/lp.hpp"
#include "rtv/model.hpp"
#include "rtv/routing.hpp"

namespace rtv::oracles {

struct PermutationRoute {
  bool feasible = false;
  double length = 0.0;
};

/// Exhaustive minimum over all stop permutations, with the same
/// feasibility rules as the production code (precedence, capacity,
/// deadline with 1e-9 slack).
inline PermutationRoute permutation_route(const Trip& t, const Vehicle& v,
                                          const Instance& inst) {
  const std::vector<Stop> stops = build_stops(t, v, inst);
  const int n = static_cast<int>(stops.size());
  PermutationRoute best;
  if (n == 0) {
    best.feasible = true;
    return best;
  }
  std::vector<int> pickup_of(stops.size(), -1);
  for (std::size_t i = 0; i < stops.size(); ++i) {
    if (stops[i].kind != StopKind::Dropoff) continue;
    for (std::size_t p = 0; p < stops.size(); ++p)
      if (stops[p].kind == StopKind::Pickup && stops[p].who == stops[i].who)
        pickup_of[i] = static_cast<int>(p);
  }
  std::vector<int> perm(stops.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    double length = 0.0;
    Point pos = v.position;
    int load = static_cast<int>(v.onboard.size());
    std::vector<bool> seen(stops.size(), false);
    bool ok = true;
    for (int idx : perm) {
      const Stop& s = stops[static_cast<std::size_t>(idx)];
      if (s.kind == StopKind::Dropoff &&
          !seen[static_cast<std::size_t>(pickup_of[static_cast<std::size_t>(idx)])]) {
        ok = false;
        break;
      }
      length += inst.metric.distance(pos, s.point);
      pos = s.point;
      if (v.available_time + length / inst.speed > s.deadline + 1e-9) {
        ok = false;
        break;
      }
      load += s.load_delta;
      if (load > v.capacity) {
        ok = false;
        break;
      }
      seen[static_cast<std::size_t>(idx)] = true;
    }
    if (ok && (!best.feasible || length < best.length)) {
      best.feasible = true;
      best.length = length;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Complete optimality certificate for an equality-form LP solution:
/// primal row sums, dual constraint feasibility, strong duality, and
/// complementary slackness. Any (x, y, z) passing all four is optimal, so
/// this verifies the solver without reimplementing it.
inline bool verify_lp_certificate(const StandardFormLP& lp,
                                  const LpSolution& sol, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  std::vector<double> row_sum(static_cast<std::size_t>(lp.rows()), 0.0);
  double primal_obj = 0.0;
  for (const LpColumn& c : lp.columns) {
    const double v = sol.primal.value(c.vehicle_id, c.trip_id);
    if (v < -1e-9 || v > 1.0 + 1e-9) return fail("x out of [0,1]");
    primal_obj += c.cost * v;
    for (int r : c.request_rows) row_sum[static_cast<std::size_t>(r)] += v;
    int vpos = -1;
    for (std::size_t j = 0; j < lp.vehicle_ids.size(); ++j)
      if (lp.vehicle_ids[j] == c.vehicle_id) vpos = static_cast<int>(j);
    row_sum[static_cast<std::size_t>(lp.vehicle_row(vpos))] += v;
  }
  for (int i = 0; i < lp.rows(); ++i) {
    const double s = row_sum[static_cast<std::size_t>(i)];
    const bool request_row = i < lp.n_requests();
    if (lp.form == LpForm::Equality) {
      if (std::abs(s - 1.0) > 1e-6) return fail("row sum != 1");
    } else if (request_row ? s < 1.0 - 1e-6 : s > 1.0 + 1e-6) {
      return fail("inequality row violated");
    }
  }
  // Dual feasibility and complementary slackness.
  for (const LpColumn& c : lp.columns) {
    double rc = c.cost;
    for (int r : c.request_rows) rc -= sol.dual.y[static_cast<std::size_t>(r)];
    int vpos = -1;
    for (std::size_t j = 0; j < lp.vehicle_ids.size(); ++j)
      if (lp.vehicle_ids[j] == c.vehicle_id) vpos = static_cast<int>(j);
    rc += sol.dual.z[static_cast<std::size_t>(vpos)];
    if (rc < -1e-6) return fail("dual constraint violated");
    const double v = sol.primal.value(c.vehicle_id, c.trip_id);
    if (v > 1e-7 && std::abs(rc) > 1e-6)
      return fail("complementary slackness violated");
  }
  const double dual_obj = sol.dual.objective();
  if (std::abs(primal_obj - dual_obj) > 1e-6 * (1.0 + std::abs(primal_obj)))
    return fail("strong duality gap");
  if (std::abs(primal_obj - sol.primal.objective) > 1e-9 * (1.0 + std::abs(primal_obj)))
    return fail("reported objective mismatch");
  return true;
}

/// One-sided binomial standard error at the observed estimate.
inline double binom_sigma(double p_hat, double n) {
  return std::sqrt(std::max(p_hat * (1.0 - p_hat), 1e-12) / n);
}

/// 3-sigma-style allowance for the product estimator p_hat * q_hat around
/// p*q under multinomial sampling. The first-order (delta method) variance
/// q^2 Var(p) + p^2 Var(q) + 2pq Cov(p,q) degenerates to zero when
/// p + q = 1 (two-outcome categorical), so the second-order fluctuation
/// ~ sqrt(3) pq/n and the exact O(1/n) bias E[pq_hat] - pq = -pq/n are
/// included as well.
inline double pair_product_tolerance(double p, double q, double n) {
  const double cov = -p * q / n;
  double var_lin = q * q * p * (1 - p) / n + p * p * q * (1 - q) / n +
                   2 * p * q * cov;
  var_lin = std::max(var_lin, 0.0);
  const double second_order = p * q / n;
  return 3.0 * std::sqrt(var_lin + 3.0 * second_order * second_order) +
         second_order;
}

}  // namespace rtv::oracles
