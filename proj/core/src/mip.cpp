#include "rtv/mip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <set>

namespace rtv {

namespace {

constexpr double kIntTol = 1e-6;

struct Node {
  std::vector<int> fixed_one;   // root column indices
  std::vector<int> fixed_zero;  // root column indices
  double bound = 0.0;
  long long id = 0;
};

struct SubLp {
  StandardFormLP lp;
  std::vector<int> column_map;  // sub column -> root column
  double cost_offset = 0.0;
  bool trivially_infeasible = false;
};

SubLp restrict_lp(const StandardFormLP& root, const Node& node) {
  SubLp sub;
  sub.lp.form = root.form;
  const int nr = root.n_requests();

  std::vector<bool> row_covered(static_cast<std::size_t>(root.rows()), false);
  std::set<int> zero(node.fixed_zero.begin(), node.fixed_zero.end());
  for (int j : node.fixed_one) {
    const LpColumn& c = root.columns[static_cast<std::size_t>(j)];
    sub.cost_offset += c.cost;
    for (int r : c.request_rows) {
      if (row_covered[static_cast<std::size_t>(r)]) {
        sub.trivially_infeasible = true;  // two fixed columns share a request
        return sub;
      }
      row_covered[static_cast<std::size_t>(r)] = true;
    }
    int vpos = -1;
    for (std::size_t v = 0; v < root.vehicle_ids.size(); ++v)
      if (root.vehicle_ids[v] == c.vehicle_id) vpos = static_cast<int>(v);
    const std::size_t vrow = static_cast<std::size_t>(root.vehicle_row(vpos));
    if (row_covered[vrow]) {
      sub.trivially_infeasible = true;
      return sub;
    }
    row_covered[vrow] = true;
  }

  std::vector<int> req_map(static_cast<std::size_t>(nr), -1);
  for (int r = 0; r < nr; ++r) {
    if (!row_covered[static_cast<std::size_t>(r)]) {
      req_map[static_cast<std::size_t>(r)] =
          static_cast<int>(sub.lp.request_ids.size());
      sub.lp.request_ids.push_back(root.request_ids[static_cast<std::size_t>(r)]);
    }
  }
  std::set<int> kept_vehicles;
  for (int v = 0; v < root.n_vehicles(); ++v) {
    if (!row_covered[static_cast<std::size_t>(root.vehicle_row(v))]) {
      sub.lp.vehicle_ids.push_back(root.vehicle_ids[static_cast<std::size_t>(v)]);
      kept_vehicles.insert(root.vehicle_ids[static_cast<std::size_t>(v)]);
    }
  }

  for (std::size_t j = 0; j < root.columns.size(); ++j) {
    if (zero.count(static_cast<int>(j))) continue;
    const LpColumn& c = root.columns[j];
    if (!kept_vehicles.count(c.vehicle_id)) continue;
    bool conflict = false;
    for (int r : c.request_rows)
      if (row_covered[static_cast<std::size_t>(r)]) conflict = true;
    if (conflict) continue;
    LpColumn nc;
    nc.vehicle_id = c.vehicle_id;
    nc.trip_id = c.trip_id;
    nc.cost = c.cost;
    for (int r : c.request_rows)
      nc.request_rows.push_back(req_map[static_cast<std::size_t>(r)]);
    sub.lp.columns.push_back(std::move(nc));
    sub.column_map.push_back(static_cast<int>(j));
  }
  return sub;
}

}  // namespace

IlpResult solve_ilp(const StandardFormLP& lp, const IlpOptions& opts) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto out_of_time = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count() >
           opts.time_limit_seconds;
  };

  IlpResult res;
  long long next_id = 0;

  std::map<std::pair<int, int>, double> column_cost;  // (vehicle, trip) -> c
  for (const LpColumn& c : lp.columns)
    column_cost[{c.vehicle_id, c.trip_id}] = c.cost;

  std::vector<Node> dfs_stack;
  auto cmp = [](const std::pair<double, long long>& a,
                const std::pair<double, long long>& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second > b.second;
  };
  std::priority_queue<std::pair<double, long long>,
                      std::vector<std::pair<double, long long>>, decltype(cmp)>
      best_bound(cmp);
  std::map<long long, Node> open_nodes;

  bool have_incumbent = false;
  double incumbent_cost = std::numeric_limits<double>::infinity();
  std::map<int, int> incumbent_choice;

  Node root_node;
  root_node.id = next_id++;
  dfs_stack.push_back(root_node);

  auto register_incumbent = [&](const Node& node, const FractionalSolution& x) {
    std::map<int, int> choice;
    for (int j : node.fixed_one) {
      const LpColumn& c = lp.columns[static_cast<std::size_t>(j)];
      choice[c.vehicle_id] = c.trip_id;
    }
    for (const auto& [key, v] : x.values)
      if (v > 0.5) choice[key.first] = key.second;
    // Recompute in (vehicle, trip) order so cost is independent of the
    // search path that produced the incumbent.
    double cost = 0.0;
    for (const auto& [vid, tid] : choice) cost += column_cost.at({vid, tid});
    if (!have_incumbent || cost < incumbent_cost - 1e-12) {
      have_incumbent = true;
      incumbent_cost = cost;
      incumbent_choice = std::move(choice);
    }
  };

  auto process = [&](Node node) -> bool {
    ++res.nodes;
    const SubLp sub = restrict_lp(lp, node);
    if (sub.trivially_infeasible) return true;
    const LpSolution sol = solve_lp(sub.lp);
    if (sol.status == LpStatus::NumericalFailure) return false;
    if (sol.status == LpStatus::Infeasible) return true;
    const double bound = sub.cost_offset + sol.primal.objective;
    if (node.id == 0) {
      res.root_lp_objective = bound;
      res.root_fractional = sol.primal;
    }
    if (have_incumbent && bound >= incumbent_cost - 1e-9) return true;

    // Most fractional variable; column_map is increasing, so keeping the
    // first strict minimum breaks ties by lowest root column index.
    int branch_root_col = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t sj = 0; sj < sub.lp.columns.size(); ++sj) {
      const LpColumn& c = sub.lp.columns[sj];
      const double v = sol.primal.value(c.vehicle_id, c.trip_id);
      if (v <= kIntTol || v >= 1.0 - kIntTol) continue;
      const double dist = std::abs(v - 0.5);
      if (dist < best_dist) {
        best_dist = dist;
        branch_root_col = sub.column_map[sj];
      }
    }

    if (branch_root_col < 0) {  // integral
      register_incumbent(node, sol.primal);
      return true;
    }

    Node one = node;
    one.fixed_one.push_back(branch_root_col);
    one.bound = bound;
    one.id = next_id++;
    Node zero = node;
    zero.fixed_zero.push_back(branch_root_col);
    zero.bound = bound;
    zero.id = next_id++;

    if (!have_incumbent) {
      // Depth-first dive: push fix-to-0 first so fix-to-1 pops first.
      dfs_stack.push_back(std::move(zero));
      dfs_stack.push_back(std::move(one));
    } else {
      best_bound.push({one.bound, one.id});
      open_nodes.emplace(one.id, std::move(one));
      best_bound.push({zero.bound, zero.id});
      open_nodes.emplace(zero.id, std::move(zero));
    }
    return true;
  };

  bool numerical_failure = false;
  while (!numerical_failure) {
    if (out_of_time()) break;
    Node node;
    if (!dfs_stack.empty()) {
      node = std::move(dfs_stack.back());
      dfs_stack.pop_back();
    } else if (!best_bound.empty()) {
      const auto [bound, id] = best_bound.top();
      best_bound.pop();
      auto it = open_nodes.find(id);
      node = std::move(it->second);
      open_nodes.erase(it);
      if (have_incumbent && bound >= incumbent_cost - 1e-9) continue;
    } else {
      break;
    }
    if (have_incumbent && node.id != 0 && node.bound >= incumbent_cost - 1e-9)
      continue;
    if (!process(std::move(node))) numerical_failure = true;
  }

  if (numerical_failure) {
    res.status = IlpStatus::NumericalFailure;
    return res;
  }

  const bool finished = dfs_stack.empty() && best_bound.empty();
  if (!finished) {  // time limit
    res.status = IlpStatus::TimeLimit;
    if (have_incumbent) {
      res.objective = incumbent_cost;
      res.trip_by_vehicle_id = incumbent_choice;
      double best_open = incumbent_cost;
      if (!best_bound.empty()) best_open = best_bound.top().first;
      for (const Node& n : dfs_stack) best_open = std::min(best_open, n.bound);
      res.bound_gap = incumbent_cost - best_open;
    }
    return res;
  }
  if (!have_incumbent) {
    res.status = IlpStatus::Infeasible;
    return res;
  }
  res.status = IlpStatus::Optimal;
  res.objective = incumbent_cost;
  res.trip_by_vehicle_id = incumbent_choice;
  return res;
}

Assignment ilp_to_assignment(const IlpResult& res, const TripCatalog& cat) {
  std::vector<int> choice(cat.vehicle_ids.size(), 0);
  for (const auto& [vid, tid] : res.trip_by_vehicle_id)
    choice[static_cast<std::size_t>(cat.vehicle_index(vid))] = tid;
  return finalize_assignment(std::move(choice), cat);
}

BruteForceResult brute_force_opt(const TripCatalog& cat, const Instance& inst,
                                 const BruteForceOptions& opts) {
  BruteForceResult res;
  const std::size_t nv = cat.per_vehicle.size();
  double space = 1.0;
  for (const auto& lst : cat.per_vehicle) space *= static_cast<double>(lst.size());
  if (space > 1e7)
    throw std::length_error("brute_force_opt: search space exceeds 1e7");

  const std::size_t nr = cat.request_ids.size();
  if (nr > 63)
    throw std::length_error("brute_force_opt: too many requests for bitmask");
  std::vector<std::uint64_t> trip_masks(cat.trips.size(), 0);
  for (std::size_t t = 0; t < cat.trips.size(); ++t) {
    for (int r : cat.trips[t].requests())
      trip_masks[t] |= std::uint64_t{1} << cat.request_index(r);
  }
  std::vector<double> penalty_by_index(nr, 0.0);
  for (std::size_t i = 0; i < nr; ++i)
    penalty_by_index[i] = inst.request_by_id(cat.request_ids[i]).penalty;
  double total_penalty = 0.0;
  for (double p : penalty_by_index) total_penalty += p;
  const std::uint64_t full_mask =
      nr == 0 ? 0 : (~std::uint64_t{0} >> (64 - nr));

  std::vector<int> current(nv, 0), best_choice;
  double best_cost = std::numeric_limits<double>::infinity();
  bool found = false;

  // DFS over vehicles in index order; per_vehicle lists are sorted by trip
  // id, so the first optimum found is the lexicographically smallest.
  auto rec = [&](auto&& self, std::size_t v, std::uint64_t used,
                 double cost) -> void {
    if (cost >= best_cost) return;  // costs are nonnegative
    if (v == nv) {
      double total = cost;
      if (opts.penalty_mode) {
        for (std::size_t i = 0; i < nr; ++i)
          if (!(used >> i & 1)) total += penalty_by_index[i];
      } else if (used != full_mask) {
        return;
      }
      if (total < best_cost) {
        best_cost = total;
        best_choice = current;
        found = true;
      }
      return;
    }
    for (const auto& adm : cat.per_vehicle[v]) {
      const std::uint64_t mask = trip_masks[static_cast<std::size_t>(adm.trip)];
      if (mask & used) continue;  // request covered twice
      current[v] = adm.trip;
      self(self, v + 1, used | mask, cost + adm.cost);
    }
    current[v] = 0;
  };
  rec(rec, 0, 0, 0.0);

  if (!found) return res;
  res.feasible = true;
  res.assignment = finalize_assignment(best_choice, cat);
  res.objective = res.assignment.cost;
  if (opts.penalty_mode) {
    for (int rid : res.assignment.unassigned)
      res.objective += inst.request_by_id(rid).penalty;
  }
  return res;
}

}  // namespace rtv
