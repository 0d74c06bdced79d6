#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "rtv/batchsim.hpp"
#include "rtv/colgen.hpp"
#include "rtv/generators.hpp"
#include "rtv/json_io.hpp"
#include "rtv/lp.hpp"
#include "rtv/mip.hpp"
#include "rtv/rounding.hpp"
#include "rtv/tripgen.hpp"

namespace fs = std::filesystem;
using namespace rtv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

/// `--in` accepts an instance file or a directory holding instance.json
/// and optionally catalog.json.
Instance load_instance_arg(const std::string& in, const std::string& catalog) {
  std::string instance_path = in;
  std::string catalog_path = catalog;
  if (fs::is_directory(in)) {
    instance_path = (fs::path(in) / "instance.json").string();
    if (catalog_path.empty()) {
      const fs::path cand = fs::path(in) / "catalog.json";
      if (fs::exists(cand)) catalog_path = cand.string();
    }
  }
  Instance inst = load_instance(instance_path);
  if (!catalog_path.empty()) inst.trips = load_catalog(catalog_path, inst);
  return inst;
}

void ensure_catalog(Instance& inst, bool regenerate, int max_trip_size) {
  if (inst.trips && !regenerate) return;
  GenerateOptions opts;
  opts.max_trip_size = max_trip_size;
  inst.trips = generate_catalog(inst, opts);
}

int cmd_gen(const std::string& family, int k, int requests, int vehicles,
            int capacity, double region, std::uint64_t seed,
            const std::string& out) {
  fs::create_directories(out);
  if (family == "gap" || family == "tightness") {
    Instance inst;
    if (family == "gap") {
      inst = gen_gap_family(k);
    } else {
      TightnessFamily fam = gen_tightness_family(k);
      inst = fam.instance;
      save_fractional(fam.x, (fs::path(out) / "x.json").string());
    }
    TripCatalog cat = *inst.trips;
    inst.trips.reset();  // instance and catalog as separate files
    save_instance(inst, (fs::path(out) / "instance.json").string());
    save_catalog(cat, (fs::path(out) / "catalog.json").string());
  } else if (family == "random") {
    RandomInstanceParams p;
    p.n_requests = requests;
    p.n_vehicles = vehicles;
    p.capacity = capacity;
    p.region_km = region;
    p.seed = seed;
    save_instance(gen_random(p), (fs::path(out) / "instance.json").string());
  } else {
    std::cerr << "unknown family: " << family << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int cmd_solve(const std::string& in, const std::string& catalog,
              const std::string& method, bool penalty, bool generate_trips,
              int max_trip_size, const std::string& out,
              const std::string& dump_path) {
  Instance inst = load_instance_arg(in, catalog);
  if (penalty || method == "colgen") inst = add_dummies(inst);

  if (method == "colgen") {
    const int mts = max_trip_size > 0 ? max_trip_size : 0;
    int effective = mts;
    if (effective == 0) {
      effective = 1;
      for (const Vehicle& v : inst.vehicles)
        if (!v.is_dummy()) effective = std::max(effective, v.capacity);
    }
    const double t0 = now_ms();
    const ColgenResult res = solve_lp_by_colgen(inst, effective);
    const double ms = now_ms() - t0;
    if (res.status != ColgenStatus::Converged) {
      std::cerr << "column generation did not converge\n";
      return kExitNumerical;
    }
    std::printf("method=colgen objective=%.12g iterations=%d time_ms=%.3f\n",
                res.x.objective, res.iterations, ms);
    if (!out.empty()) {
      save_fractional(res.x, out);
      save_catalog(res.pool, out + ".catalog.json");
      write_text_file(out + ".log.csv", colgen_log_to_csv(res.log));
    }
    return kExitOk;
  }

  ensure_catalog(inst, generate_trips, max_trip_size);
  const TripCatalog& cat = *inst.trips;
  const StandardFormLP lp = build_lp(cat, inst);
  if (!dump_path.empty()) {
    std::ofstream os(dump_path);
    dump_lp(lp, os);
  }

  if (method == "lp") {
    const double t0 = now_ms();
    const LpSolution sol = solve_lp(lp);
    const double ms = now_ms() - t0;
    if (sol.status == LpStatus::Infeasible) {
      std::cerr << "LP infeasible\n";
      return kExitInfeasible;
    }
    if (sol.status != LpStatus::Optimal) {
      std::cerr << "LP numerical failure\n";
      return kExitNumerical;
    }
    const SupportHistogram h = support_histogram(sol.primal, 10);
    std::printf(
        "method=lp objective=%.12g time_ms=%.3f integral_frac=%.6f "
        "half_integral_frac=%.6f\n",
        sol.primal.objective, ms, h.integral_fraction, h.half_integral_fraction);
    if (!out.empty()) save_fractional(sol.primal, out);
    return kExitOk;
  }
  if (method == "ilp") {
    const double t0 = now_ms();
    const IlpResult res = solve_ilp(lp);
    const double ms = now_ms() - t0;
    if (res.status == IlpStatus::Infeasible) {
      std::cerr << "ILP infeasible\n";
      return kExitInfeasible;
    }
    if (res.status != IlpStatus::Optimal) {
      std::cerr << "ILP did not finish\n";
      return kExitNumerical;
    }
    std::printf("method=ilp objective=%.12g time_ms=%.3f nodes=%lld\n",
                res.objective, ms, res.nodes);
    if (!out.empty())
      save_assignment(ilp_to_assignment(res, cat), cat, out);
    return kExitOk;
  }
  std::cerr << "unknown method: " << method << "\n";
  return kExitUsage;
}

int cmd_round(const std::string& in, const std::string& catalog,
              const std::string& xpath, const std::string& method,
              long long trials, std::uint64_t seed, int jobs,
              const std::string& out) {
  Instance inst = load_instance_arg(in, catalog);
  ensure_catalog(inst, false, 0);
  const TripCatalog& cat = *inst.trips;
  const FractionalSolution x = load_fractional(xpath);
  const RoundingMethod m = rounding_method_from_string(method);
  if (m != RoundingMethod::Independent) validate_fractional(x, cat);
  const RoundingTrialStats stats = run_trials(x, cat, m, trials, seed, jobs);
  const std::string text = trial_stats_to_json(stats);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& out,
                 std::optional<std::uint64_t> seed_override) {
  SimConfig cfg = load_sim_config(config_path);
  if (seed_override) cfg.seed = *seed_override;
  const SimulationReport report = run_simulation(cfg);
  fs::create_directories(out);
  write_text_file((fs::path(out) / "rounds.csv").string(),
                  rounds_to_csv(report));
  write_text_file((fs::path(out) / "aggregate.json").string(),
                  aggregate_to_json(report, cfg));
  for (const MethodAggregate& a : report.aggregates) {
    std::printf("method=%s rejected_pct=%.3f distance_km=%.3f\n",
                a.method.c_str(), a.rejected_pct, a.distance_km);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RTV assignment solver suite"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate instance files");
  std::string family, out_dir;
  int k = 2, requests = 0, vehicles = 0, capacity = 2;
  double region = 5.0;
  std::uint64_t seed = 0;
  gen->add_option("--family", family, "gap | tightness | random")->required();
  gen->add_option("--k", k, "family parameter k");
  gen->add_option("--requests", requests, "random: request count");
  gen->add_option("--vehicles", vehicles, "random: vehicle count");
  gen->add_option("--capacity", capacity, "random: vehicle capacity");
  gen->add_option("--region", region, "random: square side (km)");
  gen->add_option("--seed", seed, "random: seed");
  gen->add_option("--out", out_dir, "output directory")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "solve an instance");
  std::string in, catalog, method = "ilp", out_file, dump_path;
  bool penalty = false, generate_trips = false;
  int max_trip_size = 0;
  solve->add_option("--in", in, "instance file or directory")->required();
  solve->add_option("--catalog", catalog, "catalog file");
  solve->add_option("--method", method, "ilp | lp | colgen");
  solve->add_flag("--penalty", penalty, "add dummy vehicles (penalty mode)");
  solve->add_flag("--generate-trips", generate_trips,
                  "regenerate the trip catalog");
  solve->add_option("--max-trip-size", max_trip_size, "catalog size bound");
  solve->add_option("--out", out_file, "solution output file");
  solve->add_option("--dump-lp", dump_path, "write LP text dump");

  // round
  auto* round = app.add_subcommand("round", "rounding trials on an LP point");
  std::string xpath, rmethod = "rand", rout;
  long long trials = 1;
  std::uint64_t rseed = 0;
  int jobs = 1;
  round->add_option("--in", in, "instance file or directory")->required();
  round->add_option("--catalog", catalog, "catalog file");
  round->add_option("--x", xpath, "fractional solution file")->required();
  round->add_option("--method", rmethod, "rand | det | indep");
  round->add_option("--trials", trials, "trial count");
  round->add_option("--seed", rseed, "base seed");
  round->add_option("--jobs", jobs, "worker threads");
  round->add_option("--out", rout, "stats output file");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "multi-round batch dispatch");
  std::string config_path, sim_out;
  std::uint64_t sim_seed = 0;
  bool sim_seed_set = false;
  simulate->add_option("--config", config_path, "config JSON")->required();
  simulate->add_option("--out", sim_out, "output directory")->required();
  auto* seed_opt = simulate->add_option("--seed", sim_seed, "seed override");
  simulate->add_option("--jobs", jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen(family, k, requests, vehicles, capacity, region, seed,
                     out_dir);
    if (solve->parsed())
      return cmd_solve(in, catalog, method, penalty, generate_trips,
                       max_trip_size, out_file, dump_path);
    if (round->parsed())
      return cmd_round(in, catalog, xpath, rmethod, trials, rseed, jobs, rout);
    if (simulate->parsed()) {
      sim_seed_set = seed_opt->count() > 0;
      return cmd_simulate(config_path, sim_out,
                          sim_seed_set ? std::optional<std::uint64_t>(sim_seed)
                                       : std::nullopt);
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
