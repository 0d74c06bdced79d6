#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rtv/json_io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBin = RTV_BIN;

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run(const std::string& args) {
  const std::string out_path =
      (fs::temp_directory_path() / "rtv_cli_out.txt").string();
  const std::string cmd = kBin + " " + args + " > " + out_path + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  res.stdout_text = rtv::read_text_file(out_path);
  return res;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("gen + solve reproduce the k=2 gap instance values") {
  const fs::path dir = fresh_dir("rtv_gap2");
  CHECK(run("gen --family gap --k 2 --out " + dir.string()).exit_code == 0);
  CHECK(fs::exists(dir / "instance.json"));
  CHECK(fs::exists(dir / "catalog.json"));

  auto lp = run("solve --in " + dir.string() + " --method lp --out " +
                (dir / "x.json").string());
  CHECK(lp.exit_code == 0);
  CHECK(lp.stdout_text.find("objective=1.5") != std::string::npos);

  auto ilp = run("solve --in " + dir.string() + " --method ilp --out " +
                 (dir / "sol.json").string());
  CHECK(ilp.exit_code == 0);
  CHECK(ilp.stdout_text.find("objective=2") != std::string::npos);

  auto cg = run("solve --in " + dir.string() + " --method colgen --out " +
                (dir / "cg.json").string());
  CHECK(cg.exit_code == 0);
  CHECK(cg.stdout_text.find("objective=1.5") != std::string::npos);
  CHECK(fs::exists(dir / "cg.json.log.csv"));
}

TEST_CASE("round command is seed-reproducible") {
  const fs::path dir = fresh_dir("rtv_tight2");
  REQUIRE(run("gen --family tightness --k 2 --out " + dir.string()).exit_code ==
          0);
  REQUIRE(fs::exists(dir / "x.json"));
  const std::string base = "round --in " + dir.string() + " --x " +
                           (dir / "x.json").string() +
                           " --method rand --trials 20000 --seed 5 --jobs 2";
  CHECK(run(base + " --out " + (dir / "s1.json").string()).exit_code == 0);
  CHECK(run(base + " --out " + (dir / "s2.json").string()).exit_code == 0);
  const std::string a = rtv::read_text_file((dir / "s1.json").string());
  CHECK(a == rtv::read_text_file((dir / "s2.json").string()));
  CHECK(a.find("\"rng_algorithm\": \"splitmix64\"") != std::string::npos);
  // The k=2 tightness point leaves each request unassigned w.p. 1/4.
  const auto pos = a.find("\"unassigned_fraction_mean\": ");
  REQUIRE(pos != std::string::npos);
  const double mean = std::stod(a.substr(pos + 29));
  CHECK(std::abs(mean - 0.25) <= 3.0 * std::sqrt(0.25 * 0.75 / 20000.0));
}

TEST_CASE("round rejects an invalid fractional solution") {
  const fs::path dir = fresh_dir("rtv_badx");
  REQUIRE(run("gen --family gap --k 2 --out " + dir.string()).exit_code == 0);
  rtv::write_text_file(
      (dir / "bad.json").string(),
      "{\"objective\": 1.0, \"values\": [{\"vehicle\": 0, \"trip\": 1, "
      "\"value\": 0.4}]}");
  const auto res = run("round --in " + dir.string() + " --x " +
                       (dir / "bad.json").string() + " --method rand");
  CHECK(res.exit_code == 2);
}

TEST_CASE("gen random with zero requests still solves") {
  const fs::path dir = fresh_dir("rtv_rand0");
  CHECK(run("gen --family random --requests 0 --vehicles 2 --seed 3 --out " +
            dir.string())
            .exit_code == 0);
  const auto res = run("solve --in " + dir.string() + " --method lp");
  CHECK(res.exit_code == 0);
  CHECK(res.stdout_text.find("objective=0") != std::string::npos);
}

TEST_CASE("gen is deterministic per seed") {
  const fs::path d1 = fresh_dir("rtv_seedA");
  const fs::path d2 = fresh_dir("rtv_seedB");
  REQUIRE(run("gen --family random --requests 5 --vehicles 2 --seed 11 --out " +
              d1.string())
              .exit_code == 0);
  REQUIRE(run("gen --family random --requests 5 --vehicles 2 --seed 11 --out " +
              d2.string())
              .exit_code == 0);
  CHECK(rtv::read_text_file((d1 / "instance.json").string()) ==
        rtv::read_text_file((d2 / "instance.json").string()));
}

TEST_CASE("infeasible instances exit with code 3") {
  const fs::path dir = fresh_dir("rtv_infeas");
  // One request no vehicle can reach in time.
  rtv::write_text_file(
      (dir / "instance.json").string(),
      R"({"metric": "euclidean", "speed": 0.01,
          "qos": {"max_wait": 1, "max_delay": 1},
          "requests": [{"id": 0, "origin": [0,0], "destination": [1,0],
                        "request_time": 0, "max_wait": 1, "max_delay": 1,
                        "penalty": 0}],
          "vehicles": [{"id": 0, "position": [50,50], "available_time": 0,
                        "capacity": 2, "onboard": []}]})");
  const auto res =
      run("solve --in " + (dir / "instance.json").string() + " --method ilp");
  CHECK(res.exit_code == 3);
}

TEST_CASE("io failures exit with code 1") {
  CHECK(run("solve --in /nonexistent/instance.json --method lp").exit_code ==
        1);
}

TEST_CASE("validation failures exit with code 2") {
  const fs::path dir = fresh_dir("rtv_badfile");
  rtv::write_text_file(
      (dir / "instance.json").string(),
      R"({"metric": "euclidean", "speed": 0.01,
          "qos": {"max_wait": 10, "max_delay": 10},
          "requests": [{"id": 0, "origin": [0,0], "destination": [1,0],
                        "request_time": 0, "max_wait": -5, "max_delay": 1,
                        "penalty": 0}],
          "vehicles": []})");
  const auto res =
      run("solve --in " + (dir / "instance.json").string() + " --method lp");
  CHECK(res.exit_code == 2);

  CHECK(run("solve --method lp").exit_code == 2);          // missing --in
  CHECK(run("gen --family nope --out /tmp/x").exit_code == 2);
}

TEST_CASE("simulate writes byte-identical deterministic reports") {
  const fs::path dir = fresh_dir("rtv_sim");
  rtv::write_text_file((dir / "config.json").string(), R"({
    "arrival_rate": 0.1, "horizon_rounds": 5, "batch_interval": 30,
    "fleet_size": 3, "capacity": 2, "region_size_km": 3, "speed": 0.01,
    "qos": {"max_wait": 300, "max_delay": 600},
    "methods": ["ilp", "lp+det"], "seed": 9, "timing": false})");
  const std::string cmd = "simulate --config " + (dir / "config.json").string();
  REQUIRE(run(cmd + " --out " + (dir / "r1").string()).exit_code == 0);
  REQUIRE(run(cmd + " --out " + (dir / "r2").string()).exit_code == 0);
  CHECK(rtv::read_text_file((dir / "r1/rounds.csv").string()) ==
        rtv::read_text_file((dir / "r2/rounds.csv").string()));
  CHECK(rtv::read_text_file((dir / "r1/aggregate.json").string()) ==
        rtv::read_text_file((dir / "r2/aggregate.json").string()));
  // Header plus 5 rounds x 2 methods.
  std::istringstream csv(rtv::read_text_file((dir / "r1/rounds.csv").string()));
  int lines = 0;
  std::string line;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 1 + 5 * 2);
}

TEST_CASE("zero-arrival simulation emits all-zero rows") {
  const fs::path dir = fresh_dir("rtv_sim0");
  rtv::write_text_file((dir / "config.json").string(), R"({
    "arrival_rate": 0, "horizon_rounds": 3, "batch_interval": 30,
    "fleet_size": 2, "capacity": 2, "region_size_km": 3, "speed": 0.01,
    "methods": ["ilp"], "seed": 1, "timing": false})");
  REQUIRE(run("simulate --config " + (dir / "config.json").string() +
              " --out " + (dir / "out").string())
              .exit_code == 0);
  std::istringstream csv(
      rtv::read_text_file((dir / "out/rounds.csv").string()));
  std::string line;
  std::getline(csv, line);  // header
  while (std::getline(csv, line))
    CHECK(line.find(",ilp,0,0,0,") != std::string::npos);
}
