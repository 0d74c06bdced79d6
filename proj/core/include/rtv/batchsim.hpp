#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtv/model.hpp"

namespace rtv {

/// Appends one dummy vehicle per request (ids after the real vehicles);
/// each may serve only the empty trip (cost 0) or its request's singleton
/// (cost = the request's penalty). If the instance carries an explicit
/// catalog it is extended accordingly. The result is always feasible.
Instance add_dummies(const Instance& inst);

enum class SolveMethod { Ilp, LpRand, LpDet };
SolveMethod solve_method_from_string(const std::string& s);
std::string to_string(SolveMethod m);

struct PenaltyConfig {
  double base_multiplier = 10.0;  // initial penalty = multiplier * direct km
  double growth = 2.0;            // factor applied per unassigned round
};

struct SimConfig {
  double arrival_rate = 0.0;  // requests per second
  int horizon_rounds = 0;
  double batch_interval = 30.0;  // seconds
  int fleet_size = 0;
  int capacity = 2;
  double region_km = 5.0;
  double speed = 0.01;  // km/s
  QoS qos{300.0, 600.0};
  PenaltyConfig penalty;
  std::vector<SolveMethod> methods{SolveMethod::Ilp};  // methods[0] drives
  std::uint64_t seed = 0;
  /// Wall-clock solve times in reports; disable for byte-identical reruns.
  bool timing = true;
  int max_trip_size = 0;  // 0 = capacity
};

SimConfig sim_config_from_json(const std::string& text);
SimConfig load_sim_config(const std::string& path);

struct CommittedStop {
  bool is_pickup = false;
  int request_id = -1;  // -1 for onboard riders carried across rounds
  Point point;
  double service_time = 0.0;
  // Pickup stops carry what the rider record needs once boarded.
  Point rider_destination;
  double rider_latest_dropoff = 0.0;
};

struct SimVehicle {
  int id = 0;
  Point position;
  double available_time = 0.0;
  int capacity = 1;
  struct Rider {
    int request_id = -1;
    Point destination;
    double latest_dropoff = 0.0;
  };
  std::vector<Rider> onboard;
  std::vector<CommittedStop> committed;  // remaining planned stops
};

struct WaitingRequest {
  Request request;  // penalty mutates as rounds pass
  int rounds_unassigned = 0;
};

/// State across batch rounds. A request is in exactly one of: waiting,
/// rejected-this-round (still queued, penalty augmented), onboard, served,
/// reneged.
struct BatchState {
  double clock = 0.0;
  std::vector<WaitingRequest> waiting;  // ascending request id
  std::vector<SimVehicle> fleet;
  std::vector<int> rejected_now;  // dummy-assigned in the latest round
  long long admitted = 0;
  long long served = 0;
  long long reneged = 0;
  double distance_traveled_km = 0.0;

  long long onboard_count() const;
  /// waiting excluding the currently rejected ones (the five-way split).
  long long waiting_count() const;
  bool conserved() const;  // waiting+rejected+onboard+served+reneged == admitted
};

BatchState init_state(const SimConfig& cfg);

struct RoundReport {
  int round = 0;
  std::string method;
  int requests = 0;  // batch size
  int rejected = 0;  // requests covered only by their dummy
  double rejected_pct = 0.0;
  double distance_km = 0.0;  // assignment cost over real vehicles
  double solve_ms = 0.0;
  double lp_integral_frac = 0.0;
  double lp_half_integral_frac = 0.0;
  bool solved = true;
};

/// One batch round: builds the instance from waiting requests and the
/// fleet, adds dummies, solves by `method`, maps uncovered requests to
/// their dummies, commits the assignment, and advances the fleet one
/// interval. Reneging and penalty growth happen here. Solver errors abort
/// the round with the state unchanged.
RoundReport run_round(BatchState& state, const SimConfig& cfg,
                      SolveMethod method, std::uint64_t seed, int round_index);

struct MethodAggregate {
  std::string method;
  long long requests = 0;
  long long rejected = 0;
  double rejected_pct = 0.0;
  double distance_km = 0.0;
  double mean_solve_ms = 0.0;
  double mean_lp_integral_frac = 0.0;
  double mean_lp_half_integral_frac = 0.0;
};

struct SimulationReport {
  std::vector<RoundReport> rounds;  // one row per (round, method)
  std::vector<MethodAggregate> aggregates;
  long long total_arrivals = 0;
  double mean_batch_size = 0.0;
  BatchState final_state;  // driver path
};

/// Synthetic day-of-operations run: Poisson arrivals, uniform endpoints.
/// Every configured method solves the identical frozen instance each
/// round; methods[0] drives the state forward.
SimulationReport run_simulation(const SimConfig& cfg);

std::string rounds_to_csv(const SimulationReport& report);
std::string aggregate_to_json(const SimulationReport& report,
                              const SimConfig& cfg);

/// Scripted carryover experiment: each round every still-unassigned
/// request faces the tightness-family rounding again, so the per-round
/// unassignment probability is exactly ((k-1)/k)^k <= 1/e. Returns, for
/// n = 1..rounds, the fraction of (replication, request) pairs still
/// unassigned after n rounds.
std::vector<double> run_scripted_carryover(int k, int rounds,
                                           int replications,
                                           std::uint64_t base_seed);

}  // namespace rtv
