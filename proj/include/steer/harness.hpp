#pragma once

#include "steer/benchmarks.hpp"
#include "steer/learners.hpp"
#include "steer/mediator.hpp"
#include "steer/schedule.hpp"
#include "steer/steering.hpp"

#include <optional>
#include <string>
#include <vector>

namespace steer {

enum class Algorithm { kNone, kNormalForm, kFullFeedback, kTrajectory, kComputeThenSteer, kOnline, kNfOnline };
Algorithm parse_algorithm(std::string_view tag);
std::string to_string(Algorithm a);

enum class AlphaSource { kFixed, kDynamic, kTheorem };

// INI schema (every key optional unless marked):
//   [game]     tag (required), n, rows, cols, shots, ship_value, loss_multiplier,
//              horizon, start1, start2, max_load, max_bribe, bribe_rounds,
//              item_value, penalty, compensation
//   [steering] algorithm (required), T (required), burn_in, target, profile,
//              objective, P, P_mult, alpha_mode, alpha, alpha_base, alpha_cap,
//              window, schedule_mode, budget, lambda, inner_scheme
//   [learner]  tag, eta, epsilon, linear_averaging
//   [bce]      iterations, check_every, tolerance, value_tolerance, lambda0
//   [run]      seed, output, player_csv
struct ExperimentConfig {
  BenchmarkSpec game;
  std::string game_text = "stag_hunt";

  Algorithm algorithm = Algorithm::kTrajectory;
  int T = 0;
  int burn_in = 10;
  std::string target = "canonical";  // canonical | profile | bce
  std::vector<std::vector<int>> profile;  // per player: action per infoset
  Objective objective;

  std::optional<double> P;       // explicit cap
  std::optional<double> P_mult;  // cap = P_mult × reward range
  AlphaSource alpha_mode = AlphaSource::kFixed;
  double alpha = 0.0;
  double alpha_base = 0.1;
  std::optional<double> alpha_cap;  // defaults to the reward range
  int window = 50;
  ScheduleMode schedule_mode = ScheduleMode::kClamp;
  double budget = std::numeric_limits<double>::infinity();
  std::optional<double> lambda;  // online algorithms
  Scheme inner_scheme = Scheme::kTrajectory;  // compute_then_steer

  LearnerSpec learner;
  BceOptions bce;

  std::uint64_t seed = 0;
  std::string output;  // directory; empty writes nothing
  bool player_csv = true;

  std::string echo;  // effective configuration as INI text
};

// "section.key" = value, applied on top of the file before validation.
using Overrides = std::vector<std::pair<std::string, std::string>>;

// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});

// Max minus min over every stored utility of every player.
double reward_range(const GameTree& game);

struct NotCertified : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSummary {
  Algorithm algorithm = Algorithm::kNone;
  std::string game;
  int T = 0;
  std::uint64_t seed = 0;
  double P = 0.0;
  double alpha = 0.0;   // fixed or scheduled α (dynamic: the cap)
  double lambda = 0.0;  // online algorithms
  bool clamped = false;

  double final_gap = 0.0;
  std::vector<double> average_payment;  // realized, per player
  double average_welfare = 0.0;
  double baseline_welfare = 0.0;
  double final_welfare = 0.0;
  double baseline_final_welfare = 0.0;
  double average_objective = 0.0;
  double final_objective = 0.0;
  double baseline_final_objective = 0.0;
  double reference_objective = 0.0;  // target or optimal equilibrium
  std::optional<double> optimality_gap;
  std::optional<double> certified_lambda;
  std::vector<double> regret;
  // First round from which the objective stays within 1% of the reference.
  // -1 when it never settles.
  int convergence_round = -1;
  double wall_clock = 0.0;
  std::string config;

  SteeringMetrics steering;
  SteeringMetrics baseline;
};

RunSummary run(const ExperimentConfig& cfg);
// Writes rounds.csv, players.csv, baseline.csv and summary.json into `dir`.
void write_outputs(const RunSummary& s, const std::string& dir, bool player_csv = true);
std::string summary_json(const RunSummary& s, bool include_wall_clock = true);

// First round t such that every round from t on has |objective − ref| ≤
// tol·|ref|; -1 if the last round is already outside.
int convergence_round(const SteeringMetrics& m, double reference, double tol = 0.01);

// One run per value of `key`; runs execute on up to `workers` threads (0:
// hardware concurrency) and come back in input order. Each run writes into
// "<output>/<key>=<value>" when an output directory is set.
std::vector<RunSummary> sweep(const std::string& config_text, const Overrides& overrides,
                              const std::string& key, const std::vector<std::string>& values,
                              unsigned workers = 0);

}  // namespace steer
