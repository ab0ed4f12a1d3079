// steer: command-line experiment runner.
//   steer run <config> [--set section.key=value ...]
//   steer sweep <config> --vary steering.P_mult=1,2,4,8 [--workers N]
//   steer solve <game> [--objective welfare]
//   steer dump-game <game>
// Exit codes: 0 ok, 1 other failure, 2 config error, 3 equilibrium not certified.
// STEER_SEED and STEER_OUTPUT_DIR override run.seed and run.output.

#include "steer/benchmarks.hpp"
#include "steer/game_io.hpp"
#include "steer/harness.hpp"
#include "steer/mediator.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace steer;

namespace {

std::pair<std::string, std::string> split_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(fmt::format("'{}': expected key=value", s));
  return {s.substr(0, eq), s.substr(eq + 1)};
}

// Sweep keys may omit the section for steering keys ("P_mult").
std::string qualify(const std::string& key) {
  return key.find('.') == std::string::npos ? "steering." + key : key;
}

Overrides collect_overrides(const std::vector<std::string>& sets) {
  Overrides o;
  for (const std::string& s : sets) {
    auto [k, v] = split_assignment(s);
    o.emplace_back(k, v);
  }
  if (const char* seed = std::getenv("STEER_SEED")) o.emplace_back("run.seed", seed);
  if (const char* out = std::getenv("STEER_OUTPUT_DIR")) o.emplace_back("run.output", out);
  return o;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GameTree game_arg(const std::string& arg) {
  if (arg.ends_with(".json") && std::filesystem::exists(arg)) return load_game(arg);
  try {
    return build(arg);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("game '{}': {}", arg, e.what()));
  }
}

void print_summary(const RunSummary& s) {
  fmt::print("{} on {}: T={} seed={} P={:g} alpha={:g}\n", to_string(s.algorithm), s.game, s.T, s.seed,
             s.P, s.alpha);
  fmt::print("  final directness gap   {:.6g}\n", s.final_gap);
  std::string pay;
  for (double p : s.average_payment) pay += fmt::format(" {:.6g}", p);
  fmt::print("  average payment       {}\n", pay);
  fmt::print("  average welfare        {:.6g} (baseline {:.6g})\n", s.average_welfare, s.baseline_welfare);
  fmt::print("  final objective        {:.6g} (reference {:.6g}, baseline {:.6g})\n", s.final_objective,
             s.reference_objective, s.baseline_final_objective);
  if (s.optimality_gap) fmt::print("  optimality gap         {:.6g}\n", *s.optimality_gap);
  fmt::print("  convergence round      {}\n", s.convergence_round);
  fmt::print("  wall clock             {:.3f} s\n", s.wall_clock);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steering no-regret learners toward equilibria"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;

  auto* run_cmd = app.add_subcommand("run", "Run one experiment");
  run_cmd->add_option("config", config_path, "INI experiment file")->required();
  run_cmd->add_option("--set", sets, "Override section.key=value");

  std::string vary;
  unsigned workers = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run one experiment per value of a key");
  sweep_cmd->add_option("config", config_path, "INI experiment file")->required();
  sweep_cmd->add_option("--vary", vary, "key=v1,v2,...")->required();
  sweep_cmd->add_option("--workers", workers, "Parallel runs (0: all cores)");
  sweep_cmd->add_option("--set", sets, "Override section.key=value");

  std::string game;
  std::string objective = "welfare";
  BceOptions bce;
  std::string mu_out;
  auto* solve_cmd = app.add_subcommand("solve", "Compute an optimal equilibrium of the mediated game");
  solve_cmd->add_option("game", game, "Benchmark tag or game JSON file")->required();
  solve_cmd->add_option("--objective", objective, "welfare | neg_welfare | player<k>");
  solve_cmd->add_option("--iterations", bce.iterations, "Self-play rounds per lambda");
  solve_cmd->add_option("--tolerance", bce.tolerance, "Certified deviation benefit");
  solve_cmd->add_option("--mu-out", mu_out, "Write the mediator strategy as JSON");

  auto* dump_cmd = app.add_subcommand("dump-game", "Print a game as JSON");
  dump_cmd->add_option("game", game, "Benchmark tag or game JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      const ExperimentConfig cfg = load_config(config_path, collect_overrides(sets));
      const RunSummary s = run(cfg);
      if (!cfg.output.empty()) write_outputs(s, cfg.output, cfg.player_csv);
      print_summary(s);
    } else if (*sweep_cmd) {
      auto [key, list] = split_assignment(vary);
      std::vector<std::string> values;
      std::stringstream ss(list);
      for (std::string v; std::getline(ss, v, ',');) values.push_back(v);
      const auto runs = sweep(read_file(config_path), collect_overrides(sets), qualify(key), values, workers);
      fmt::print("{:>12} {:>12} {:>14} {:>14} {:>12}\n", key, "final_gap", "avg_payment", "final_obj",
                 "converged");
      for (std::size_t k = 0; k < runs.size(); ++k) {
        double pay = 0.0;
        for (double p : runs[k].average_payment) pay += p;
        fmt::print("{:>12} {:>12.5g} {:>14.5g} {:>14.5g} {:>12}\n", values[k], runs[k].final_gap, pay,
                   runs[k].final_objective, runs[k].convergence_round);
      }
    } else if (*solve_cmd) {
      const GameTree base = game_arg(game);
      const AugmentedGame aug = augment(base);
      const Vector c = objective_vector(aug, parse_objective(objective));
      const BceSolution sol = solve_optimal_bce(aug, c, bce);
      nlohmann::ordered_json j;
      j["game"] = base.name();
      j["objective"] = objective;
      j["value"] = sol.value;
      j["lambda"] = sol.lambda;
      j["deviation_benefit"] = sol.deviation_benefit;
      j["duality_gap"] = sol.duality_gap;
      j["certified"] = sol.certified;
      j["iterations"] = sol.iterations;
      std::cout << j.dump(2) << '\n';
      if (!mu_out.empty()) {
        std::ofstream out(mu_out);
        out << nlohmann::json(std::vector<double>(sol.mu.data(), sol.mu.data() + sol.mu.size())).dump()
            << '\n';
      }
      if (!sol.certified) {
        std::cerr << "error: deviation benefit above tolerance\n";
        return 3;
      }
    } else if (*dump_cmd) {
      std::cout << game_to_json(game_arg(game), 2) << '\n';
    }
  } catch (const NotCertified& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
