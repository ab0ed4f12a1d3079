#include <doctest.h>

#include "steer/evaluation.hpp"
#include "steer/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace steer;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"(
[game]
tag = stag_hunt
[steering]
algorithm = trajectory
T = 500
)";

std::string stag_trajectory(int T, const std::string& extra = "") {
  return "[game]\ntag = stag_hunt\n[steering]\nalgorithm = trajectory\nT = " + std::to_string(T) +
         "\nP_mult = 4\nalpha_mode = dynamic\n" + extra;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(std::move(cells));
  }
  return rows;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("steer_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string error_of(const std::string& text, const Overrides& o = {}) {
  try {
    parse_config(text, o);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal config gets documented defaults") {
  const ExperimentConfig cfg = parse_config(kMinimal);
  CHECK(cfg.burn_in == 10);
  CHECK(cfg.seed == 0);
  CHECK(cfg.T == 500);
  CHECK(cfg.algorithm == Algorithm::kTrajectory);
  CHECK(cfg.learner.tag == "cfr+");
  CHECK(cfg.learner.eta == doctest::Approx(0.1));
  CHECK(cfg.learner.epsilon == doctest::Approx(0.05));
  CHECK(cfg.alpha_base == doctest::Approx(0.1));
  CHECK_FALSE(cfg.alpha_cap.has_value());
  CHECK(cfg.target == "canonical");
  CHECK(cfg.output.empty());
}

TEST_CASE("P_mult scales the reward range") {
  const GameTree g = build("stag_hunt");
  CHECK(reward_range(g) == doctest::Approx(1.0));
  ExperimentConfig cfg = parse_config(kMinimal, {{"steering.P_mult", "3"}, {"steering.T", "50"}});
  const RunSummary s = run(cfg);
  CHECK(s.P == doctest::Approx(3.0));
  for (const RoundRecord& r : s.steering.rounds) CHECK(r.cap == doctest::Approx(r.round > 10 ? 3.0 : 0.0));
}

TEST_CASE("config errors name the key") {
  CHECK(error_of(std::string(kMinimal) + "alpha_modee = dynamic\n").find("steering.alpha_modee") !=
        std::string::npos);
  CHECK(error_of(kMinimal, {{"steering.burn_in", "500"}}).find("steering.burn_in") != std::string::npos);
  CHECK(error_of(kMinimal, {{"steering.T", "ten"}}).find("steering.T") != std::string::npos);
  CHECK(error_of("[steering]\nalgorithm = nf\nT = 10\n").find("game.tag") != std::string::npos);
  CHECK(error_of("[game]\ntag = stag_hunt\n[steering]\nalgorithm = nf\n").find("steering.T") !=
        std::string::npos);
  CHECK(error_of(kMinimal, {{"extra.key", "1"}}).find("[extra]") != std::string::npos);
  CHECK(error_of(kMinimal, {{"steering.algorithm", "teleport"}}).find("steering.algorithm") !=
        std::string::npos);
  CHECK(error_of(kMinimal, {{"steering.P", "2"}, {"steering.P_mult", "2"}}).find("P_mult") !=
        std::string::npos);
  CHECK(error_of(kMinimal, {{"learner.tag", "sgd"}}).find("learner.tag") != std::string::npos);
  CHECK(error_of(kMinimal, {{"steering.target", "bce"}}).find("steering.target") != std::string::npos);
  CHECK(error_of(kMinimal, {{"run.seed", "-1"}}).find("run.seed") != std::string::npos);
}

TEST_CASE("fixed alpha above the precondition is rejected") {
  // Full feedback needs α ≤ 1/|Z|; the stag hunt has 5 terminals.
  const std::string ff = "[game]\ntag = stag_hunt\n[steering]\nalgorithm = full_feedback\nT = 100\n";
  CHECK_NOTHROW(parse_config(ff, {{"steering.alpha", "0.2"}}));
  CHECK(error_of(ff, {{"steering.alpha", "0.25"}}).find("steering.alpha") != std::string::npos);
  CHECK(error_of(kMinimal, {{"steering.alpha", "1.5"}, {"steering.P", "1"}}).find("steering.alpha") !=
        std::string::npos);
}

TEST_CASE("theorem schedule in strict mode reports a short horizon") {
  const std::string text = "[game]\ntag = stag_hunt\n[steering]\nalgorithm = full_feedback\nT = 100\n"
                           "alpha_mode = theorem\nschedule_mode = strict\n";
  CHECK_THROWS_AS(run(parse_config(text)), HorizonTooShort);
  const RunSummary s = run(parse_config(text, {{"steering.schedule_mode", "clamp"}}));
  CHECK(s.clamped);
  CHECK(s.alpha == doctest::Approx(0.2));
}

TEST_CASE("trajectory run writes T rows with a silent burn-in") {
  const fs::path dir = scratch("burnin");
  ExperimentConfig cfg = parse_config(stag_trajectory(2000), {{"run.seed", "7"}, {"run.output", dir.string()}});
  const RunSummary s = run(cfg);
  write_outputs(s, cfg.output, cfg.player_csv);

  const auto rows = csv_rows(dir / "rounds.csv");
  REQUIRE(rows.size() == 2000);
  for (std::size_t t = 0; t < rows.size(); ++t) CHECK(std::stoi(rows[t][0]) == static_cast<int>(t) + 1);
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(std::stod(rows[t][2]) == 0.0);
    CHECK(std::stod(rows[t][3]) == 0.0);
  }
  const auto players = csv_rows(dir / "players.csv");
  CHECK(players.size() == 2000 * 2);
  for (std::size_t k = 0; k < 20; ++k) CHECK(std::stod(players[k][2]) == 0.0);
  CHECK(csv_rows(dir / "baseline.csv").size() == 2000);
  CHECK(fs::exists(dir / "summary.json"));

  // Last-round welfare against the recorded final strategies.
  const GameTree g = build("stag_hunt");
  double welfare = 0.0;
  for (Player i = 0; i < 2; ++i) welfare += expected_utility(g, s.steering.last, i);
  CHECK(std::stod(rows.back()[4]) == doctest::Approx(welfare).epsilon(1e-12));

  CHECK(std::isfinite(s.final_gap));
  CHECK(std::isfinite(s.average_welfare));
  CHECK(std::isfinite(s.baseline_welfare));
  for (double p : s.average_payment) CHECK(std::isfinite(p));
  CHECK(s.seed == 7);
  CHECK(s.config.find("stag_hunt") != std::string::npos);
}

TEST_CASE("identical config reproduces identical bytes") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const fs::path& dir : {a, b}) {
    const ExperimentConfig cfg = parse_config(stag_trajectory(1000), {{"run.seed", "3"}, {"run.output", dir.string()}});
    write_outputs(run(cfg), cfg.output);
  }
  for (const char* f : {"rounds.csv", "players.csv", "baseline.csv"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const RunSummary x = run(parse_config(stag_trajectory(300)));
  const RunSummary y = run(parse_config(stag_trajectory(300)));
  CHECK(summary_json(x, false) == summary_json(y, false));

  const RunSummary other = run(parse_config(stag_trajectory(300), {{"run.seed", "4"}}));
  CHECK(summary_json(x, false) != summary_json(other, false));
}

TEST_CASE("convergence round") {
  SteeringMetrics m;
  for (int t = 1; t <= 6; ++t) {
    RoundRecord r;
    r.round = t;
    r.objective = (t == 2 || t >= 4) ? 1.0 : 0.5;
    m.rounds.push_back(r);
  }
  CHECK(convergence_round(m, 1.0) == 4);
  CHECK(convergence_round(m, 0.5) == -1);
  m.rounds.back().objective = 0.995;
  CHECK(convergence_round(m, 1.0) == 4);
  CHECK(convergence_round(m, 1.0, 0.001) == -1);
}

TEST_CASE("sweep over P_mult on the stag hunt") {
  const fs::path dir = scratch("sweep");
  const std::vector<std::string> values{"1", "2", "4", "8"};
  const auto runs = sweep(stag_trajectory(3000), {{"run.output", dir.string()}}, "steering.P_mult",
                          values, 2);
  REQUIRE(runs.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(runs[k].P == doctest::Approx(std::stod(values[k])));
    CHECK(fs::exists(dir / ("steering.P_mult=" + values[k]) / "rounds.csv"));
    CHECK(runs[k].convergence_round > 0);
  }
  for (std::size_t k = 1; k < 4; ++k) {
    CAPTURE(k);
    CHECK(runs[k].convergence_round <= runs[k - 1].convergence_round);
  }
  // Same results as running each config alone.
  const RunSummary solo = run(parse_config(stag_trajectory(3000), {{"steering.P_mult", "4"}}));
  CHECK(solo.convergence_round == runs[2].convergence_round);
  CHECK(solo.final_gap == runs[2].final_gap);

  CHECK_THROWS_AS(sweep(stag_trajectory(100), {}, "steering.P_mult", {"1", "x"}), ConfigError);
}

TEST_CASE("mediated algorithms") {
  const std::string cts = "[game]\ntag = stag_hunt\n[steering]\nalgorithm = compute_then_steer\n"
                          "T = 2000\nP_mult = 4\nalpha_mode = dynamic\n[bce]\niterations = 2000\n";
  const RunSummary s = run(parse_config(cts));
  REQUIRE(s.optimality_gap.has_value());
  CHECK(s.reference_objective == doctest::Approx(11.0 / 16.0).epsilon(1e-3));
  CHECK(s.certified_lambda.has_value());
  CHECK(s.final_objective == doctest::Approx(s.reference_objective).epsilon(0.01));

  // One self-play round cannot certify anything.
  CHECK_THROWS_AS(run(parse_config(cts, {{"bce.iterations", "1"}, {"bce.check_every", "1"},
                                         {"bce.lambda0", "0.01"}})),
                  NotCertified);

  const std::string online = "[game]\ntag = stag_hunt\n[steering]\nalgorithm = online\nT = 3000\n"
                             "alpha = 0.01\nlambda = 4\n[bce]\niterations = 2000\n";
  const RunSummary o = run(parse_config(online));
  REQUIRE(o.optimality_gap.has_value());
  CHECK(*o.optimality_gap < 0.1);
  CHECK(o.lambda == doctest::Approx(4.0));
}

TEST_CASE("explicit target profile") {
  const std::string text = "[game]\ntag = stag_hunt\n[steering]\nalgorithm = full_feedback\nT = 1500\n"
                           "alpha = 0.1\ntarget = profile\nprofile = 1;1\n";
  const RunSummary s = run(parse_config(text));
  CHECK(s.final_gap < 0.3);
  CHECK(error_of(text, {{"steering.profile", "1"}}).empty());  // parse succeeds; run checks shape
  CHECK_THROWS_AS(run(parse_config(text, {{"steering.profile", "1"}})), ConfigError);
  CHECK(error_of(text, {{"steering.profile", "1,a;0"}}).find("steering.profile") != std::string::npos);
}
