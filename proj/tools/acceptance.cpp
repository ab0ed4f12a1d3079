// Acceptance run: prints PASS/FAIL per criterion with the measured numbers.
// Exit status is nonzero when a criterion fails that is not on the known list
// below; known failures are printed as FAIL together with the reason.

#include "oracles.hpp"
#include "steer/adversary.hpp"
#include "steer/benchmarks.hpp"
#include "steer/evaluation.hpp"
#include "steer/harness.hpp"
#include "steer/mediator.hpp"
#include "steer/payments.hpp"
#include "steer/schedule.hpp"
#include "steer/sequence_form.hpp"
#include "steer/steering.hpp"

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

using namespace steer;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Report {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(fmt::format("{} {}", ok ? "ok  " : "BAD ", what));
  }
  void note(const std::string& what) { lines.push_back("     " + what); }
};

// Runs that criterion 11 repeats; first-run CSV bytes are kept here.
struct Replay {
  std::string name;
  std::function<std::string()> produce;
  std::string first;
};
std::vector<Replay> g_replays;

fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / "steer_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string csv_bytes(const SteeringMetrics& m) {
  const fs::path a = scratch_dir() / "rounds.csv", b = scratch_dir() / "players.csv";
  write_round_csv(m, a.string());
  write_player_csv(m, b.string());
  return slurp(a) + slurp(b);
}

// Runs `produce` once, records its CSV, and returns its metrics.
SteeringMetrics recorded(const std::string& name, std::function<SteeringMetrics()> produce) {
  SteeringMetrics m = produce();
  g_replays.push_back({name, [produce] { return csv_bytes(produce()); }, csv_bytes(m)});
  return m;
}

Profile first_action_profile(const GameTree& g) {
  Profile d;
  for (Player p = 0; p < g.num_players(); ++p)
    d.push_back(pure_strategy(g, p, std::vector<int>(g.player_infosets(p).size(), 0)));
  return d;
}

Profile random_profile(const GameTree& g, Rng& rng) {
  Profile x;
  for (Player p = 0; p < g.num_players(); ++p) x.push_back(random_strategy(g, p, rng));
  return x;
}

std::vector<int> all_players(const GameTree& g) {
  std::vector<int> v(g.num_players());
  for (int p = 0; p < g.num_players(); ++p) v[p] = p;
  return v;
}

// ------------------------------------------------------------------ 1

Report oracle_equivalence() {
  Report r;
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const std::string& tag : benchmark_tags()) {
    const GameTree g = build(tag);
    bool small = true;
    for (Player p = 0; p < g.num_players(); ++p) small = small && count_pure_strategies(g, p) <= 64;
    if (!small) continue;
    const Target target(g, first_action_profile(g), false);
    const Vector dn = oracle::reach(g, oracle::behavior_from_profile(g, target.profile()), all_players(g));
    Rng rng = make_stream(1, tag);
    double err = 0.0;
    std::vector<Vector> history;
    Vector brute_sum = Vector::Zero(g.num_terminals());
    const int trials = 200;
    for (int k = 0; k < trials; ++k) {
      const Profile x = random_profile(g, rng);
      const auto beh = oracle::behavior_from_profile(g, x);
      const Vector dist = oracle::distribution(g, beh);
      err = std::max(err, (terminal_distribution(g, x) - dist).lpNorm<Eigen::Infinity>());
      for (Player i = 0; i < g.num_players(); ++i) {
        err = std::max(err, std::abs(expected_utility(g, x, i) - dist.dot(g.utility_vector(i))));
        const BestResponse br = best_response(g, x, i);
        err = std::max(err, std::abs(br.value - oracle::best_value(g, beh, i, g.utility_vector(i))));
        Profile y = x;
        y[i] = br.strategy;
        err = std::max(err, std::abs(expected_utility(g, y, i) - br.value));
      }
      history.push_back(reach_products(g, x));
      brute_sum += oracle::reach(g, beh, all_players(g));
    }
    const double brute_gap = (brute_sum / trials - dn).lpNorm<1>();
    err = std::max(err, std::abs(directness_gap(history, target.reach()) - brute_gap));
    r.note(fmt::format("{:<16} players={} |Z|={:<4} max error {:.2e}", tag, g.num_players(),
                       g.num_terminals(), err));
    worst = std::max(worst, err);
  }
  const double secs = seconds_since(t0);
  r.check(worst <= 1e-9, fmt::format("max deviation from enumeration {:.2e} <= 1e-9", worst));
  r.check(secs < 10, fmt::format("runtime {:.2f} s < 10 s", secs));
  return r;
}

// ------------------------------------------------------------------ 2

Report payment_suite() {
  Report r;
  const double a_nf = 0.3, a_tr = 0.4, P = 2.5;
  for (const std::string& tag : benchmark_tags()) {
    const GameTree g = build(tag);
    const Target t(g, first_action_profile(g), false);
    const double a_ff = 1.0 / g.num_terminals();
    const bool nf = is_normal_form(g);
    std::vector<Vector> qvec;
    for (Player i = 0; i < g.num_players(); ++i) qvec.push_back(traj_payment_vector(t, i, a_tr, P));
    Rng rng = make_stream(2, tag);
    double neg = 0.0, over = 0.0, lin = 0.0, expect = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const Profile x = random_profile(g, rng);
      const Profile y = random_profile(g, rng);
      const double theta = uniform01(rng);
      const Vector dist = oracle::distribution(g, oracle::behavior_from_profile(g, x));
      for (Player i = 0; i < g.num_players(); ++i) {
        Profile mix = x, other = x;
        mix[i] = theta * x[i] + (1 - theta) * y[i];
        other[i] = y[i];
        auto check = [&](auto pay, double cap) {
          const double px = pay(x), po = pay(other), pm = pay(mix);
          neg = std::max(neg, -px);
          over = std::max(over, px - cap);
          lin = std::max(lin, std::abs(pm - (theta * px + (1 - theta) * po)));
        };
        check([&](const Profile& z) { return ff_payment(t, z, i, a_ff); }, 3.0);
        check([&](const Profile& z) { return traj_expected_payment(t, z, i, a_tr, P); }, P);
        if (nf) check([&](const Profile& z) { return nf_payment(t, z, i, a_nf); }, 1 + a_nf);
        expect = std::max(expect, std::abs(traj_expected_payment(t, x, i, a_tr, P) - dist.dot(qvec[i])));
      }
    }
    const bool ok = neg <= 1e-9 && over <= 1e-9 && lin <= 1e-9 && expect <= 1e-9;
    r.check(ok, fmt::format("{:<16} negativity {:.1e} cap excess {:.1e} linearity {:.1e} "
                            "expectation {:.1e}{}",
                            tag, std::max(neg, 0.0), std::max(over, 0.0), lin, expect,
                            nf ? "" : " (nf payment n/a)"));
  }
  return r;
}

// ------------------------------------------------------------------ 3

Report obedience_union() {
  Report r;
  for (const std::string& tag : benchmark_tags()) {
    const GameTree g = build(tag);
    if (g.num_terminals() > 8) continue;
    const int n = g.num_players();
    Profile d;
    for (Player p = 0; p < n; ++p)
      d.push_back(pure_strategy(g, p, std::vector<int>(g.player_infosets(p).size(), 1)));
    const Target t(g, d, false);
    const auto bd = oracle::behavior_from_profile(g, d);
    Rng rng = make_stream(3, tag);
    double slack = 1e300;
    for (int trial = 0; trial < 1000; ++trial) {
      const int len = 1 + static_cast<int>(uniform01(rng) * 20);
      std::vector<oracle::Behavior> hist;
      Profile avg;
      for (Player p = 0; p < n; ++p) avg.push_back(Vector::Zero(g.num_sequences(p)));
      for (int s = 0; s < len; ++s) {
        const Profile x = random_profile(g, rng);
        for (Player p = 0; p < n; ++p) avg[p] += x[p] / len;
        hist.push_back(oracle::behavior_from_profile(g, x));
      }
      double delta = 0.0;
      for (Player p = 0; p < n; ++p) delta += t.relevant(p).dot(d[p] - avg[p]);
      for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> N;
        for (int p = 0; p < n; ++p)
          if (mask >> p & 1) N.push_back(p);
        const Vector dn = oracle::reach(g, bd, N);
        double lhs = 0.0;
        for (const auto& b : hist) lhs += (oracle::reach(g, b, N) - dn).lpNorm<1>() / len;
        slack = std::min(slack, g.num_terminals() * delta - lhs);
      }
    }
    r.check(slack >= -1e-9, fmt::format("{:<16} |Z|={} min slack |Z|δ - lhs = {:.3e}", tag,
                                        g.num_terminals(), slack));
  }
  return r;
}

// ------------------------------------------------------------------ 4

struct NfSetup {
  BenchmarkSpec spec = parse_benchmark("coordination");
  GameTree game = build(spec);
  Target target{game, target_equilibrium(spec, game)};
  Hyperparams h;
  NfSetup() {
    const Mwu probe(game, 0, 0.1);
    const ScheduleInput in{Theorem::kNormalForm, [&](double T) { return probe.regret_bound(T, 1.0); }, {},
                           2, game.num_terminals()};
    h = schedule(in, 100000);
  }
  SteeringMetrics run() const {
    SteerConfig cfg;
    cfg.scheme = Scheme::kNormalForm;
    cfg.T = 100000;
    cfg.alpha = h.alpha;
    return run_nf_steer(target, make_learners({"mwu", 0.1}, game, h.cap), cfg, 0);
  }
};

Report normal_form_steering() {
  Report r;
  const auto t0 = Clock::now();
  const NfSetup setup;
  const Hyperparams& h = setup.h;
  const SteeringMetrics m = recorded("criterion 4", [] { return NfSetup().run(); });
  const double bound = 2 * std::sqrt(h.epsilon);
  r.note(fmt::format("ε = {:.4g}, α = {:.4g}, bound 2√ε = {:.4g}", h.epsilon, h.alpha, bound));
  r.check(m.final_gap <= bound && m.final_gap <= 0.05,
          fmt::format("directness gap {:.4g} <= min(2√ε, 0.05)", m.final_gap));
  // Direct play is paid α every round, so payments cannot drop below α.
  for (Player i = 0; i < 2; ++i)
    r.check(m.average_realized[i] <= bound,
            fmt::format("player {} average payment {:.4g} <= 2√ε (floor α = {:.4g})", i,
                        m.average_realized[i], h.alpha));
  const double secs = seconds_since(t0);
  r.check(secs < 30, fmt::format("runtime {:.2f} s < 30 s", secs));
  return r;
}

// ------------------------------------------------------------------ 5, 6

RegretBound cfr_bound(const GameTree& g) {
  double c = 0.0;
  for (Player p = 0; p < g.num_players(); ++p) c = std::max(c, CfrPlus(g, p).regret_bound(1, 1));
  return [c](double T) { return c * std::sqrt(T); };
}

// Stag hunt steered under a theorem schedule with CFR+ players.
struct StagSetup {
  BenchmarkSpec spec = parse_benchmark("stag_hunt");
  GameTree game = build(spec);
  Target target{game, target_equilibrium(spec, game)};
  Hyperparams h;
  Scheme scheme;

  explicit StagSetup(Scheme s) : scheme(s) {
    const Theorem th = s == Scheme::kFullFeedback ? Theorem::kFullFeedback : Theorem::kTrajectory;
    const ScheduleInput in{th, cfr_bound(game), {}, 2, game.num_terminals()};
    h = schedule(in, 10000, ScheduleMode::kClamp);
  }
  SteeringMetrics run() const {
    SteerConfig cfg;
    cfg.scheme = scheme;
    cfg.T = 10000;
    cfg.alpha = h.alpha;
    if (scheme == Scheme::kTrajectory) {
      cfg.cap = h.cap;
      return run_trajectory_steer(target, make_learners({"cfr+"}, game, cfg.cap), cfg, 0);
    }
    return run_full_feedback_steer(target, make_learners({"cfr+"}, game, 3.0), cfg, 0);
  }
};

Report full_feedback_steering() {
  Report r;
  const auto t0 = Clock::now();
  const StagSetup setup(Scheme::kFullFeedback);
  const GameTree& g = setup.game;
  const Hyperparams& h = setup.h;
  const int Z = g.num_terminals();
  const SteeringMetrics m = recorded("criterion 5", [] { return StagSetup(Scheme::kFullFeedback).run(); });
  const double bound = 3 * Z * std::sqrt(h.epsilon);
  double target_welfare = 0.0;
  for (Player i = 0; i < 2; ++i) target_welfare += expected_utility(g, setup.target.profile(), i);
  r.note(fmt::format("ε = {:.4g}, α = {:.4g}{}, bound 3|Z|√ε = {:.4g}", h.epsilon, h.alpha,
                     h.clamped ? " (clamped to 1/|Z|)" : "", bound));
  r.check(m.final_gap <= bound, fmt::format("directness gap {:.4g} <= bound", m.final_gap));
  for (Player i = 0; i < 2; ++i)
    r.check(m.average_realized[i] <= bound,
            fmt::format("player {} average payment {:.4g} <= bound", i, m.average_realized[i]));
  const double w = m.rounds.back().welfare;
  r.check(std::abs(w - target_welfare) <= 0.02,
          fmt::format("welfare at round {} is {:.4f}, target {:.4f}", m.rounds.back().round, w,
                      target_welfare));
  const double secs = seconds_since(t0);
  r.check(secs < 60, fmt::format("runtime {:.2f} s < 60 s", secs));
  return r;
}

Report trajectory_steering() {
  Report r;
  const StagSetup setup(Scheme::kTrajectory);
  const Hyperparams& h = setup.h;
  const int Z = setup.game.num_terminals();
  const SteeringMetrics m = recorded("criterion 6", [] { return StagSetup(Scheme::kTrajectory).run(); });
  const double pay_bound = 8 * std::sqrt(Z) * std::pow(h.epsilon, 0.25);
  const double gap_bound = 2 * std::sqrt(h.epsilon);
  r.note(fmt::format("ε = {:.4g}, α = {:.4g}{}, P = {:.4g}", h.epsilon, h.alpha,
                     h.clamped ? " (clamped to 1)" : "", h.cap));
  for (Player i = 0; i < 2; ++i)
    r.check(m.average_expected[i] <= pay_bound,
            fmt::format("player {} expected payment {:.4g} <= 8|Z|^½ε^¼ = {:.4g}", i,
                        m.average_expected[i], pay_bound));
  r.check(m.final_gap <= gap_bound,
          fmt::format("directness gap {:.4g} <= 2ε^½ = {:.4g}", m.final_gap, gap_bound));
  return r;
}

// ------------------------------------------------------------------ 7

SteeringMetrics lower_bound_run(double alpha) {
  const BenchmarkSpec spec = parse_benchmark("lower_bound(3)");
  const GameTree g = build(spec);
  const Target t(g, target_equilibrium(spec, g));
  SteerConfig cfg;
  cfg.scheme = Scheme::kTrajectory;
  cfg.T = 10000;
  cfg.alpha = alpha;
  cfg.cap = 1.0;
  AdversaryPopulation pop(g, EquilibriumAdversary({std::vector<int>{0, 0, 0}, 0, false}));
  return run_steering(t, pop, cfg, 0);
}

constexpr int kBudget = 100;
constexpr int kBudgetT = 20000;

SteeringMetrics budget_run(std::vector<std::vector<int>>* history) {
  const BenchmarkSpec spec = parse_benchmark("coordination");
  const GameTree g = build(spec);
  const Target t(g, target_equilibrium(spec, g));
  SteerConfig cfg;
  cfg.scheme = Scheme::kNormalForm;
  cfg.T = kBudgetT;
  cfg.alpha = 0.1;
  cfg.budget = kBudget;
  AdversaryPopulation pop(g, EquilibriumAdversary({std::vector<int>{0, 0}, kBudget * kBudget, false}));
  SteeringMetrics out = run_steering(t, pop, cfg, 0);
  if (history) *history = pop.history();
  return out;
}

Report lower_bounds() {
  Report r;
  {
    const SteeringMetrics m = recorded("criterion 7a", [] { return lower_bound_run(0.0); });
    double min_gap = 1e300;
    for (const RoundRecord& rec : m.rounds) min_gap = std::min(min_gap, rec.gap);
    r.check(min_gap >= 0.5, fmt::format("(a) lower_bound(3), P = 1, α = 0: min running gap over "
                                        "T <= 10^4 is {:.4f} >= 0.5",
                                        min_gap));
    // A directness bonus can break the bad equilibrium, but only by paying
    // at a rate that does not vanish: welfare loss plus payments per round
    // stays above 1/(4(n+1)).
    const int n = 3;
    const double optimum = n / (n + 1.0);
    const double floor = 1.0 / (4 * (n + 1));
    for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
      const SteeringMetrics a = alpha == 0.0 ? m : lower_bound_run(alpha);
      double paid = 0.0;
      for (double p : a.average_realized) paid += p;
      const double loss = optimum - a.average_welfare;
      r.check(loss + paid >= floor,
              fmt::format("(a) α = {:<4g} gap {:.3f}, welfare loss {:.4f} + payments {:.4f} >= {:.4f}", alpha,
                          a.final_gap, loss, paid, floor));
    }
  }
  {
    std::vector<std::vector<int>> history;
    const SteeringMetrics m = budget_run(&history);
    g_replays.push_back({"criterion 7b", [] { return csv_bytes(budget_run(nullptr)); }, csv_bytes(m)});
    const int B = kBudget;
    int off = 0;
    for (int k = B * B + 2 * B; k < kBudgetT; ++k) off += history[k] != std::vector<int>{0, 0};
    r.check(off == 0, fmt::format("(b) coordination, budget {}: {} of {} rounds after B²+2B leave (A,A)",
                                  B, off, kBudgetT - B * B - 2 * B));
    r.note(fmt::format("total paid {:.4g}", m.total_paid));
    for (Player i = 0; i < 2; ++i)
      r.check(m.regret[i] <= 2 * std::sqrt(double(kBudgetT)),
              fmt::format("(b) adversary {} regret {:.4g} <= 2√T = {:.4g}", i, m.regret[i],
                          2 * std::sqrt(double(kBudgetT))));
  }
  return r;
}

// ------------------------------------------------------------------ 8

Report bce_values() {
  Report r;
  struct Case {
    std::string tag;
    Objective objective;
    double expected;
    std::string unit;
  };
  const std::vector<Case> cases{
      {"stag_hunt", {}, 1.0, "normalized welfare"},
      {"lower_bound(3)", {}, 0.75, "raw welfare"},
      {"matching", {Objective::Kind::kNegativeWelfare, 0}, 0.0, "raw minimized welfare"},
  };
  for (const Case& c : cases) {
    const auto t0 = Clock::now();
    const GameTree g = build(c.tag);
    const AugmentedGame aug = augment(g);
    const BceSolution sol = solve_optimal_bce(aug, objective_vector(aug, c.objective));
    const int n = g.num_players();
    const Normalization& norm = g.normalization();
    // Objective is the mean normalized utility (or one minus it).
    const double mean = c.objective.kind == Objective::Kind::kNegativeWelfare ? 1 - sol.value : sol.value;
    const double welfare = c.unit == "normalized welfare" ? n * mean : norm.scale * n * mean + n * norm.offset;
    double benefit = 0.0;
    for (double b : sol.deviation_benefit) benefit = std::max(benefit, b);
    const double secs = seconds_since(t0);
    r.check(std::abs(welfare - c.expected) <= 1e-3,
            fmt::format("{:<15} {} {:.5f}, expected {}", c.tag, c.unit, welfare, c.expected));
    r.check(sol.certified && benefit <= 1e-4,
            fmt::format("{:<15} deviation benefit {:.2e} <= 1e-4 (λ = {:g}, duality gap {:.1e})", c.tag,
                        benefit, sol.lambda, sol.duality_gap));
    r.check(secs < 300, fmt::format("{:<15} runtime {:.2f} s < 300 s", c.tag, secs));
  }
  return r;
}

// ------------------------------------------------------------------ 9

struct OnlineSetup {
  GameTree game = build("stag_hunt");
  AugmentedGame aug = augment(game);
  Vector c = welfare_objective(aug);
  BceSolution sol = solve_optimal_bce(aug, c);
  ScheduleInput in;
  Hyperparams h;

  OnlineSetup() {
    in.theorem = Theorem::kOnline;
    in.n = aug.num_players();
    in.Z = aug.game.num_terminals();
    in.R = cfr_bound(aug.game);
    const double c0 = CfrPlus(aug.game, aug.mediator).regret_bound(1, 1);
    in.R0 = [c0](double T) { return c0 * std::sqrt(T); };
    h = schedule(in, 10000, ScheduleMode::kClamp);
  }
  MediatedMetrics run() const {
    OnlineConfig oc;
    oc.T = 10000;
    oc.alpha = h.alpha;
    oc.lambda = h.lambda;
    oc.learner = {"cfr+"};
    return online_steer(aug, c, sol.value, oc, 0);
  }
};

Report online_steering() {
  Report r;
  const OnlineSetup setup;
  const BceSolution& sol = setup.sol;
  const Hyperparams& h = setup.h;
  r.check(sol.certified, fmt::format("optimal equilibrium certified, λ̂* = {:g}, u0* = {:.5f}", sol.lambda,
                                     sol.value));
  const int n = setup.aug.num_players();
  const int Z = setup.aug.game.num_terminals();
  r.note(fmt::format("ε = {:.4g}, α = {:.4g}{}, λ = {:.4g}, |Z| = {}; unclamped horizon {:.3g}", h.epsilon,
                     h.alpha, h.clamped ? " (clamped to 1/|Z|)" : "", h.lambda, Z,
                     minimal_horizon(setup.in)));
  const MediatedMetrics mm = setup.run();
  const SteeringMetrics& m = mm.steering;
  g_replays.push_back({"criterion 9", [] { return csv_bytes(OnlineSetup().run().steering); }, csv_bytes(m)});
  const double gap = mm.optimality_gap;
  const double bound = 7 * sol.lambda * std::pow(Z, 4.0 / 3) * std::cbrt(h.epsilon);
  r.check(m.final_gap <= bound, fmt::format("directness gap {:.4g} <= 7λ̂*|Z|^{{4/3}}ε^{{1/3}} = {:.4g}",
                                            m.final_gap, bound));
  for (Player i = 0; i < n; ++i)
    r.check(m.average_realized[i] <= bound,
            fmt::format("player {} average payment {:.4g} <= bound", i, m.average_realized[i]));
  r.check(gap <= bound, fmt::format("optimality gap {:.4g} <= bound", gap));
  r.check(gap <= 0.05, fmt::format("optimality gap {:.4g} <= 0.05", gap));
  return r;
}

// ------------------------------------------------------------------ 10

std::string appendix_config(const std::string& tag, int T) {
  return fmt::format(
      "[game]\ntag = {}\n[steering]\nalgorithm = compute_then_steer\nT = {}\nburn_in = 10\n"
      "alpha_mode = dynamic\nobjective = {}\n[learner]\ntag = cfr+\n"
      "[bce]\niterations = 2000\nvalue_tolerance = 1e-3\n[run]\nseed = 7\n",
      tag, T, tag == "kuhn3" ? "player0" : "welfare");
}

Report appendix_reproduction() {
  Report r;
  const auto t0 = Clock::now();
  const int T = 1000;
  const std::vector<std::string> mults{"1", "2", "4", "8"};
  int monotone_games = 0;
  for (const std::string tag : {"kuhn3", "sheriff", "battleship", "ridesharing"}) {
    const auto g0 = Clock::now();
    const std::string text = appendix_config(tag, T);
    const auto runs = sweep(text, {}, "steering.P_mult", mults, 1);
    const RunSummary& main = runs[2];  // P_mult = 4
    g_replays.push_back({fmt::format("criterion 10 {}", tag),
                         [text] {
                           const RunSummary s = run(parse_config(text, {{"steering.P_mult", "4"}}));
                           return csv_bytes(s.steering) + csv_bytes(s.baseline);
                         },
                         csv_bytes(main.steering) + csv_bytes(main.baseline)});

    const int conv = main.convergence_round;
    r.check(conv > 0 && conv <= T - T / 5 + 1,
            fmt::format("{:<12} objective within 1% of optimum {:.5f} from round {} (final {:.5f})", tag,
                        main.reference_objective, conv, main.final_objective));
    r.check(main.baseline_final_objective < main.final_objective,
            fmt::format("{:<12} unsteered baseline ends at {:.5f} < steered {:.5f}", tag,
                        main.baseline_final_objective, main.final_objective));
    std::string rounds;
    bool monotone = true;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const int c = runs[k].convergence_round;
      rounds += fmt::format(" {}", c);
      if (k > 0) {
        const int prev = runs[k - 1].convergence_round;
        const bool up = c < 0 ? prev >= 0 : (prev >= 0 && c > prev);
        monotone = monotone && !up;
      }
    }
    monotone_games += monotone;
    r.note(fmt::format("{:<12} convergence rounds for P_mult 1,2,4,8:{}{}  ({:.1f} s)", tag, rounds,
                       monotone ? "" : " (not monotone)", seconds_since(g0)));
  }
  r.check(monotone_games >= 3,
          fmt::format("convergence round non-increasing in P_mult on {} of 4 games (need 3)", monotone_games));
  const double secs = seconds_since(t0);
  r.check(secs < 1800, fmt::format("runtime {:.1f} s < 1800 s", secs));
  return r;
}

// ------------------------------------------------------------------ 11

Report determinism() {
  Report r;
  for (const Replay& rep : g_replays) {
    const std::string again = rep.produce();
    r.check(again == rep.first, fmt::format("{:<24} {} bytes, rerun identical: {}", rep.name, rep.first.size(),
                                            again == rep.first ? "yes" : "no"));
  }
  return r;
}

}  // namespace

int main() {
  // Criteria that fail for reasons analysed outside this program.
  const std::map<int, std::string> known{
      {8, "the stated optimal values for the stag hunt and lower_bound(3) disagree with the exact "
          "optimum of the mediated game, which the test suite confirms by enumeration"},
      {10, "Sheriff has a no-payment equilibrium that already reaches the optimal welfare, so its "
           "unsteered baseline cannot end strictly lower"},
  };
  const std::vector<std::pair<std::string, std::function<Report()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"payment-scheme properties", payment_suite},
      {"obedience union bound", obedience_union},
      {"normal-form steering", normal_form_steering},
      {"full-feedback steering", full_feedback_steering},
      {"trajectory steering", trajectory_steering},
      {"lower-bound reproduction", lower_bounds},
      {"optimal equilibrium values", bce_values},
      {"online steering", online_steering},
      {"benchmark reproduction", appendix_reproduction},
      {"determinism", determinism},
  };
  int unexpected = 0, passed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    const auto t0 = Clock::now();
    Report rep;
    try {
      rep = criteria[k].second();
    } catch (const std::exception& e) {
      rep.check(false, fmt::format("exception: {}", e.what()));
    }
    const auto it = known.find(id);
    fmt::print("[{:>2}] {} {} ({:.1f} s)\n", id, rep.pass ? "PASS" : "FAIL", criteria[k].first,
               seconds_since(t0));
    for (const std::string& line : rep.lines) fmt::print("       {}\n", line);
    if (!rep.pass && it != known.end()) fmt::print("       known failure: {}\n", it->second);
    passed += rep.pass;
    if (!rep.pass && it == known.end()) ++unexpected;
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria pass; {} unexpected failure(s)\n", passed, criteria.size(), unexpected);
  return unexpected == 0 ? 0 : 1;
}
