#include <doctest.h>

#include "oracles.hpp"
#include "test_games.hpp"
#include "steer/benchmarks.hpp"
#include "steer/evaluation.hpp"
#include "steer/schedule.hpp"
#include "steer/sequence_form.hpp"
#include "steer/steering.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace steer;
using testgames::matrix_game;
using testgames::static_learners;

namespace {

Profile pure_profile(const GameTree& g, const std::vector<std::vector<int>>& acts) {
  Profile x;
  for (Player p = 0; p < g.num_players(); ++p) x.push_back(pure_strategy(g, p, acts[p]));
  return x;
}

Profile random_profile(const GameTree& g, Rng& rng) {
  Profile x;
  for (Player p = 0; p < g.num_players(); ++p) x.push_back(random_strategy(g, p, rng));
  return x;
}

Target canonical(const char* tag) {
  static std::vector<std::unique_ptr<GameTree>> keep;
  const auto spec = parse_benchmark(tag);
  keep.push_back(std::make_unique<GameTree>(build(spec)));
  return Target(*keep.back(), target_equilibrium(spec, *keep.back()));
}

// Eq. (4) by brute force over the tree and every full pure plan.
double ff_oracle(const GameTree& g, const Profile& d, const Profile& x, Player i, double alpha) {
  const auto bx = oracle::behavior_from_profile(g, x);
  const auto bd = oracle::behavior_from_profile(g, d);
  const Vector u = g.utility_vector(i);
  auto with_others = [&](const oracle::Behavior& mine, const oracle::Behavior& others) {
    oracle::Behavior b = others;
    b[i] = mine[i];
    return oracle::distribution(g, b).dot(u);
  };
  double bonus = 0.0;
  const auto& mask = g.relevant_sequences(i);
  for (int s = 0; s < g.num_sequences(i); ++s)
    if (mask[s]) bonus += d[i][s] * x[i][s];
  double low = 1e300;
  oracle::Behavior mine = bx;
  oracle::for_each_plan(g, i, [&](const std::vector<std::vector<double>>& rows) {
    for (int I = 0; I < g.num_infosets(); ++I)
      if (g.infoset(I).player == i) mine[i][I] = rows[I];
    low = std::min(low, with_others(mine, bd) - with_others(mine, bx));
  });
  return alpha * bonus + with_others(bx, bd) - with_others(bx, bx) - low;
}

}  // namespace

TEST_CASE("normal-form payment examples") {
  const Target t = canonical("coordination");
  const GameTree& g = t.game();
  const double alpha = 0.1;
  for (Player i = 0; i < 2; ++i) CHECK(nf_payment(t, t.profile(), i, alpha) == doctest::Approx(alpha));
  const Profile ba = pure_profile(g, {{1}, {0}});
  CHECK(nf_payment(t, ba, 0, alpha) == doctest::Approx(1.1));
  CHECK(nf_payment(t, ba, 1, alpha) == doctest::Approx(0.0));
  Profile mixed = t.profile();
  mixed[1] = uniform_strategy(g, 1);
  CHECK(nf_payment(t, mixed, 0, alpha) == doctest::Approx(alpha + 0.5));

  const GameTree k = build("kuhn3");
  Profile zero;
  for (Player p = 0; p < 3; ++p) zero.push_back(pure_strategy(k, p, std::vector<int>(k.player_infosets(p).size(), 0)));
  const Target tk(k, zero, false);
  CHECK_THROWS_AS(nf_payment(tk, zero, 0, alpha), ConfigError);
}

TEST_CASE("normal-form payments make the target dominant by alpha") {
  const double alpha = 0.05;
  const GameTree three = matrix_game(3, 3, [](const std::vector<int>& a) {
    // everyone is rewarded for matching player 0; action 2 pays extra
    std::vector<double> u;
    for (int i = 0; i < 3; ++i) u.push_back((a[i] == a[0] ? 0.5 : 0.0) + (a[i] == 2 ? 0.25 : 0.0));
    return u;
  });
  const Target t3(three, pure_profile(three, {{2}, {2}, {2}}));
  const Target t2 = canonical("coordination");
  for (const Target* tp : {&t2, &t3}) {
    const Target& t = *tp;
    const GameTree& g = t.game();
    const NormalForm nf = normal_form(g);
    std::vector<int> d;
    for (Player i = 0; i < g.num_players(); ++i) {
      const Infoset& info = g.infoset(g.player_infosets(i)[0]);
      Eigen::Index a = 0;
      t.strategy(i).segment(info.first_sequence, static_cast<Eigen::Index>(info.actions.size())).maxCoeff(&a);
      d.push_back(static_cast<int>(a));
    }
    for (int k = 0; k < nf.num_profiles(); ++k) {
      auto a = nf.profile(k);
      for (Player i = 0; i < g.num_players(); ++i) {
        auto with = a, without = a;
        with[i] = d[i];
        const Profile xw = to_profile(g, pure_mixed(nf, with));
        const double direct = nf.payoff[i][nf.index(with)] + nf_payment(t, xw, i, alpha);
        for (int b = 0; b < nf.actions[i]; ++b) {
          if (b == d[i]) continue;
          without[i] = b;
          const Profile xo = to_profile(g, pure_mixed(nf, without));
          CHECK(direct >= nf.payoff[i][nf.index(without)] + nf_payment(t, xo, i, alpha) + alpha - 1e-12);
        }
      }
    }
  }
}

TEST_CASE("full-feedback payment examples") {
  const Target t = canonical("stag_hunt");
  const GameTree& g = t.game();
  const double alpha = 0.2;
  for (Player i = 0; i < 2; ++i) {
    double ones = 0;
    for (int s = 0; s < g.num_sequences(i); ++s)
      if (g.relevant_sequences(i)[s] && t.strategy(i)[s] == 1.0) ones += 1;
    CHECK(ff_payment(t, t.profile(), i, alpha) == doctest::Approx(alpha * ones));
  }
  // P2 deviates to Hare, P1 stays direct
  Profile x = t.profile();
  x[1] = pure_strategy(g, 1, std::vector<int>{0});
  const double p1 = ff_payment(t, x, 0, alpha);
  CHECK(p1 == doctest::Approx(ff_oracle(g, t.profile(), x, 0, alpha)).epsilon(1e-12));
  CHECK(p1 > 0.0);
  CHECK(ff_payment(t, x, 1, alpha) == doctest::Approx(ff_oracle(g, t.profile(), x, 1, alpha)).epsilon(1e-12));

  // a non-equilibrium target is refused
  CHECK_THROWS_AS(Target(g, pure_profile(g, {{0}, {1}})), ConfigError);
}

TEST_CASE("full-feedback payment matches the brute-force evaluation") {
  for (const char* tag : {"stag_hunt", "lower_bound(3)", "coordination"}) {
    CAPTURE(tag);
    const Target t = canonical(tag);
    const GameTree& g = t.game();
    Rng rng = make_stream(21, tag);
    const double alpha = 1.0 / g.num_terminals();
    for (int k = 0; k < 50; ++k) {
      const Profile x = random_profile(g, rng);
      for (Player i = 0; i < g.num_players(); ++i)
        CHECK(ff_payment(t, x, i, alpha) == doctest::Approx(ff_oracle(g, t.profile(), x, i, alpha)).epsilon(1e-10));
    }
  }
}

TEST_CASE("trajectory payment cases") {
  const double alpha = 0.3, P = 2.0;
  const GameTree g = matrix_game(3, 2, [](const std::vector<int>&) { return std::vector<double>{0, 0, 0}; });
  const Target t(g, pure_profile(g, {{0}, {0}, {0}}));
  // terminals are ordered by the action triple
  CHECK(traj_payment(t, 0, 0, alpha, P) == alpha);
  CHECK(traj_payment(t, 2, 0, alpha, P) == alpha);
  const int only_p1 = 4;  // (1,0,0)
  CHECK(traj_payment(t, 0, only_p1, alpha, P) == 0.0);
  CHECK(traj_payment(t, 1, only_p1, alpha, P) == P);
  CHECK(traj_payment(t, 2, only_p1, alpha, P) == P);
  const int p1_and_p2 = 6;  // (1,1,0)
  CHECK(traj_payment(t, 0, p1_and_p2, alpha, P) == 0.0);
  CHECK(traj_payment(t, 1, p1_and_p2, alpha, P) == 0.0);
  CHECK(traj_payment(t, 2, p1_and_p2, alpha, P) == P);
}

TEST_CASE("payment properties on random profiles") {
  for (const auto& tag : benchmark_tags()) {
    CAPTURE(tag);
    const GameTree g = build(tag);
    Profile d;
    for (Player p = 0; p < g.num_players(); ++p)
      d.push_back(pure_strategy(g, p, std::vector<int>(g.player_infosets(p).size(), 0)));
    const Target t(g, d, false);
    const bool single = is_normal_form(g);
    std::vector<Vector> follow;
    const auto bd = oracle::behavior_from_profile(g, d);
    for (Player p = 0; p < g.num_players(); ++p) follow.push_back(oracle::follows(g, bd, p));

    Rng rng = make_stream(5, tag);
    const double a_ff = 1.0 / g.num_terminals(), a_nf = 0.3, a_tr = 0.4, P = 2.5;
    const int trials = g.num_terminals() > 300 ? 30 : 200;
    for (int k = 0; k < trials; ++k) {
      const Profile x = random_profile(g, rng);
      const Profile y = random_profile(g, rng);
      const double theta = uniform01(rng);
      const Vector dist = oracle::distribution(g, oracle::behavior_from_profile(g, x));
      for (Player i = 0; i < g.num_players(); ++i) {
        Profile mix = x;
        mix[i] = theta * x[i] + (1 - theta) * y[i];
        Profile other = x;
        other[i] = y[i];

        const double f = ff_payment(t, x, i, a_ff);
        CHECK(f >= -1e-12);
        CHECK(f <= 3 + 1e-12);
        CHECK(ff_payment(t, mix, i, a_ff) ==
              doctest::Approx(theta * f + (1 - theta) * ff_payment(t, other, i, a_ff)).epsilon(1e-9));

        const double q = traj_expected_payment(t, x, i, a_tr, P);
        CHECK(q >= -1e-12);
        CHECK(q <= P + 1e-12);
        CHECK(traj_expected_payment(t, mix, i, a_tr, P) ==
              doctest::Approx(theta * q + (1 - theta) * traj_expected_payment(t, other, i, a_tr, P)).epsilon(1e-9));
        double closed = 0.0;
        for (int z = 0; z < g.num_terminals(); ++z) {
          double all = 1.0;
          for (Player j = 0; j < g.num_players(); ++j) all *= follow[j][z];
          closed += dist[z] * (a_tr * all + P * follow[i][z] * (1 - all));
        }
        CHECK(q == doctest::Approx(closed).epsilon(1e-9));

        if (single) {
          const double p = nf_payment(t, x, i, a_nf);
          CHECK(p >= -1e-12);
          CHECK(p <= 1 + a_nf + 1e-12);
          CHECK(nf_payment(t, mix, i, a_nf) ==
                doctest::Approx(theta * p + (1 - theta) * nf_payment(t, other, i, a_nf)).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("obedience union bound on small games") {
  for (const char* tag : {"stag_hunt", "coordination", "matching"}) {
    CAPTURE(tag);
    const GameTree g = build(tag);
    Profile d;
    for (Player p = 0; p < g.num_players(); ++p) d.push_back(pure_strategy(g, p, std::vector<int>{1}));
    const Target t(g, d, false);
    const int n = g.num_players();
    Rng rng = make_stream(8, tag);
    for (int trial = 0; trial < 100; ++trial) {
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
      const auto bd = oracle::behavior_from_profile(g, d);
      for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> N;
        for (int p = 0; p < n; ++p)
          if (mask >> p & 1) N.push_back(p);
        const Vector dn = oracle::reach(g, bd, N);
        double lhs = 0.0;
        for (const auto& b : hist) lhs += (oracle::reach(g, b, N) - dn).lpNorm<1>() / len;
        CHECK(lhs <= g.num_terminals() * delta + 1e-9);
      }
    }
  }
}

TEST_CASE("directness gap") {
  const Target t = canonical("stag_hunt");
  const GameTree& g = t.game();
  const std::vector<Vector> same(3, t.reach());
  CHECK(directness_gap(same, t.reach()) == 0.0);
  Vector a = Vector::Zero(4), b = Vector::Zero(4);
  a[0] = 1;
  b[3] = 1;
  CHECK(directness_gap(std::vector<Vector>{a}, b) == 2.0);
  CHECK_THROWS_AS(directness_gap(std::vector<Vector>{}, b), std::invalid_argument);
  CHECK_THROWS_AS(directness_gap(std::vector<Vector>{Vector::Zero(3)}, b), std::invalid_argument);

  Rng rng = make_stream(2, "gap");
  std::vector<Vector> hist;
  Vector sum = Vector::Zero(g.num_terminals());
  for (int k = 0; k < 10; ++k) {
    const Profile x = random_profile(g, rng);
    hist.push_back(reach_products(g, x));
    sum += oracle::reach(g, oracle::behavior_from_profile(g, x), {0, 1});
  }
  double brute = 0.0;
  const Vector dn = oracle::reach(g, oracle::behavior_from_profile(g, t.profile()), {0, 1});
  for (int z = 0; z < g.num_terminals(); ++z) brute += std::abs(sum[z] / 10 - dn[z]);
  CHECK(directness_gap(hist, t.reach()) == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("dynamic alpha") {
  CHECK(dynamic_alpha(0.0, 0.1, 1.0) == 0.0);
  CHECK(dynamic_alpha(2.0, 0.1, 0.15) == 0.15);
  CHECK(dynamic_alpha(0.5, 0.1, 1.0) == doctest::Approx(0.05));
}

TEST_CASE("deviation mass") {
  const Target t = canonical("stag_hunt");
  const GameTree& g = t.game();
  Rng rng = make_stream(4, "dm");
  const Profile x = random_profile(g, rng);
  const auto bd = oracle::behavior_from_profile(g, t.profile());
  const Vector dist = oracle::distribution(g, oracle::behavior_from_profile(g, x));
  for (Player i = 0; i < 2; ++i) {
    const Vector f = oracle::follows(g, bd, i);
    CHECK(deviation_mass(t, x, i) == doctest::Approx(dist.dot(Vector::Ones(f.size()) - f)).epsilon(1e-12));
    CHECK(deviation_mass(t, t.profile(), i) == 0.0);
  }
}

TEST_CASE("schedules") {
  ScheduleInput nf{Theorem::kNormalForm, [](double T) { return 0.0008 * T; }, {}, 2, 4};
  CHECK(schedule(nf, 1e4).alpha == doctest::Approx(0.08));
  CHECK(schedule(nf, 1e4).cap == doctest::Approx(1.08));

  ScheduleInput tr{Theorem::kTrajectory, [](double T) { return 1e-4 * T; }, {}, 2, 5};
  const Hyperparams h = schedule(tr, 1e4);
  CHECK(h.alpha == doctest::Approx(4 * std::sqrt(5.0) * 0.1));
  CHECK(h.alpha == doctest::Approx(0.894).epsilon(1e-3));
  CHECK(h.cap == doctest::Approx(44.72).epsilon(1e-3));

  // α = √(4·2·R/T) = 0.3 > 1/5
  ScheduleInput ff{Theorem::kFullFeedback, [](double T) { return 0.09 / 8 * T; }, {}, 2, 5};
  CHECK_THROWS_AS(schedule(ff, 100), HorizonTooShort);
  const Hyperparams c = schedule(ff, 100, ScheduleMode::kClamp);
  CHECK(c.alpha == doctest::Approx(0.2));
  CHECK(c.clamped);
  CHECK(std::isinf(minimal_horizon(ff)));

  // R = √T: admissible iff 8/√T ≤ 1/25, i.e. T ≥ 40000
  ScheduleInput sq{Theorem::kFullFeedback, [](double T) { return std::sqrt(T); }, {}, 2, 5};
  CHECK(minimal_horizon(sq) == 40000);
  CHECK_NOTHROW(schedule(sq, 40000));
  try {
    schedule(sq, 39999);
    FAIL("expected an error");
  } catch (const HorizonTooShort& e) {
    CHECK(e.min_T == 40000);
    CHECK(std::string(e.what()).find("horizon too short") != std::string::npos);
  }

  ScheduleInput on{Theorem::kOnline, [](double T) { return std::sqrt(T); }, [](double T) { return 2 * std::sqrt(T); }, 2, 8};
  const Hyperparams o = schedule(on, 1e12);
  const double eps = (2e6 + 8e6) / 1e12;
  CHECK(o.epsilon == doctest::Approx(eps));
  CHECK(o.alpha == doctest::Approx(std::pow(eps, 2.0 / 3) / 2));
  CHECK(o.lambda == doctest::Approx(4 * std::pow(eps, -1.0 / 3)));

  ScheduleInput nfo{Theorem::kNfOnline, [](double T) { return std::sqrt(T); }, [](double T) { return std::sqrt(T); }, 2, 4, 2};
  const Hyperparams q = schedule(nfo, 1e10);
  const double e2 = 9e5 / 1e10;
  CHECK(q.alpha == doctest::Approx(std::cbrt(4.0) * std::pow(2.0, -2.0 / 3) * std::cbrt(2.0) * std::pow(e2, 2.0 / 3)));
  CHECK(q.lambda == doctest::Approx(std::cbrt(16.0) * std::pow(e2, -1.0 / 3)));

  CHECK(parse_theorem("trajectory") == Theorem::kTrajectory);
  CHECK_THROWS_AS(parse_theorem("thm9"), ConfigError);
}

TEST_CASE("direct learners: fixed point of every scheme") {
  const Target t = canonical("stag_hunt");
  const GameTree& g = t.game();
  SteerConfig cfg;
  cfg.T = 50;
  cfg.alpha = 0.2;
  cfg.cap = 3.0;
  const auto ff = run_full_feedback_steer(t, static_learners(g, t.profile()), cfg, 1);
  CHECK(ff.final_gap == 0.0);
  for (Player i = 0; i < 2; ++i) {
    double ones = t.relevant(i).sum();
    CHECK(ff.average_realized[i] == doctest::Approx(0.2 * ones));
    CHECK(ff.regret[i] <= 1e-12);
  }
  const auto tr = run_trajectory_steer(t, static_learners(g, t.profile()), cfg, 1);
  CHECK(tr.final_gap == 0.0);
  for (const auto& r : tr.rounds)
    for (double p : r.realized) CHECK(p == 0.2);
}

TEST_CASE("burn-in and budget") {
  const Target t = canonical("coordination");
  const GameTree& g = t.game();
  SteerConfig cfg;
  cfg.T = 40;
  cfg.burn_in = 10;
  cfg.alpha = 0.1;
  cfg.cap = 2.0;
  const auto m = run_trajectory_steer(t, make_learners({"cfr+"}, g, 2.0), cfg, 3);
  for (int r = 0; r < 10; ++r) {
    CHECK(m.rounds[r].realized == std::vector<double>{0.0, 0.0});
    CHECK(m.rounds[r].expected == std::vector<double>{0.0, 0.0});
    CHECK(m.rounds[r].alpha == 0.0);
  }
  CHECK(m.rounds[10].alpha == 0.1);

  cfg.burn_in = 0;
  cfg.budget = 1.0;
  const auto b = run_nf_steer(t, static_learners(g, t.profile()), cfg, 3);
  // each round pays 0.1 to each player; the round crossing the budget is paid in full
  CHECK(b.total_paid == doctest::Approx(1.0));
  CHECK(b.rounds[4].realized[0] == doctest::Approx(0.1));
  CHECK(b.rounds[5].realized[0] == 0.0);

  cfg.burn_in = 40;
  CHECK_THROWS_AS(run_nf_steer(t, static_learners(g, t.profile()), cfg, 3), ConfigError);
}

TEST_CASE("full-feedback steering of CFR+ on the stag hunt") {
  const Target t = canonical("stag_hunt");
  const GameTree& g = t.game();
  double c = 0;
  for (Player p = 0; p < 2; ++p) c = std::max(c, CfrPlus(g, p).regret_bound(1, 1));
  ScheduleInput in{Theorem::kFullFeedback, [&](double T) { return c * std::sqrt(T); }, {}, 2, g.num_terminals()};
  const Hyperparams h = schedule(in, 1e4, ScheduleMode::kClamp);
  SteerConfig cfg;
  cfg.T = 10000;
  cfg.alpha = h.alpha;
  const auto m = run_full_feedback_steer(t, make_learners({"cfr+"}, g, 3), cfg, 0);
  const double bound = 3 * g.num_terminals() * std::sqrt(h.epsilon);
  CHECK(m.final_gap <= bound);
  for (double p : m.average_realized) CHECK(p <= bound);
  CHECK(m.rounds.back().welfare == doctest::Approx(1.0).epsilon(0.02));

  // α = 0: no guarantee, the metrics still add up
  cfg.alpha = 0.0;
  cfg.T = 200;
  const auto z = run_full_feedback_steer(t, make_learners({"cfr+"}, g, 3), cfg, 0);
  CHECK(z.rounds.size() == 200);
  CHECK(std::isfinite(z.final_gap));
  for (double p : z.average_realized) CHECK(p >= 0.0);

  cfg.alpha = 0.5;
  CHECK_THROWS_AS(run_full_feedback_steer(t, make_learners({"cfr+"}, g, 3), cfg, 0), ConfigError);
}

TEST_CASE("normal-form steering of MWU on the coordination game") {
  const Target t = canonical("coordination");
  const GameTree& g = t.game();
  const Mwu probe(g, 0, 0.1);
  ScheduleInput in{Theorem::kNormalForm, [&](double T) { return probe.regret_bound(T, 1.0); }, {}, 2, 4};
  const Hyperparams h = schedule(in, 2e4);
  SteerConfig cfg;
  cfg.T = 20000;
  cfg.alpha = h.alpha;
  const auto m = run_nf_steer(t, make_learners({"mwu"}, g, h.cap), cfg, 0);
  CHECK(m.final_gap <= 2 * std::sqrt(h.epsilon));
  for (double p : m.average_realized) CHECK(p <= 2 * std::sqrt(h.epsilon));
}

TEST_CASE("trajectory steering with bandit learners stays well-formed") {
  const Target t = canonical("stag_hunt");
  const GameTree& g = t.game();
  SteerConfig cfg;
  cfg.T = 3000;
  cfg.alpha = 0.2;
  cfg.cap = 4.0;
  const auto m = run_trajectory_steer(t, make_learners({"exp3"}, g, 4.0), cfg, 9);
  CHECK(m.rounds.size() == 3000);
  CHECK(std::isfinite(m.final_gap));
  for (const auto& r : m.rounds)
    for (double p : r.realized) CHECK((p == 0.0 || p == 0.2 || p == 4.0));
}

TEST_CASE("dynamic alpha follows the windowed gap") {
  const Target t = canonical("stag_hunt");
  const GameTree& g = t.game();
  SteerConfig cfg;
  cfg.T = 30;
  cfg.cap = 2.0;
  cfg.alpha_mode = AlphaMode::kDynamic;
  cfg.alpha_base = 0.1;
  cfg.alpha_cap = 0.15;
  cfg.window = 5;
  const auto direct = run_trajectory_steer(t, static_learners(g, t.profile()), cfg, 0);
  CHECK(direct.rounds[0].alpha == 0.15);
  for (int r = 1; r < 30; ++r) CHECK(direct.rounds[r].alpha == 0.0);
}

TEST_CASE("equilibrium adversary defeats a bounded trajectory payment") {
  // lower_bound(3) with P = 1 < n/2: all-Hare survives as an equilibrium and
  // the adversary keeps playing it.
  const Target t = canonical("lower_bound(3)");
  const GameTree& g = t.game();
  AdversaryPopulation pop(g, EquilibriumAdversary({std::vector<int>{0, 0, 0}, 0, false}));
  SteerConfig cfg;
  cfg.scheme = Scheme::kTrajectory;
  cfg.T = 300;
  cfg.alpha = 0.0;
  cfg.cap = 1.0;
  const auto m = run_steering(t, pop, cfg, 0);
  for (const auto& r : m.rounds) CHECK(r.gap >= 0.5);
  for (const auto& a : pop.history()) CHECK(a == std::vector<int>{0, 0, 0});
}

TEST_CASE("budget-capped normal-form steering loses to the adversary") {
  const Target t = canonical("coordination");
  const GameTree& g = t.game();
  const double B = 10;
  AdversaryPopulation pop(g, EquilibriumAdversary({std::vector<int>{0, 0}, int(B * B), false}));
  SteerConfig cfg;
  cfg.scheme = Scheme::kNormalForm;
  cfg.T = 400;
  cfg.alpha = 0.1;
  cfg.budget = B;
  const auto m = run_steering(t, pop, cfg, 0);
  for (int r = int(B * B + 2 * B); r < cfg.T; ++r) CHECK(pop.history()[r] == std::vector<int>{0, 0});
  for (double reg : m.regret) CHECK(reg <= 2 * std::sqrt(double(cfg.T)));
}

TEST_CASE("round CSV") {
  const Target t = canonical("stag_hunt");
  SteerConfig cfg;
  cfg.T = 25;
  cfg.burn_in = 10;
  cfg.alpha = 0.1;
  cfg.cap = 4.0;
  const auto m = run_trajectory_steer(t, make_learners({"cfr+"}, t.game(), 4.0), cfg, 7);
  const auto dir = std::filesystem::temp_directory_path() / "steer_csv_test";
  std::filesystem::create_directories(dir);
  write_round_csv(m, (dir / "rounds.csv").string());
  write_player_csv(m, (dir / "players.csv").string());
  std::ifstream in(dir / "rounds.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "round,player,realized_payment,expected_payment,welfare,directness_gap,alpha,P");
  int rows = 0, last = 0;
  while (std::getline(in, line)) {
    ++rows;
    const int round = std::stoi(line.substr(0, line.find(',')));
    CHECK(round == last + 1);
    last = round;
  }
  CHECK(rows == 25);
  std::ifstream pin(dir / "players.csv");
  int prow = -1;
  while (std::getline(pin, line)) ++prow;
  CHECK(prow == 50);
}
