#include "steer/steering.hpp"

#include "steer/evaluation.hpp"
#include "steer/sequence_form.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>

namespace steer {

Scheme parse_scheme(std::string_view tag) {
  if (tag == "none") return Scheme::kNone;
  if (tag == "nf") return Scheme::kNormalForm;
  if (tag == "full_feedback") return Scheme::kFullFeedback;
  if (tag == "trajectory") return Scheme::kTrajectory;
  throw ConfigError(fmt::format("unknown payment scheme '{}'", tag));
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::kNone: return "none";
    case Scheme::kNormalForm: return "nf";
    case Scheme::kFullFeedback: return "full_feedback";
    case Scheme::kTrajectory: return "trajectory";
  }
  return "?";
}

double scheme_cap(const SteerConfig& cfg) {
  const double alpha = cfg.alpha_mode == AlphaMode::kDynamic ? cfg.alpha_cap : cfg.alpha;
  switch (cfg.scheme) {
    case Scheme::kNone: return 0.0;
    case Scheme::kNormalForm: return 1.0 + alpha;
    case Scheme::kFullFeedback: return 3.0;
    case Scheme::kTrajectory: return std::max(cfg.cap, alpha);
  }
  return 0.0;
}

LinearPayment PaymentRule::expected(const Profile& x, Player i) const {
  if (!active()) return LinearPayment::zero(static_cast<int>(x[i].size()));
  switch (scheme_) {
    case Scheme::kNormalForm: return nf_payment_function(*target_, x, i, alpha_);
    case Scheme::kFullFeedback: return ff_payment_function(*target_, x, i, alpha_);
    case Scheme::kTrajectory: return traj_expected_payment_function(*target_, x, i, alpha_, cap_);
    case Scheme::kNone: break;
  }
  return LinearPayment::zero(static_cast<int>(x[i].size()));
}

double PaymentRule::realized(const Profile& x, Player i, int z) const {
  if (!active()) return 0.0;
  if (scheme_ == Scheme::kTrajectory) return traj_payment(*target_, i, z, alpha_, cap_);
  return expected_value(x, i);
}

// ---------------------------------------------------------------- populations

LearnerPopulation::LearnerPopulation(std::vector<std::unique_ptr<Learner>> learners, std::uint64_t seed)
    : learners_(std::move(learners)) {
  for (std::size_t i = 0; i < learners_.size(); ++i)
    streams_.push_back(make_stream(seed, fmt::format("player{}", i)));
}

Profile LearnerPopulation::play(int, const PaymentRule&) {
  Profile x;
  for (std::size_t i = 0; i < learners_.size(); ++i) x.push_back(learners_[i]->play(streams_[i]));
  return x;
}

void LearnerPopulation::observe(const std::vector<Feedback>& feedback) {
  for (std::size_t i = 0; i < learners_.size(); ++i) learners_[i]->observe(feedback[i]);
}

AdversaryPopulation::AdversaryPopulation(const GameTree& game, EquilibriumAdversary adversary)
    : game_(&game), adversary_(std::move(adversary)), base_(normal_form(game)) {}

Profile AdversaryPopulation::play(int round, const PaymentRule& rule) {
  NormalForm pay = base_;
  for (auto& v : pay.payoff) v.setZero();
  if (rule.active()) {
    for (int k = 0; k < base_.num_profiles(); ++k) {
      const auto a = base_.profile(k);
      const Profile xa = to_profile(*game_, pure_mixed(base_, a));
      for (Player i = 0; i < base_.num_players(); ++i) pay.payoff[i][k] = rule.expected_value(xa, i);
    }
  }
  NormalForm total = base_;
  for (Player i = 0; i < base_.num_players(); ++i) total.payoff[i] += pay.payoff[i];
  const MixedProfile m = adversary_.choose(round, total, &pay);
  std::vector<int> pure;
  bool is_pure = true;
  for (const Vector& mi : m) {
    Eigen::Index a = 0;
    if (mi.maxCoeff(&a) < 1.0) is_pure = false;
    pure.push_back(static_cast<int>(a));
  }
  history_.push_back(is_pure ? pure : std::vector<int>{});
  return to_profile(*game_, m);
}

// ---------------------------------------------------------------- metrics

GapTracker::GapTracker(Vector dhat, int window)
    : dhat_(std::move(dhat)),
      sum_(Vector::Zero(dhat_.size())),
      window_(std::max(1, window)),
      recent_sum_(Vector::Zero(dhat_.size())) {}

void GapTracker::add(const Vector& xhat) {
  sum_ += xhat;
  ++rounds_;
  recent_.push_back(xhat);
  recent_sum_ += xhat;
  if (static_cast<int>(recent_.size()) > window_) {
    recent_sum_ -= recent_.front();
    recent_.pop_front();
  }
}

double GapTracker::gap() const {
  if (rounds_ == 0) throw std::logic_error("gap of an empty history");
  return l1_distance(sum_ / rounds_, dhat_);
}

double GapTracker::window_gap() const {
  if (recent_.empty()) throw std::logic_error("gap of an empty history");
  return l1_distance(recent_sum_ / static_cast<double>(recent_.size()), dhat_);
}

// ---------------------------------------------------------------- loop

SteeringMetrics run_steering(const Target& target, Population& population, const SteerConfig& cfg,
                             std::uint64_t seed) {
  const GameTree& g = target.game();
  const int n = g.num_players();
  if (cfg.T < 1) throw ConfigError("T must be positive");
  if (cfg.burn_in < 0 || cfg.burn_in >= cfg.T) throw ConfigError("burn_in must lie in [0, T)");
  if (cfg.alpha < 0) throw ConfigError("alpha must be nonnegative");
  if (cfg.objective.size() != 0 && cfg.objective.size() != g.num_terminals())
    throw ConfigError("objective must have one entry per terminal");

  const double P = scheme_cap(cfg);
  PaymentRule rule(target, cfg.scheme);
  GapTracker tracker(target.reach(), cfg.window);
  const double dhat_mass = std::max(1.0, target.reach().sum());
  Rng sampler = make_stream(seed, "mediator");
  std::vector<RegretRecord> records;
  for (Player i = 0; i < n; ++i) records.emplace_back(g, i, P);

  SteeringMetrics m;
  m.rounds.reserve(cfg.T);
  m.average_realized.assign(n, 0.0);
  m.average_expected.assign(n, 0.0);
  m.deviation_mass.assign(n, 0.0);
  std::vector<Feedback> feedback(n);

  for (int t = 1; t <= cfg.T; ++t) {
    double alpha = cfg.alpha;
    if (cfg.alpha_mode == AlphaMode::kDynamic)
      alpha = tracker.rounds()
                  ? dynamic_alpha(tracker.window_gap() / dhat_mass, cfg.alpha_base, cfg.alpha_cap)
                  : cfg.alpha_cap;
    const bool active = t > cfg.burn_in && m.total_paid < cfg.budget;
    rule.set(alpha, cfg.cap, active);

    const Profile x = population.play(t, rule);
    const int z = sample_playout(g, x, sampler);
    const Vector dist = terminal_distribution(g, x);

    RoundRecord rec;
    rec.round = t;
    rec.terminal = z;
    rec.alpha = active ? alpha : 0.0;
    rec.cap = active ? P : 0.0;
    for (Player i = 0; i < n; ++i) {
      const Vector grad = utility_gradient(g, x, i);
      const LinearPayment pay = rule.expected(x, i);
      const double expected = pay(x[i]);
      const double realized = rule.realized(x, i, z);
      feedback[i].gradient = grad + pay.slope;
      feedback[i].terminal = z;
      feedback[i].payoff = g.utility(z, i) + realized;
      records[i].add(feedback[i].gradient, x[i]);
      rec.expected.push_back(expected);
      rec.realized.push_back(realized);
      rec.welfare += grad.dot(x[i]);
      m.average_expected[i] += expected;
      m.average_realized[i] += realized;
      m.total_paid += realized;
      double off = 0.0;
      for (int zz = 0; zz < g.num_terminals(); ++zz)
        if (target.direct(i)[zz] == 0.0) off += dist[zz];
      m.deviation_mass[i] += off;
    }
    population.observe(feedback);

    tracker.add(reach_products(g, x));
    rec.gap = tracker.gap();
    if (cfg.objective.size()) rec.objective = dist.dot(cfg.objective);
    m.average_welfare += rec.welfare;
    m.average_objective += rec.objective;
    m.rounds.push_back(std::move(rec));
    if (t == cfg.T) m.last = x;
  }

  const double T = cfg.T;
  for (Player i = 0; i < n; ++i) {
    m.average_expected[i] /= T;
    m.average_realized[i] /= T;
    m.deviation_mass[i] /= T;
    m.regret.push_back(measured_regret(g, records[i]));
  }
  m.average_welfare /= T;
  m.average_objective /= T;
  m.final_gap = tracker.gap();
  return m;
}

namespace {

SteeringMetrics run_with(const Target& target, std::vector<std::unique_ptr<Learner>> learners,
                         SteerConfig cfg, Scheme scheme, std::uint64_t seed) {
  cfg.scheme = scheme;
  LearnerPopulation pop(std::move(learners), seed);
  return run_steering(target, pop, cfg, seed);
}

}  // namespace

SteeringMetrics run_nf_steer(const Target& target, std::vector<std::unique_ptr<Learner>> learners,
                             SteerConfig cfg, std::uint64_t seed) {
  return run_with(target, std::move(learners), std::move(cfg), Scheme::kNormalForm, seed);
}

SteeringMetrics run_full_feedback_steer(const Target& target,
                                        std::vector<std::unique_ptr<Learner>> learners,
                                        SteerConfig cfg, std::uint64_t seed) {
  if (cfg.alpha * target.game().num_terminals() > 1 + 1e-12)
    throw ConfigError("full-feedback steering needs alpha <= 1/|Z|");
  return run_with(target, std::move(learners), std::move(cfg), Scheme::kFullFeedback, seed);
}

SteeringMetrics run_trajectory_steer(const Target& target,
                                     std::vector<std::unique_ptr<Learner>> learners,
                                     SteerConfig cfg, std::uint64_t seed) {
  if (cfg.cap < 1) throw ConfigError("trajectory steering needs P >= 1");
  return run_with(target, std::move(learners), std::move(cfg), Scheme::kTrajectory, seed);
}

SteeringMetrics run_unsteered(const GameTree& game, const LearnerSpec& learner, int T,
                              const Vector& objective, std::uint64_t seed) {
  Profile first;
  for (Player i = 0; i < game.num_players(); ++i) {
    const std::vector<int> zeros(game.player_infosets(i).size(), 0);
    first.push_back(pure_strategy(game, i, zeros));
  }
  const Target target(game, std::move(first), /*require_equilibrium=*/false);
  SteerConfig cfg;
  cfg.scheme = Scheme::kNone;
  cfg.T = T;
  cfg.burn_in = 0;
  cfg.objective = objective;
  LearnerPopulation pop(make_learners(learner, game, 0.0), seed);
  return run_steering(target, pop, cfg, seed);
}

std::vector<std::unique_ptr<Learner>> make_learners(const LearnerSpec& spec, const GameTree& game,
                                                    double cap) {
  std::vector<std::unique_ptr<Learner>> out;
  for (Player i = 0; i < game.num_players(); ++i) out.push_back(make_learner(spec, game, i, 1.0 + cap));
  return out;
}

// ---------------------------------------------------------------- CSV

void write_round_csv(const SteeringMetrics& m, const std::string& path) {
  auto out = fmt::output_file(path);
  out.print("round,player,realized_payment,expected_payment,welfare,directness_gap,alpha,P\n");
  for (const RoundRecord& r : m.rounds) {
    const auto it = std::max_element(r.realized.begin(), r.realized.end());
    const auto i = static_cast<std::size_t>(it - r.realized.begin());
    out.print("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.round, i, r.realized[i],
              r.expected[i], r.welfare, r.gap, r.alpha, r.cap);
  }
}

void write_player_csv(const SteeringMetrics& m, const std::string& path) {
  auto out = fmt::output_file(path);
  out.print("round,player,realized_payment,expected_payment,terminal,objective\n");
  for (const RoundRecord& r : m.rounds)
    for (std::size_t i = 0; i < r.realized.size(); ++i)
      out.print("{},{},{:.17g},{:.17g},{},{:.17g}\n", r.round, i, r.realized[i], r.expected[i],
                r.terminal, r.objective);
}

}  // namespace steer
