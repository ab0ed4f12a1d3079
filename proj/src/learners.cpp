#include "steer/learners.hpp"

#include "steer/evaluation.hpp"
#include "steer/sequence_form.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace steer {

namespace {

void check_utility(const GameTree& game, Player p, const Vector& u) {
  if (u.size() != game.num_sequences(p))
    throw std::invalid_argument(fmt::format("utility has {} entries, player {} has {} sequences",
                                            u.size(), p, game.num_sequences(p)));
  if (!u.allFinite()) throw std::invalid_argument("non-finite utility");
}

double max_actions(const GameTree& game, Player p) {
  std::size_t k = 1;
  for (int I : game.player_infosets(p)) k = std::max(k, game.infoset(I).actions.size());
  return static_cast<double>(k);
}

Vector softmax(const Vector& logw) {
  const Vector e = (logw.array() - logw.maxCoeff()).exp();
  return e / e.sum();
}

}  // namespace

// ---------------------------------------------------------------- CFR+

CfrPlus::CfrPlus(const GameTree& game, Player player, bool linear_averaging)
    : Learner(game, player), linear_(linear_averaging) {
  if (!game.sequence_form_ready()) throw GameError("CFR+ needs a sequence form");
  regret_ = Vector::Zero(game.num_sequences(player));
  sum_ = Vector::Zero(regret_.size());
  recompute();
}

Vector CfrPlus::behavior(int infoset) const {
  const Infoset& info = game_->infoset(infoset);
  const auto k = static_cast<Eigen::Index>(info.actions.size());
  const Vector r = regret_.segment(info.first_sequence, k);
  const double total = r.sum();
  return total > 0.0 ? Vector(r / total) : Vector(Vector::Constant(k, 1.0 / k));
}

void CfrPlus::recompute() {
  x_ = from_behavioral(*game_, player_, [&](int I) { return behavior(I); });
}

const Vector& CfrPlus::step(const Vector& utility) {
  check_utility(*game_, player_, utility);
  ++rounds_;
  const double w = linear_ ? rounds_ : 1.0;
  sum_ += w * x_;
  weight_ += w;

  Vector value = utility;
  const auto infosets = game_->player_infosets(player_);
  for (auto it = infosets.rbegin(); it != infosets.rend(); ++it) {
    const Infoset& info = game_->infoset(*it);
    const auto k = static_cast<Eigen::Index>(info.actions.size());
    // Regret-matched behavior, also below sequences x_ never reaches.
    const Vector sigma = behavior(*it);
    const double v = sigma.dot(value.segment(info.first_sequence, k));
    for (Eigen::Index a = 0; a < k; ++a) {
      double& r = regret_[info.first_sequence + a];
      r = std::max(0.0, r + value[info.first_sequence + a] - v);
    }
    value[info.parent_sequence] += v;
  }
  recompute();
  return x_;
}

Vector CfrPlus::average_strategy() const { return weight_ > 0 ? Vector(sum_ / weight_) : x_; }

double CfrPlus::regret_bound(double T, double range) const {
  const double infosets = static_cast<double>(game_->player_infosets(player_).size());
  return range * infosets * std::sqrt(max_actions(*game_, player_)) * std::sqrt(T);
}

// ---------------------------------------------------------------- MWU

Mwu::Mwu(const GameTree& game, Player player, double eta)
    : Mwu(game, player, eta,
          Vector::Constant(static_cast<Eigen::Index>(
                               game.player_infosets(player).empty()
                                   ? 1
                                   : game.infoset(game.player_infosets(player)[0]).actions.size()),
                           1.0)) {}

Mwu::Mwu(const GameTree& game, Player player, double eta, const Vector& initial)
    : Learner(game, player), eta_(eta) {
  if (game.player_infosets(player).size() != 1)
    throw std::invalid_argument("MWU needs a player with exactly one infoset");
  if (!(eta > 0.0)) throw std::invalid_argument("MWU needs eta > 0");
  infoset_ = game.player_infosets(player)[0];
  const auto k = static_cast<Eigen::Index>(game.infoset(infoset_).actions.size());
  if (initial.size() != k || !(initial.array() > 0.0).all())
    throw std::invalid_argument("MWU initial weights must be positive, one per action");
  logw_ = initial.array().log();
  sum_ = Vector::Zero(game.num_sequences(player));
  recompute();
}

void Mwu::recompute() {
  x_ = Vector::Zero(game_->num_sequences(player_));
  x_[0] = 1.0;
  x_.segment(game_->infoset(infoset_).first_sequence, logw_.size()) = softmax(logw_);
}

Vector Mwu::action_probs() const { return softmax(logw_); }

const Vector& Mwu::step(const Vector& action_utility) {
  if (action_utility.size() != logw_.size())
    throw std::invalid_argument("MWU utility must have one entry per action");
  if (!action_utility.allFinite()) throw std::invalid_argument("non-finite utility");
  ++rounds_;
  sum_ += x_;
  logw_ += eta_ * action_utility;
  recompute();
  return x_;
}

void Mwu::observe(const Feedback& fb) {
  check_utility(*game_, player_, fb.gradient);
  step(fb.gradient.segment(game_->infoset(infoset_).first_sequence, logw_.size()));
}

double Mwu::regret_bound(double T, double range) const {
  const double k = static_cast<double>(logw_.size());
  return range * (std::log(k) / eta_ + eta_ * T / 8.0);
}

// ---------------------------------------------------------------- EXP3

Exp3::Exp3(const GameTree& game, Player player, double epsilon, double payoff_range,
           std::size_t max_plans)
    : Learner(game, player), epsilon_(epsilon), range_(payoff_range) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("EXP3 needs 0 < eps <= 1");
  if (!(payoff_range > 0.0)) throw std::invalid_argument("EXP3 needs a positive payoff range");
  plans_ = enumerate_pure_strategies(game, player, max_plans);
  logw_ = Vector::Zero(static_cast<Eigen::Index>(plans_.size()));
  sum_ = Vector::Zero(game.num_sequences(player));
  recompute();
}

void Exp3::recompute() {
  const double k = static_cast<double>(plans_.size());
  probs_ = (1.0 - epsilon_) * softmax(logw_).array() + epsilon_ / k;
  x_ = Vector::Zero(game_->num_sequences(player_));
  for (std::size_t i = 0; i < plans_.size(); ++i) x_ += probs_[static_cast<Eigen::Index>(i)] * plans_[i];
}

int Exp3::sample_plan(Rng& rng) {
  double u = uniform01(rng);
  int pick = num_plans() - 1;
  for (int k = 0; k < num_plans(); ++k) {
    if (u < probs_[k]) {
      pick = k;
      break;
    }
    u -= probs_[k];
  }
  played_ = pick;
  return pick;
}

Vector Exp3::play(Rng& rng) { return plans_[sample_plan(rng)]; }

const Vector& Exp3::step(int plan, double payoff) {
  if (plan < 0 || plan >= num_plans()) throw std::logic_error("EXP3 update without a played plan");
  if (!(payoff >= -1e-12 && payoff <= range_ + 1e-12))
    throw std::out_of_range(fmt::format("EXP3 payoff {} outside [0, {}]", payoff, range_));
  ++rounds_;
  sum_ += x_;
  const double k = static_cast<double>(plans_.size());
  logw_[plan] += epsilon_ / k * (payoff / range_) / probs_[plan];
  recompute();
  played_ = -1;
  return x_;
}

double Exp3::regret_bound(double T, double range) const {
  const double k = static_cast<double>(plans_.size());
  return range * ((std::numbers::e - 1.0) * epsilon_ * T + k * std::log(k) / epsilon_);
}

// ---------------------------------------------------------------- outcome-sampling CFR+

BanditCfr::BanditCfr(const GameTree& game, Player player, double epsilon, double payoff_range)
    : Learner(game, player),
      epsilon_(epsilon),
      range_(payoff_range),
      inner_(game, player),
      uniform_(uniform_strategy(game, player)) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("bandit CFR needs 0 < eps <= 1");
  x_ = (1.0 - epsilon_) * inner_.strategy() + epsilon_ * uniform_;
  sum_ = Vector::Zero(x_.size());
}

void BanditCfr::observe(const Feedback& fb) {
  if (fb.terminal < 0 || fb.terminal >= game_->num_terminals())
    throw std::invalid_argument("bandit CFR needs the sampled terminal");
  ++rounds_;
  sum_ += x_;
  Vector g = Vector::Zero(x_.size());
  const int s = game_->terminal_sequence(player_, fb.terminal);
  g[s] = (fb.payoff / range_) / x_[s];
  inner_.step(g);
  x_ = (1.0 - epsilon_) * inner_.strategy() + epsilon_ * uniform_;
}

double BanditCfr::regret_bound(double T, double range) const {
  const double infosets = static_cast<double>(game_->player_infosets(player_).size());
  return range * (infosets * std::sqrt(max_actions(*game_, player_)) * std::sqrt(T) / epsilon_ +
                  epsilon_ * T);
}

// ---------------------------------------------------------------- regret

RegretRecord::RegretRecord(const GameTree& game, Player player, double cap)
    : player_(player), cap_(cap), sum_(Vector::Zero(game.num_sequences(player))) {}

void RegretRecord::add(const Vector& utility, const Vector& played) {
  if (utility.size() != sum_.size() || played.size() != sum_.size())
    throw std::invalid_argument("regret record: dimension mismatch");
  sum_ += utility;
  realized_ += utility.dot(played);
  ++rounds_;
}

double measured_regret(const GameTree& game, const RegretRecord& record) {
  if (record.rounds() == 0) throw std::invalid_argument("measured_regret: empty record");
  const double best = best_response_to_gradient(game, record.player(), record.cumulative_utility()).value;
  return (best - record.realized()) / (record.cap() + 1.0);
}

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const GameTree& game,
                                      Player player, double payoff_range) {
  if (spec.tag == "cfr+") return std::make_unique<CfrPlus>(game, player, spec.linear_averaging);
  if (spec.tag == "mwu") return std::make_unique<Mwu>(game, player, spec.eta);
  if (spec.tag == "exp3") return std::make_unique<Exp3>(game, player, spec.epsilon, payoff_range);
  if (spec.tag == "bandit_cfr")
    return std::make_unique<BanditCfr>(game, player, spec.epsilon, payoff_range);
  throw ConfigError(fmt::format("unknown learner '{}'", spec.tag));
}

}  // namespace steer
