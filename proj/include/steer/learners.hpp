#pragma once

#include "steer/game.hpp"
#include "steer/rng.hpp"

#include <memory>
#include <string>
#include <vector>

namespace steer {

// What a player learns at the end of a round. Full-feedback learners read the
// gradient; bandit learners read the sampled terminal and their payoff there.
struct Feedback {
  Vector gradient;  // utility (game + payments) as a linear function of x_i
  int terminal = -1;
  double payoff = 0.0;
};

class Learner {
 public:
  Learner(const GameTree& game, Player player) : game_(&game), player_(player) {}
  virtual ~Learner() = default;

  Player player() const { return player_; }
  const GameTree& game() const { return *game_; }
  int rounds() const { return rounds_; }

  // Mixed strategy for the current round.
  virtual const Vector& strategy() const = 0;
  // Strategy actually played this round. Plan-based bandit learners commit to
  // one pure plan here.
  virtual Vector play(Rng&) { return strategy(); }
  virtual void observe(const Feedback& fb) = 0;
  virtual Vector average_strategy() const = 0;
  virtual bool full_feedback() const { return true; }
  virtual std::string name() const = 0;
  // A-priori regret bound R(T) for utilities spanning `range`.
  virtual double regret_bound(double T, double range) const = 0;

 protected:
  const GameTree* game_;
  Player player_;
  int rounds_ = 0;
};

// CFR with regret matching+ at every infoset, simultaneous updates and plain
// (uniform) averaging unless linear averaging is requested.
class CfrPlus : public Learner {
 public:
  CfrPlus(const GameTree& game, Player player, bool linear_averaging = false);

  const Vector& strategy() const override { return x_; }
  void observe(const Feedback& fb) override { step(fb.gradient); }
  Vector average_strategy() const override;
  std::string name() const override { return "cfr+"; }
  double regret_bound(double T, double range) const override;

  // One update with a utility vector over the player's sequences.
  const Vector& step(const Vector& utility);
  const Vector& regrets() const { return regret_; }

 private:
  Vector behavior(int infoset) const;
  void recompute();

  bool linear_;
  Vector regret_;
  Vector x_;
  Vector sum_;
  double weight_ = 0.0;
};

// Multiplicative weights on a single-infoset player, kept in log space.
class Mwu : public Learner {
 public:
  Mwu(const GameTree& game, Player player, double eta = 0.1);
  // Start from a given action distribution instead of uniform.
  Mwu(const GameTree& game, Player player, double eta, const Vector& initial);

  const Vector& strategy() const override { return x_; }
  void observe(const Feedback& fb) override;
  Vector average_strategy() const override { return rounds_ ? Vector(sum_ / rounds_) : x_; }
  std::string name() const override { return "mwu"; }
  double regret_bound(double T, double range) const override;

  // Update with per-action utilities.
  const Vector& step(const Vector& action_utility);
  Vector action_probs() const;

 private:
  void recompute();

  double eta_;
  int infoset_;
  Vector logw_;
  Vector x_;
  Vector sum_;
};

// EXP3 over the player's pure plans with epsilon-uniform mixing.
class Exp3 : public Learner {
 public:
  Exp3(const GameTree& game, Player player, double epsilon = 0.05, double payoff_range = 1.0,
       std::size_t max_plans = 10000);

  const Vector& strategy() const override { return x_; }
  Vector play(Rng& rng) override;
  void observe(const Feedback& fb) override { step(played_, fb.payoff); }
  Vector average_strategy() const override { return rounds_ ? Vector(sum_ / rounds_) : x_; }
  bool full_feedback() const override { return false; }
  std::string name() const override { return "exp3"; }
  double regret_bound(double T, double range) const override;

  int num_plans() const { return static_cast<int>(plans_.size()); }
  const Vector& plan(int k) const { return plans_[k]; }
  const Vector& plan_probs() const { return probs_; }
  int sample_plan(Rng& rng);
  // Importance-weighted update for the plan played; payoff in [0, range].
  const Vector& step(int plan, double payoff);

 private:
  void recompute();

  double epsilon_;
  double range_;
  std::vector<Vector> plans_;
  Vector logw_;
  Vector probs_;
  Vector x_;
  Vector sum_;
  int played_ = -1;
};

// Outcome-sampling CFR+: CFR+ on the importance-weighted estimate
// g[σ_i(z)] = payoff / x_i[σ_i(z)], played with epsilon-uniform exploration.
class BanditCfr : public Learner {
 public:
  BanditCfr(const GameTree& game, Player player, double epsilon = 0.05,
            double payoff_range = 1.0);

  const Vector& strategy() const override { return x_; }
  void observe(const Feedback& fb) override;
  Vector average_strategy() const override { return rounds_ ? Vector(sum_ / rounds_) : x_; }
  bool full_feedback() const override { return false; }
  std::string name() const override { return "bandit_cfr"; }
  double regret_bound(double T, double range) const override;

 private:
  double epsilon_;
  double range_;
  CfrPlus inner_;
  Vector uniform_;
  Vector x_;
  Vector sum_;
};

// Inputs of Eq. (1): the per-round linear utilities and the played strategies.
class RegretRecord {
 public:
  RegretRecord(const GameTree& game, Player player, double cap);
  void add(const Vector& utility, const Vector& played);

  Player player() const { return player_; }
  int rounds() const { return rounds_; }
  double cap() const { return cap_; }
  const Vector& cumulative_utility() const { return sum_; }
  double realized() const { return realized_; }

 private:
  Player player_;
  double cap_;
  Vector sum_;
  double realized_ = 0.0;
  int rounds_ = 0;
};

// (max_x sum_t v_t(x) - sum_t v_t(x_t)) / (P + 1).
double measured_regret(const GameTree& game, const RegretRecord& record);

struct LearnerSpec {
  std::string tag = "cfr+";  // cfr+ | mwu | exp3 | bandit_cfr
  double eta = 0.1;
  double epsilon = 0.05;
  bool linear_averaging = false;
};

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, const GameTree& game,
                                      Player player, double payoff_range);

}  // namespace steer
