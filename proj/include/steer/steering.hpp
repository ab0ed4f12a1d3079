#pragma once

#include "steer/adversary.hpp"
#include "steer/learners.hpp"
#include "steer/payments.hpp"

#include <deque>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace steer {

enum class Scheme {
  kNone,          // no payments (baseline)
  kNormalForm,    // (d_i·x_i)(α + 1 − Π d_j·x_j)
  kFullFeedback,  // sandboxed payments with the nonnegativity shift
  kTrajectory,    // pay from the sampled terminal only
};

Scheme parse_scheme(std::string_view tag);
std::string to_string(Scheme s);

enum class AlphaMode { kFixed, kDynamic };

struct SteerConfig {
  Scheme scheme = Scheme::kTrajectory;
  int T = 1000;
  int burn_in = 0;  // rounds with zero payments before steering starts
  double alpha = 0.0;
  double cap = 1.0;  // P for trajectory payments; ignored by the other schemes

  AlphaMode alpha_mode = AlphaMode::kFixed;
  double alpha_base = 0.1;  // dynamic α = min(alpha_cap, alpha_base * windowed gap / ‖d̂‖₁)
  double alpha_cap = 1.0;
  int window = 50;

  // Total payment budget across players and rounds; payments stop once the
  // realized total reaches it.
  double budget = std::numeric_limits<double>::infinity();

  // Optional per-terminal objective tracked each round (mediator utility).
  Vector objective;
};

// Bound on any single payment under the scheme, used as P in the regret
// normalization and as the bandit payoff range.
double scheme_cap(const SteerConfig& cfg);

// Per-round payment functions handed to the population.
class PaymentRule {
 public:
  PaymentRule(const Target& target, Scheme scheme) : target_(&target), scheme_(scheme) {}

  void set(double alpha, double cap, bool active) {
    alpha_ = alpha;
    cap_ = cap;
    active_ = active;
  }
  bool active() const { return active_ && scheme_ != Scheme::kNone; }
  double alpha() const { return alpha_; }
  double cap() const { return cap_; }
  Scheme scheme() const { return scheme_; }

  // Expected payment to player i as a linear function of x_i.
  LinearPayment expected(const Profile& x, Player i) const;
  double expected_value(const Profile& x, Player i) const { return expected(x, i)(x[i]); }
  // Payment actually handed out once terminal z was sampled.
  double realized(const Profile& x, Player i, int z) const;

 private:
  const Target* target_;
  Scheme scheme_;
  double alpha_ = 0.0;
  double cap_ = 0.0;
  bool active_ = false;
};

// Whatever produces the strategy profile each round.
class Population {
 public:
  virtual ~Population() = default;
  virtual Profile play(int round, const PaymentRule& rule) = 0;
  virtual void observe(const std::vector<Feedback>& feedback) = 0;
};

// One learner per player, each with its own random stream.
class LearnerPopulation : public Population {
 public:
  LearnerPopulation(std::vector<std::unique_ptr<Learner>> learners, std::uint64_t seed);
  Profile play(int round, const PaymentRule& rule) override;
  void observe(const std::vector<Feedback>& feedback) override;
  Learner& learner(Player i) { return *learners_[i]; }

 private:
  std::vector<std::unique_ptr<Learner>> learners_;
  std::vector<Rng> streams_;
};

// Players who each round play an equilibrium of the one-shot game including
// that round's payments. Needs one infoset per player.
class AdversaryPopulation : public Population {
 public:
  AdversaryPopulation(const GameTree& game, EquilibriumAdversary adversary);
  Profile play(int round, const PaymentRule& rule) override;
  void observe(const std::vector<Feedback>&) override {}
  const std::vector<std::vector<int>>& history() const { return history_; }  // pure profiles; empty rows when mixed

 private:
  const GameTree* game_;
  EquilibriumAdversary adversary_;
  NormalForm base_;
  std::vector<std::vector<int>> history_;
};

struct RoundRecord {
  int round = 0;
  std::vector<double> realized;  // per player
  std::vector<double> expected;  // per player
  double welfare = 0.0;          // sum of normalized expected utilities
  double objective = 0.0;        // expected objective when configured
  double gap = 0.0;              // running directness gap
  double alpha = 0.0;
  double cap = 0.0;
  int terminal = -1;
};

struct SteeringMetrics {
  std::vector<RoundRecord> rounds;
  double final_gap = 0.0;
  std::vector<double> average_realized;
  std::vector<double> average_expected;
  double average_welfare = 0.0;
  double average_objective = 0.0;
  std::vector<double> regret;           // Eq. (1) measured per player
  std::vector<double> deviation_mass;   // time-averaged Δ_i
  double total_paid = 0.0;
  Profile last;                         // strategies of the final round
};

// Runs T rounds. Random draws come from streams derived from `seed`.
SteeringMetrics run_steering(const Target& target, Population& population, const SteerConfig& cfg,
                             std::uint64_t seed);

// Convenience wrappers building a LearnerPopulation.
SteeringMetrics run_nf_steer(const Target& target, std::vector<std::unique_ptr<Learner>> learners,
                             SteerConfig cfg, std::uint64_t seed);
SteeringMetrics run_full_feedback_steer(const Target& target,
                                        std::vector<std::unique_ptr<Learner>> learners,
                                        SteerConfig cfg, std::uint64_t seed);
SteeringMetrics run_trajectory_steer(const Target& target,
                                     std::vector<std::unique_ptr<Learner>> learners,
                                     SteerConfig cfg, std::uint64_t seed);

// Learners of one kind for every player; bandit payoff range 1 + cap.
// Learners in `game` with no payments at all. The directness gap of the
// result is measured against the all-first-action profile and means nothing.
SteeringMetrics run_unsteered(const GameTree& game, const LearnerSpec& learner, int T,
                              const Vector& objective, std::uint64_t seed);

std::vector<std::unique_ptr<Learner>> make_learners(const LearnerSpec& spec, const GameTree& game,
                                                    double cap);

// Tracks the running and windowed average of x̂.
class GapTracker {
 public:
  GapTracker(Vector dhat, int window);
  void add(const Vector& xhat);
  double gap() const;         // over all rounds so far
  double window_gap() const;  // over the last `window` rounds
  int rounds() const { return rounds_; }

 private:
  Vector dhat_;
  Vector sum_;
  int rounds_ = 0;
  int window_;
  std::deque<Vector> recent_;
  Vector recent_sum_;
};

// CSV with one row per round: the player column names the player with the
// largest realized payment, whose realized/expected payments are reported.
void write_round_csv(const SteeringMetrics& m, const std::string& path);
// One row per (round, player).
void write_player_csv(const SteeringMetrics& m, const std::string& path);

}  // namespace steer
