#pragma once

#include "steer/game.hpp"
#include "steer/learners.hpp"
#include "steer/steering.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace steer {

// Debug identity of an augmented terminal: the base terminal plus the
// deviations on its path (at most two; node ids of the base tree).
struct TerminalIdentity {
  int base_terminal = -1;
  std::vector<Player> deviators;
  std::vector<int> deviation_nodes;
  std::vector<int> deviation_actions;
};

// Game with a mediator who recommends an action before each decision. The
// mediator is the last player and has perfect information; player i's
// infosets refine the base infosets by the recommendations i has received.
// Recommendations stop once two distinct players have deviated.
struct AugmentedGame {
  const GameTree* base = nullptr;
  GameTree game;
  Player mediator = 0;
  std::vector<int> recommended;  // per infoset of `game`; -1 when none
  std::vector<TerminalIdentity> terminals;

  int num_players() const { return mediator; }  // excluding the mediator
};

AugmentedGame augment(const GameTree& base);

// Normal-form correlation device: the mediator draws a whole action profile at
// the root and each player sees only its own component. Base must be normal
// form.
AugmentedGame correlation_game(const GameTree& base);

// Follows every recommendation; plays action 0 where none was given.
Vector direct_strategy(const AugmentedGame& aug, Player i);
Profile direct_profile(const AugmentedGame& aug);

// Γ^μ: the mediator's nodes become chance nodes with the law of μ. Terminal
// and infoset numbering match the augmented game.
GameTree fix_mediator(const AugmentedGame& aug, const Vector& mu);

// Appends μ to a profile of the non-mediator players.
Profile with_mediator(const Profile& players, const Vector& mu);

// Mediator objective u_0 per terminal, in [0, 1]: mean normalized utility of
// the players, one minus it, or one player's utility.
struct Objective {
  enum class Kind { kWelfare, kNegativeWelfare, kPlayer };
  Kind kind = Kind::kWelfare;
  Player player = 0;
};
Objective parse_objective(std::string_view tag);  // welfare | neg_welfare | player<k>
std::string to_string(const Objective& o);

// Over the first `num_players` players of g (the mediator is left out).
Vector objective_vector(const GameTree& g, int num_players, const Objective& o);
inline Vector objective_vector(const AugmentedGame& aug, const Objective& o) {
  return objective_vector(aug.game, aug.num_players(), o);
}
inline Vector welfare_objective(const AugmentedGame& aug) { return objective_vector(aug, {}); }
inline Vector negative_welfare_objective(const AugmentedGame& aug) {
  return objective_vector(aug, {Objective::Kind::kNegativeWelfare, 0});
}

// u_0(μ, d) − λ Σ_i [u_i(μ, x_i, d_{-i}) − u_i(μ, d)].
double lagrangian_value(const AugmentedGame& aug, const Vector& objective, double lambda,
                        const Vector& mu, const Profile& x);

// max_{x_i} u_i(μ, x_i, d_{-i}) − u_i(μ, d) for every player, optionally over
// restricted deviation sets (pure plans).
std::vector<double> deviation_benefits(const AugmentedGame& aug, const Vector& mu,
                                       const std::vector<std::vector<Vector>>* deviation_sets = nullptr);

struct BceOptions {
  int iterations = 10000;  // self-play rounds per λ
  int check_every = 250;
  double lambda0 = 1.0;
  int max_doublings = 12;
  double tolerance = 1e-4;        // certified deviation benefit
  double value_tolerance = 1e-4;  // Lagrangian duality gap
  bool best_response_deviators = false;
  // Per-player pure plans the deviators may use; empty means unrestricted.
  std::vector<std::vector<Vector>> deviation_sets;
};

struct BceSolution {
  Vector mu;
  double value = 0.0;  // u_0(μ, d)
  double lambda = 0.0;
  std::vector<double> deviation_benefit;
  double duality_gap = 0.0;
  bool certified = false;  // deviation benefit within tolerance
  int iterations = 0;  // total self-play rounds
};

// Self-play on the Lagrangian with CFR+ on both sides (deviators restricted
// to plan sets best-respond instead). λ doubles from lambda0 until the
// average μ has deviation benefit within tolerance; within one λ, play stops
// early once the duality gap is within value_tolerance.
BceSolution solve_optimal_bce(const AugmentedGame& aug, const Vector& objective,
                              const BceOptions& opts = {});

struct MediatedMetrics {
  SteeringMetrics steering;
  double optimum = 0.0;          // u_0*
  double optimality_gap = 0.0;   // u_0* − (1/T) Σ u_0(μ^(t), x^(t))
};

// Fixes the solved μ and steers the players to the direct profile of Γ^μ.
// Refuses a non-certified solution unless `force` is set.
MediatedMetrics compute_then_steer(const AugmentedGame& aug, const Vector& objective,
                                   const BceSolution& solution, const LearnerSpec& learner,
                                   SteerConfig cfg, std::uint64_t seed, bool force = false);

struct OnlineConfig {
  int T = 1000;
  double alpha = 0.0;
  double lambda = 1.0;
  int burn_in = 0;
  LearnerSpec learner;  // for the players
  // Restricted deviation sets: the players run Hedge over these plans.
  std::vector<std::vector<Vector>> deviation_sets;
  double hedge_eta = 0.1;
};

// Mediator runs CFR+ over its strategies with the Lagrangian utility; players
// are paid the full-feedback payment of Γ^{μ^(t)}. `optimum` is only used for
// the reported gap.
MediatedMetrics online_steer(const AugmentedGame& aug, const Vector& objective, double optimum,
                             const OnlineConfig& cfg, std::uint64_t seed);

struct NfOnlineConfig {
  int T = 1000;
  double alpha = 0.0;
  double lambda = 1.0;
  double mediator_epsilon = 0.05;
  double player_epsilon = 0.05;
};

// Trajectory-feedback online steering in a normal-form game: the mediator
// runs EXP3 over recommendation profiles and explores with probability α.
MediatedMetrics nf_online_steer(const GameTree& base, const AugmentedGame& corr,
                                const Vector& objective, double optimum,
                                const NfOnlineConfig& cfg, std::uint64_t seed);

// Branch payments of the normal-form protocol, exposed for testing.
double nf_exploration_payment(const GameTree& base, const std::vector<int>& played,
                              const std::vector<int>& recommended, Player i);
double nf_exploitation_payment(const GameTree& base, const std::vector<int>& played,
                               const std::vector<int>& recommended, Player i);

// Hedge over a fixed set of pure plans, fed with full utility vectors.
class PlanHedge : public Learner {
 public:
  PlanHedge(const GameTree& game, Player player, std::vector<Vector> plans, double eta);
  const Vector& strategy() const override { return x_; }
  void observe(const Feedback& fb) override;
  Vector average_strategy() const override { return rounds_ ? Vector(sum_ / rounds_) : x_; }
  std::string name() const override { return "plan_hedge"; }
  double regret_bound(double T, double range) const override;

 private:
  void recompute();
  std::vector<Vector> plans_;
  double eta_;
  Vector logw_;
  Vector x_;
  Vector sum_;
};

}  // namespace steer
