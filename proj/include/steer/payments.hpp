#pragma once

#include "steer/game.hpp"

#include <span>
#include <vector>

namespace steer {

// A pure target profile with the per-terminal quantities every payment scheme
// needs. d̂ is the reach product of d (chance excluded), d_i[z] is 1 when
// player i's sequence to z is played by d_i (also when i never acts on z).
class Target {
 public:
  // Throws ConfigError when d is not a pure profile, or when
  // require_equilibrium is set and d is not a Nash equilibrium (tol 1e-9).
  Target(const GameTree& game, Profile d, bool require_equilibrium = true);

  const GameTree& game() const { return *game_; }
  int num_players() const { return static_cast<int>(d_.size()); }
  const Profile& profile() const { return d_; }
  const Vector& strategy(Player i) const { return d_[i]; }
  const Vector& reach() const { return dhat_; }                   // d̂ over Z
  const Vector& direct(Player i) const { return direct_[i]; }     // d_i[z] over Z
  const Vector& relevant(Player i) const { return relevant_[i]; } // d_i restricted to Σ_i
  const Vector& gradient(Player i) const { return grad_[i]; }     // ∇u_i(d_{-i})

 private:
  const GameTree* game_;
  Profile d_;
  Vector dhat_;
  std::vector<Vector> direct_;
  std::vector<Vector> relevant_;
  std::vector<Vector> grad_;
};

// p(x_i) = slope·x_i + offset, with x_{-i} already substituted.
struct LinearPayment {
  Vector slope;
  double offset = 0.0;

  double operator()(const Vector& xi) const { return slope.dot(xi) + offset; }
  static LinearPayment zero(int size) { return {Vector::Zero(size), 0.0}; }
};

// Every player has one infoset and acts on every terminal.
bool is_normal_form(const GameTree& game);

// Normal-form payment (d_i·x_i)(α + 1 − Π_{j≠i} d_j·x_j). Rejects games that
// are not normal form.
LinearPayment nf_payment_function(const Target& target, const Profile& x, Player i, double alpha);
double nf_payment(const Target& target, const Profile& x, Player i, double alpha);

// Full-feedback payment: directness bonus α d_i·x_i, sandboxing
// u_i(x_i, d_{-i}) − u_i(x_i, x_{-i}), and the constant making it nonnegative.
LinearPayment ff_payment_function(const Target& target, const Profile& x, Player i, double alpha);
double ff_payment(const Target& target, const Profile& x, Player i, double alpha);

// Same payment from precomputed pieces: `relevant` is d_i on Σ_i, `grad_d`
// and `grad_x` are ∇u_i at d_{-i} and at x_{-i}.
LinearPayment ff_payment_from_gradients(const GameTree& game, Player i, double alpha,
                                        const Vector& relevant, const Vector& grad_d,
                                        const Vector& grad_x);

// q_i(z) = α d̂[z] + P d_i[z] (1 − d̂[z]).
double traj_payment(const Target& target, Player i, int z, double alpha, double cap);
Vector traj_payment_vector(const Target& target, Player i, double alpha, double cap);
// Expected payment E_{z~x} q_i(z) as a linear function of x_i.
LinearPayment traj_expected_payment_function(const Target& target, const Profile& x, Player i,
                                             double alpha, double cap);
double traj_expected_payment(const Target& target, const Profile& x, Player i, double alpha,
                             double cap);

// Δ_i(x): probability (chance included) of reaching a terminal on which
// player i is not direct.
double deviation_mass(const Target& target, const Profile& x, Player i);

// ‖(1/T) Σ_t x̂^(t) − d̂‖₁.
double directness_gap(std::span<const Vector> history, const Vector& dhat);

// min(cap, base * recent_gap).
double dynamic_alpha(double recent_gap, double base, double cap);

}  // namespace steer
