#include "steer/payments.hpp"

#include "steer/evaluation.hpp"
#include "steer/sequence_form.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace steer {

Target::Target(const GameTree& game, Profile d, bool require_equilibrium)
    : game_(&game), d_(std::move(d)) {
  if (static_cast<int>(d_.size()) != game.num_players())
    throw ConfigError(fmt::format("target has {} strategies, game has {} players", d_.size(),
                                  game.num_players()));
  for (Player i = 0; i < game.num_players(); ++i) {
    if (!is_valid_strategy(game, i, d_[i]) || !is_pure_strategy(game, i, d_[i]))
      throw ConfigError(fmt::format("target strategy of player {} is not pure", i));
  }
  if (require_equilibrium) {
    for (Player i = 0; i < game.num_players(); ++i) {
      const double gain = deviation_benefit(game, d_, i);
      if (gain > 1e-9)
        throw ConfigError(fmt::format("target is not a Nash equilibrium: player {} gains {:.3g}", i, gain));
    }
  }
  dhat_ = reach_products(game, d_);
  for (Player i = 0; i < game.num_players(); ++i) {
    Vector dz(game.num_terminals());
    for (int z = 0; z < game.num_terminals(); ++z) dz[z] = d_[i][game.terminal_sequence(i, z)];
    direct_.push_back(std::move(dz));
    Vector rel = d_[i];
    const auto& mask = game.relevant_sequences(i);
    for (Eigen::Index s = 0; s < rel.size(); ++s)
      if (!mask[s]) rel[s] = 0.0;
    relevant_.push_back(std::move(rel));
    grad_.push_back(utility_gradient(game, d_, i));
  }
}

bool is_normal_form(const GameTree& game) {
  for (Player p = 0; p < game.num_players(); ++p)
    if (game.player_infosets(p).size() != 1 || game.relevant_sequences(p)[0]) return false;
  return true;
}

LinearPayment nf_payment_function(const Target& target, const Profile& x, Player i, double alpha) {
  const GameTree& g = target.game();
  if (!is_normal_form(g))
    throw ConfigError("normal-form payments need one infoset per player, reached on every terminal");
  double others = 1.0;
  for (Player j = 0; j < g.num_players(); ++j)
    if (j != i) others *= target.relevant(j).dot(x[j]);
  return {target.relevant(i) * (alpha + 1.0 - others), 0.0};
}

double nf_payment(const Target& target, const Profile& x, Player i, double alpha) {
  return nf_payment_function(target, x, i, alpha)(x[i]);
}

LinearPayment ff_payment_from_gradients(const GameTree& game, Player i, double alpha,
                                        const Vector& relevant, const Vector& grad_d,
                                        const Vector& grad_x) {
  const Vector sandbox = grad_d - grad_x;
  // -min_x' sandbox·x' = max_x' (-sandbox)·x'
  const double shift = best_response_to_gradient(game, i, -sandbox).value;
  return {alpha * relevant + sandbox, shift};
}

LinearPayment ff_payment_function(const Target& target, const Profile& x, Player i, double alpha) {
  return ff_payment_from_gradients(target.game(), i, alpha, target.relevant(i), target.gradient(i),
                                   utility_gradient(target.game(), x, i));
}

double ff_payment(const Target& target, const Profile& x, Player i, double alpha) {
  return ff_payment_function(target, x, i, alpha)(x[i]);
}

double traj_payment(const Target& target, Player i, int z, double alpha, double cap) {
  const double dh = target.reach()[z];
  return alpha * dh + cap * target.direct(i)[z] * (1.0 - dh);
}

Vector traj_payment_vector(const Target& target, Player i, double alpha, double cap) {
  const Vector& dh = target.reach();
  return alpha * dh + cap * target.direct(i).cwiseProduct(Vector::Ones(dh.size()) - dh);
}

LinearPayment traj_expected_payment_function(const Target& target, const Profile& x, Player i,
                                             double alpha, double cap) {
  return {utility_gradient(target.game(), x, i, traj_payment_vector(target, i, alpha, cap)), 0.0};
}

double traj_expected_payment(const Target& target, const Profile& x, Player i, double alpha,
                             double cap) {
  return expected_value(target.game(), x, traj_payment_vector(target, i, alpha, cap));
}

double deviation_mass(const Target& target, const Profile& x, Player i) {
  const Vector pr = terminal_distribution(target.game(), x);
  double mass = 0.0;
  for (Eigen::Index z = 0; z < pr.size(); ++z)
    if (target.direct(i)[z] == 0.0) mass += pr[z];
  return mass;
}

double directness_gap(std::span<const Vector> history, const Vector& dhat) {
  if (history.empty()) throw std::invalid_argument("directness_gap: empty history");
  Vector sum = Vector::Zero(dhat.size());
  for (const Vector& xh : history) {
    if (xh.size() != dhat.size()) throw std::invalid_argument("directness_gap: dimension mismatch");
    sum += xh;
  }
  return l1_distance(sum / static_cast<double>(history.size()), dhat);
}

double dynamic_alpha(double recent_gap, double base, double cap) {
  return std::min(cap, base * recent_gap);
}

}  // namespace steer
