#pragma once

#include "steer/game.hpp"

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace steer {

Vector uniform_strategy(const GameTree& game, Player p);
Profile uniform_profile(const GameTree& game);

// Sequence-form strategy from per-infoset action distributions.
Vector from_behavioral(const GameTree& game, Player p,
                       const std::function<Vector(int infoset)>& policy);

// Pure strategy choosing actions[k] at the k-th infoset of the player (in
// player_infosets order).
Vector pure_strategy(const GameTree& game, Player p, std::span<const int> actions);

// Probability of `action` at `infoset` implied by x; uniform when the infoset
// is unreachable under x.
double behavioral_prob(const GameTree& game, const Vector& x, int infoset, int action);

// Flow-conservation violations (empty when x is a valid sequence-form strategy).
std::vector<std::string> strategy_violations(const GameTree& game, Player p, const Vector& x,
                                             double tol = 1e-9);
bool is_valid_strategy(const GameTree& game, Player p, const Vector& x, double tol = 1e-9);
bool is_pure_strategy(const GameTree& game, Player p, const Vector& x, double tol = 1e-12);

// All pure strategies of a player that differ on reachable infosets, in
// lexicographic order of actions. Throws if there are more than `limit`.
std::vector<Vector> enumerate_pure_strategies(const GameTree& game, Player p,
                                              std::size_t limit = 10000);

// Number of reduced pure strategies (as a double; it can be huge).
double count_pure_strategies(const GameTree& game, Player p);

// Random sequence-form strategy with Dirichlet(1) behavior at each infoset.
template <typename Gen>
Vector random_strategy(const GameTree& game, Player p, Gen& gen) {
  std::exponential_distribution<double> e(1.0);
  return from_behavioral(game, p, [&](int I) {
    Vector w(static_cast<Eigen::Index>(game.infoset(I).actions.size()));
    for (Eigen::Index a = 0; a < w.size(); ++a) w[a] = e(gen);
    return Vector(w / w.sum());
  });
}

}  // namespace steer
