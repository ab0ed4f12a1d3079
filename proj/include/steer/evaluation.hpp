#pragma once

#include "steer/game.hpp"
#include "steer/rng.hpp"

#include <span>
#include <vector>

namespace steer {

// x̂_N[z] = prod_{j in N} x_j[σ_j(z)]; chance is never included.
Vector reach_products(const GameTree& game, const Profile& x, std::span<const Player> players);
Vector reach_products(const GameTree& game, const Profile& x);  // all players

// Pr[z] under x, chance reach included.
Vector terminal_distribution(const GameTree& game, const Profile& x);

// Gradient of z -> values[z] over player i's sequences with x_{-i} fixed:
// g[s] = sum_{z: σ_i(z)=s} c(z) prod_{j != i} x_j[z] values[z].
Vector utility_gradient(const GameTree& game, const Profile& x, Player i, const Vector& values);
// Same with u_i as the terminal values.
Vector utility_gradient(const GameTree& game, const Profile& x, Player i);

double expected_utility(const GameTree& game, const Profile& x, Player i);
double expected_utility(const GameTree& game, const Profile& x, Player i, const Vector& bonus);
// E_{z~x}[values[z]].
double expected_value(const GameTree& game, const Profile& x, const Vector& values);

struct BestResponse {
  Vector strategy;
  double value = 0.0;
  std::vector<int> actions;  // chosen action per infoset of the player
};

// Maximizes g.x over pure strategies of player p by bottom-up dynamic
// programming. Ties go to the lowest action index.
BestResponse best_response_to_gradient(const GameTree& game, Player p, const Vector& g);

BestResponse best_response(const GameTree& game, const Profile& x, Player i);
BestResponse best_response(const GameTree& game, const Profile& x, Player i, const Vector& bonus);

// max over deviations of player i minus current utility (>= 0 up to rounding).
double deviation_benefit(const GameTree& game, const Profile& x, Player i);
bool is_nash(const GameTree& game, const Profile& x, double tol = 1e-9);

// Samples a terminal by walking the tree with chance and behavioral strategies.
int sample_playout(const GameTree& game, const Profile& x, Rng& rng);

}  // namespace steer
