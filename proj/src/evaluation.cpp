#include "steer/evaluation.hpp"

#include "steer/sequence_form.hpp"

#include <fmt/format.h>

#include <numeric>

namespace steer {

namespace {

void check_profile(const GameTree& game, const Profile& x) {
  if (!game.sequence_form_ready()) throw GameError("game has no valid sequence form");
  if (static_cast<int>(x.size()) != game.num_players())
    throw std::invalid_argument(
        fmt::format("profile has {} strategies for {} players", x.size(), game.num_players()));
  for (Player p = 0; p < game.num_players(); ++p)
    if (x[p].size() != game.num_sequences(p))
      throw std::invalid_argument(fmt::format("strategy of player {} has wrong dimension", p));
}

}  // namespace

Vector reach_products(const GameTree& game, const Profile& x, std::span<const Player> players) {
  check_profile(game, x);
  Vector r = Vector::Ones(game.num_terminals());
  for (Player p : players) {
    if (p < 0 || p >= game.num_players())
      throw std::invalid_argument(fmt::format("unknown player {}", p));
    const auto seq = game.terminal_sequences(p);
    for (int z = 0; z < game.num_terminals(); ++z) r[z] *= x[p][seq[z]];
  }
  return r;
}

Vector reach_products(const GameTree& game, const Profile& x) {
  std::vector<Player> all(game.num_players());
  std::iota(all.begin(), all.end(), 0);
  return reach_products(game, x, all);
}

Vector terminal_distribution(const GameTree& game, const Profile& x) {
  return game.chance_reach().cwiseProduct(reach_products(game, x));
}

Vector utility_gradient(const GameTree& game, const Profile& x, Player i, const Vector& values) {
  check_profile(game, x);
  if (values.size() != game.num_terminals())
    throw std::invalid_argument("utility_gradient: values must be indexed by terminals");
  Vector w = game.chance_reach().cwiseProduct(values);
  for (Player j = 0; j < game.num_players(); ++j) {
    if (j == i) continue;
    const auto seq = game.terminal_sequences(j);
    for (int z = 0; z < game.num_terminals(); ++z) w[z] *= x[j][seq[z]];
  }
  Vector g = Vector::Zero(game.num_sequences(i));
  const auto own = game.terminal_sequences(i);
  for (int z = 0; z < game.num_terminals(); ++z) g[own[z]] += w[z];
  return g;
}

Vector utility_gradient(const GameTree& game, const Profile& x, Player i) {
  return utility_gradient(game, x, i, game.utility_vector(i));
}

double expected_value(const GameTree& game, const Profile& x, const Vector& values) {
  return terminal_distribution(game, x).dot(values);
}

double expected_utility(const GameTree& game, const Profile& x, Player i) {
  return expected_value(game, x, game.utility_vector(i));
}

double expected_utility(const GameTree& game, const Profile& x, Player i, const Vector& bonus) {
  return expected_value(game, x, game.utility_vector(i) + bonus);
}

BestResponse best_response_to_gradient(const GameTree& game, Player p, const Vector& g) {
  if (g.size() != game.num_sequences(p))
    throw std::invalid_argument("best_response: gradient dimension mismatch");
  const auto infosets = game.player_infosets(p);
  Vector w = g;
  BestResponse br;
  br.actions.assign(infosets.size(), 0);
  for (std::size_t k = infosets.size(); k-- > 0;) {
    const Infoset& info = game.infoset(infosets[k]);
    int best = 0;
    double value = w[info.first_sequence];
    for (int a = 1; a < static_cast<int>(info.actions.size()); ++a) {
      if (w[info.first_sequence + a] > value + 1e-12) {
        best = a;
        value = w[info.first_sequence + a];
      }
    }
    br.actions[k] = best;
    w[info.parent_sequence] += value;
  }
  br.value = w[0];
  br.strategy = pure_strategy(game, p, br.actions);
  return br;
}

BestResponse best_response(const GameTree& game, const Profile& x, Player i) {
  return best_response_to_gradient(game, i, utility_gradient(game, x, i));
}

BestResponse best_response(const GameTree& game, const Profile& x, Player i, const Vector& bonus) {
  return best_response_to_gradient(game, i,
                                   utility_gradient(game, x, i, game.utility_vector(i) + bonus));
}

double deviation_benefit(const GameTree& game, const Profile& x, Player i) {
  const Vector g = utility_gradient(game, x, i);
  return best_response_to_gradient(game, i, g).value - g.dot(x[i]);
}

bool is_nash(const GameTree& game, const Profile& x, double tol) {
  for (Player i = 0; i < game.num_players(); ++i)
    if (deviation_benefit(game, x, i) > tol) return false;
  return true;
}

int sample_playout(const GameTree& game, const Profile& x, Rng& rng) {
  check_profile(game, x);
  int h = 0;
  while (game.node(h).kind != NodeKind::kTerminal) {
    const Node& node = game.node(h);
    const int k = static_cast<int>(node.children.size());
    double u = uniform01(rng);
    int pick = -1;
    for (int a = 0; a < k; ++a) {
      const double p = node.kind == NodeKind::kChance
                           ? node.chance[a]
                           : behavioral_prob(game, x[node.player], node.infoset, a);
      if (p <= 0.0) continue;
      pick = a;
      if (u < p) break;
      u -= p;
    }
    if (pick < 0) throw GameError(fmt::format("node {} has no action with positive mass", h));
    h = node.children[pick];
  }
  return game.node(h).terminal;
}

}  // namespace steer
