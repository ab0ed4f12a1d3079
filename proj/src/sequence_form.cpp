#include "steer/sequence_form.hpp"

#include <fmt/format.h>

#include <cmath>

namespace steer {

Vector from_behavioral(const GameTree& game, Player p,
                       const std::function<Vector(int infoset)>& policy) {
  Vector x = Vector::Zero(game.num_sequences(p));
  x[0] = 1.0;
  for (int I : game.player_infosets(p)) {
    const Infoset& info = game.infoset(I);
    const Vector pi = policy(I);
    for (std::size_t a = 0; a < info.actions.size(); ++a)
      x[info.first_sequence + static_cast<int>(a)] = x[info.parent_sequence] * pi[a];
  }
  return x;
}

Vector uniform_strategy(const GameTree& game, Player p) {
  return from_behavioral(game, p, [&](int I) {
    const auto k = static_cast<Eigen::Index>(game.infoset(I).actions.size());
    return Vector(Vector::Constant(k, 1.0 / static_cast<double>(k)));
  });
}

Profile uniform_profile(const GameTree& game) {
  Profile x;
  for (Player p = 0; p < game.num_players(); ++p) x.push_back(uniform_strategy(game, p));
  return x;
}

Vector pure_strategy(const GameTree& game, Player p, std::span<const int> actions) {
  const auto infosets = game.player_infosets(p);
  if (actions.size() != infosets.size())
    throw std::invalid_argument("pure_strategy: one action per infoset required");
  Vector x = Vector::Zero(game.num_sequences(p));
  x[0] = 1.0;
  for (std::size_t k = 0; k < infosets.size(); ++k) {
    const Infoset& info = game.infoset(infosets[k]);
    x[info.first_sequence + actions[k]] = x[info.parent_sequence];
  }
  return x;
}

double behavioral_prob(const GameTree& game, const Vector& x, int infoset, int action) {
  const Infoset& info = game.infoset(infoset);
  const double m = x[info.parent_sequence];
  if (m <= 0.0) return 1.0 / static_cast<double>(info.actions.size());
  return x[info.first_sequence + action] / m;
}

std::vector<std::string> strategy_violations(const GameTree& game, Player p, const Vector& x,
                                             double tol) {
  std::vector<std::string> out;
  if (x.size() != game.num_sequences(p)) {
    out.push_back(fmt::format("strategy has {} entries, player {} has {} sequences", x.size(), p,
                              game.num_sequences(p)));
    return out;
  }
  if (std::abs(x[0] - 1.0) > tol) out.push_back(fmt::format("empty-sequence mass {}", x[0]));
  for (Eigen::Index s = 0; s < x.size(); ++s)
    if (!(x[s] >= -tol && x[s] <= 1.0 + tol))
      out.push_back(fmt::format("sequence {} has mass {}", s, x[s]));
  for (int I : game.player_infosets(p)) {
    const Infoset& info = game.infoset(I);
    const auto k = static_cast<Eigen::Index>(info.actions.size());
    const double sum = x.segment(info.first_sequence, k).sum();
    if (std::abs(sum - x[info.parent_sequence]) > tol)
      out.push_back(fmt::format("infoset {}: children sum {} != parent {}", info.key, sum,
                                x[info.parent_sequence]));
  }
  return out;
}

bool is_valid_strategy(const GameTree& game, Player p, const Vector& x, double tol) {
  return strategy_violations(game, p, x, tol).empty();
}

bool is_pure_strategy(const GameTree& game, Player p, const Vector& x, double tol) {
  if (!is_valid_strategy(game, p, x, tol)) return false;
  for (Eigen::Index s = 0; s < x.size(); ++s)
    if (std::abs(x[s]) > tol && std::abs(x[s] - 1.0) > tol) return false;
  return true;
}

std::vector<Vector> enumerate_pure_strategies(const GameTree& game, Player p, std::size_t limit) {
  const auto infosets = game.player_infosets(p);
  std::vector<Vector> out;
  Vector x = Vector::Zero(game.num_sequences(p));
  x[0] = 1.0;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == infosets.size()) {
      if (out.size() >= limit)
        throw std::length_error(fmt::format("player {} has more than {} pure strategies", p, limit));
      out.push_back(x);
      return;
    }
    const Infoset& info = game.infoset(infosets[k]);
    if (x[info.parent_sequence] == 0.0) {
      rec(k + 1);
      return;
    }
    for (std::size_t a = 0; a < info.actions.size(); ++a) {
      x[info.first_sequence + static_cast<int>(a)] = 1.0;
      rec(k + 1);
      x[info.first_sequence + static_cast<int>(a)] = 0.0;
    }
  };
  rec(0);
  return out;
}

double count_pure_strategies(const GameTree& game, Player p) {
  // count(s) = prod over child infosets I of s of sum_a count(s_a).
  std::vector<double> count(game.num_sequences(p), 1.0);
  const auto infosets = game.player_infosets(p);
  for (auto it = infosets.rbegin(); it != infosets.rend(); ++it) {
    const Infoset& info = game.infoset(*it);
    double sum = 0.0;
    for (std::size_t a = 0; a < info.actions.size(); ++a)
      sum += count[info.first_sequence + static_cast<int>(a)];
    count[info.parent_sequence] *= sum;
  }
  return count[0];
}

}  // namespace steer
