#pragma once

#include "steer/game.hpp"
#include "steer/learners.hpp"

#include <functional>
#include <string>
#include <vector>

namespace testgames {

using steer::GameBuilder;
using steer::GameTree;
using steer::Player;

// Simultaneous-move game with `n` players choosing among `k` actions; nobody
// observes anyone. Utilities are stored raw.
inline GameTree matrix_game(int n, int k, const std::function<std::vector<double>(const std::vector<int>&)>& u) {
  GameBuilder b(n, "matrix");
  std::vector<std::string> acts;
  for (int a = 0; a < k; ++a) acts.push_back(std::string(1, char('A' + a)));
  std::function<void(GameBuilder::Edge, std::vector<int>)> grow = [&](GameBuilder::Edge at,
                                                                      std::vector<int> prefix) {
    if (static_cast<int>(prefix.size()) == n) {
      b.terminal(at, u(prefix));
      return;
    }
    const int id = b.decision(at, static_cast<Player>(prefix.size()), "P" + std::to_string(prefix.size()), acts);
    for (int a = 0; a < k; ++a) {
      auto next = prefix;
      next.push_back(a);
      grow({id, a}, next);
    }
  };
  grow(GameBuilder::kRoot, {});
  b.keep_raw_utilities();
  return std::move(b).build();
}

// Plays a fixed strategy forever.
class StaticLearner : public steer::Learner {
 public:
  StaticLearner(const GameTree& game, Player p, steer::Vector x) : Learner(game, p), x_(std::move(x)) {}
  const steer::Vector& strategy() const override { return x_; }
  void observe(const steer::Feedback&) override { ++rounds_; }
  steer::Vector average_strategy() const override { return x_; }
  std::string name() const override { return "static"; }
  double regret_bound(double, double) const override { return 0.0; }

 private:
  steer::Vector x_;
};

inline std::vector<std::unique_ptr<steer::Learner>> static_learners(const GameTree& g, const steer::Profile& x) {
  std::vector<std::unique_ptr<steer::Learner>> out;
  for (Player p = 0; p < g.num_players(); ++p) out.push_back(std::make_unique<StaticLearner>(g, p, x[p]));
  return out;
}

}  // namespace testgames
