#pragma once

#include "steer/game.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace steer {

struct BenchmarkSpec {
  std::string tag;

  int n = 3;  // lower_bound: number of players

  // battleship
  int rows = 2;
  int cols = 2;
  int shots = 2;
  double ship_value = 1.0;
  double loss_multiplier = 2.0;

  // ridesharing
  int horizon = 2;
  int start1 = 2;  // vertex ids of the map; 2 is the hub drawn with label "3"
  int start2 = 2;

  // sheriff
  int max_load = 1;
  int max_bribe = 2;
  int bribe_rounds = 2;
  double item_value = 5.0;
  double penalty = 1.0;
  double compensation = 1.0;
};

// Tags: stag_hunt, lower_bound, coordination, matching, kuhn3, sheriff,
// battleship, ridesharing. Accepts "lower_bound(4)" style shorthand.
BenchmarkSpec parse_benchmark(std::string_view text);
std::vector<std::string> benchmark_tags();

GameTree build(const BenchmarkSpec& spec);
inline GameTree build(std::string_view text) { return build(parse_benchmark(text)); }

// Canonical pure Nash target, verified by best response. Only for stag_hunt,
// lower_bound and coordination.
Profile target_equilibrium(const BenchmarkSpec& spec, const GameTree& game);

// Ridesharing map: vertex rewards and undirected edges.
inline constexpr std::array<double, 7> kRideRewards{1.0, 0.5, 0.5, 1.5, 4.5, 2.0, 1.5};
inline constexpr std::array<std::array<int, 2>, 10> kRideEdges{
    {{0, 1}, {0, 3}, {1, 2}, {3, 2}, {4, 2}, {3, 6}, {5, 6}, {5, 1}, {2, 5}, {2, 6}}};

}  // namespace steer
