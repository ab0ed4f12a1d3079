#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace steer {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using Player = int;
inline constexpr Player kChance = -1;

// One sequence-form strategy per player, indexed by player id.
using Profile = std::vector<Vector>;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GameError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// L1 distance between two vectors of the same length.
template <typename A, typename B>
double l1_distance(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: dimension mismatch");
  return (a - b).template lpNorm<1>();
}

}  // namespace steer
