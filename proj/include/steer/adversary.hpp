#pragma once

#include "steer/game.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace steer {

// Payoff tensor of a game in which every player has a single infoset.
// Profiles are flattened with player 0 as the most significant digit.
struct NormalForm {
  std::vector<int> actions;
  std::vector<Vector> payoff;  // payoff[i][profile]

  int num_players() const { return static_cast<int>(actions.size()); }
  int num_profiles() const;
  int index(const std::vector<int>& a) const;
  std::vector<int> profile(int index) const;
};

using MixedProfile = std::vector<Vector>;  // per-player action distributions

struct NoEquilibrium : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Normal form of a single-infoset-per-player tree; `extra(i, a)` is added to
// player i's payoff at pure profile a (payments of the current round).
NormalForm normal_form(const GameTree& game);
NormalForm normal_form(const GameTree& game,
                       const std::function<double(Player, const std::vector<int>&)>& extra);

// Conversions between action distributions and sequence-form strategies.
Profile to_profile(const GameTree& game, const MixedProfile& m);
MixedProfile to_mixed(const GameTree& game, const Profile& x);

double nf_utility(const NormalForm& g, Player i, const MixedProfile& m);
// max_a u_i(a, m_-i) - u_i(m)
double nf_deviation_benefit(const NormalForm& g, Player i, const MixedProfile& m);
bool nf_is_nash(const NormalForm& g, const MixedProfile& m, double tol = 1e-9);

std::vector<std::vector<int>> pure_equilibria(const NormalForm& g, double tol = 1e-12);
MixedProfile pure_mixed(const NormalForm& g, const std::vector<int>& a);

// Support enumeration. Complete for two players; for three players only when
// every player has two actions. Throws NoEquilibrium otherwise or when nothing
// is found.
std::vector<MixedProfile> mixed_equilibria(const NormalForm& g, double tol = 1e-9);

// An equilibrium, pure if one exists (first in lexicographic order).
MixedProfile any_equilibrium(const NormalForm& g);

// The strategy rules used in the impossibility proofs. Players compute the
// one-shot game including this round's payments and play an equilibrium of it.
struct AdversaryPolicy {
  std::optional<std::vector<int>> preferred;  // played whenever it is an equilibrium
  int warmup_rounds = 0;                      // before this, any equilibrium
  // After warmup, when `preferred` is not an equilibrium, play the pure
  // profile collecting the largest total payment instead.
  bool grab_payments = false;
};

class EquilibriumAdversary {
 public:
  explicit EquilibriumAdversary(AdversaryPolicy policy) : policy_(std::move(policy)) {}

  // `round` is 1-based. `payments` holds the payment part of `game` alone and
  // is only consulted when grab_payments is set.
  MixedProfile choose(int round, const NormalForm& game, const NormalForm* payments = nullptr) const;

  const AdversaryPolicy& policy() const { return policy_; }

 private:
  AdversaryPolicy policy_;
};

}  // namespace steer
