#pragma once

#include "steer/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace steer {

enum class NodeKind : std::uint8_t { kChance, kDecision, kTerminal };

struct Node {
  NodeKind kind = NodeKind::kTerminal;
  Player player = kChance;
  int infoset = -1;
  int parent = -1;
  int parent_action = -1;
  std::vector<int> children;
  std::vector<double> chance;               // chance nodes only
  std::vector<std::string> chance_actions;  // chance nodes only
  int terminal = -1;
};

struct Infoset {
  Player player = 0;
  std::string key;
  std::vector<std::string> actions;
  std::vector<int> nodes;
  int parent_sequence = 0;
  int first_sequence = -1;  // sequence of action a is first_sequence + a
};

// Raw payoff = scale * stored utility + offset.
struct Normalization {
  double scale = 1.0;
  double offset = 0.0;
  double raw(double u) const { return scale * u + offset; }
};

// Immutable extensive-form game. Nodes and terminals are stored in depth-first
// order; infosets are numbered by first appearance in that order, so parents
// precede children for every player.
class GameTree {
 public:
  int num_players() const { return num_players_; }
  const std::string& name() const { return name_; }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const Node& node(int id) const { return nodes_[id]; }
  std::span<const Node> nodes() const { return nodes_; }

  int num_terminals() const { return static_cast<int>(terminal_nodes_.size()); }
  int terminal_node(int z) const { return terminal_nodes_[z]; }
  double utility(int z, Player i) const { return utilities_(z, i); }
  const Matrix& utilities() const { return utilities_; }  // |Z| x n
  Vector utility_vector(Player i) const { return utilities_.col(i); }
  const Vector& chance_reach() const { return chance_reach_; }

  int num_infosets() const { return static_cast<int>(infosets_.size()); }
  const Infoset& infoset(int id) const { return infosets_[id]; }
  std::span<const int> player_infosets(Player p) const { return player_infosets_[p]; }

  // Sequence form is available only when every infoset is consistent and the
  // game has perfect recall.
  bool sequence_form_ready() const { return sequence_form_ready_; }
  int num_sequences(Player p) const { return static_cast<int>(sequence_infoset_[p].size()); }
  int terminal_sequence(Player p, int z) const { return terminal_sequence_[p][z]; }
  std::span<const int> terminal_sequences(Player p) const { return terminal_sequence_[p]; }
  // Infoset owning a sequence, -1 for the empty sequence.
  int sequence_infoset(Player p, int s) const { return sequence_infoset_[p][s]; }
  int sequence_action(Player p, int s) const;
  // Mask of sequences that end some terminal history (the set Σ_i).
  const std::vector<bool>& relevant_sequences(Player p) const { return relevant_[p]; }
  std::string sequence_label(Player p, int s) const;

  const Normalization& normalization() const { return normalization_; }

 private:
  friend class GameBuilder;
  void finalize();

  int num_players_ = 0;
  std::string name_;
  std::vector<Node> nodes_;
  std::vector<int> terminal_nodes_;
  Matrix utilities_;
  Vector chance_reach_;
  std::vector<Infoset> infosets_;
  std::vector<std::vector<int>> player_infosets_;
  bool sequence_form_ready_ = false;
  std::vector<std::vector<int>> sequence_infoset_;
  std::vector<std::vector<int>> terminal_sequence_;
  std::vector<std::vector<bool>> relevant_;
  Normalization normalization_;
};

// Attachment point: child `action` of `node`; node -1 means the root.
struct TreeEdge {
  int node = -1;
  int action = -1;
};

// Incremental construction. Nodes may be created in any order; build()
// renumbers everything depth-first.
class GameBuilder {
 public:
  using Edge = TreeEdge;
  static constexpr Edge kRoot{};

  GameBuilder(int num_players, std::string name);

  int chance(Edge at, std::vector<std::string> actions, std::vector<double> probs);
  int decision(Edge at, Player player, const std::string& infoset_key,
               std::vector<std::string> actions);
  int terminal(Edge at, std::vector<double> utilities);

  // Rescale utilities at build time: stored = (raw - offset) / scale. Without
  // this call, build() maps [min, max] of all payoffs onto [0, 1].
  void set_normalization(Normalization n) { normalization_ = n; explicit_norm_ = true; }
  void keep_raw_utilities() { set_normalization({}); }

  GameTree build() &&;

 private:
  struct Proto {
    NodeKind kind = NodeKind::kTerminal;
    Player player = kChance;
    std::string key;
    std::vector<std::string> actions;
    std::vector<double> chance;
    std::vector<double> utilities;
    std::vector<int> children;
  };
  int attach(Edge at, Proto p);

  int num_players_;
  std::string name_;
  std::vector<Proto> protos_;
  int root_ = -1;
  Normalization normalization_;
  bool explicit_norm_ = false;
};

// Empty iff the game satisfies all structural invariants.
std::vector<std::string> validate(const GameTree& game);

}  // namespace steer
