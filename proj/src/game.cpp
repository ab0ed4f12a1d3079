#include "steer/game.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <utility>

namespace steer {

int GameTree::sequence_action(Player p, int s) const {
  const int I = sequence_infoset_[p][s];
  return I < 0 ? -1 : s - infosets_[I].first_sequence;
}

std::string GameTree::sequence_label(Player p, int s) const {
  const int I = sequence_infoset_[p][s];
  if (I < 0) return "<empty>";
  const Infoset& info = infosets_[I];
  return info.key + ":" + info.actions[s - info.first_sequence];
}

void GameTree::finalize() {
  sequence_form_ready_ = false;
  player_infosets_.assign(num_players_, {});
  for (int I = 0; I < num_infosets(); ++I) player_infosets_[infosets_[I].player].push_back(I);

  for (const Infoset& info : infosets_)
    for (int h : info.nodes)
      if (nodes_[h].children.size() != info.actions.size()) return;

  sequence_infoset_.assign(num_players_, std::vector<int>{-1});
  for (Player p = 0; p < num_players_; ++p) {
    for (int I : player_infosets_[p]) {
      Infoset& info = infosets_[I];
      info.first_sequence = static_cast<int>(sequence_infoset_[p].size());
      info.parent_sequence = -1;
      sequence_infoset_[p].insert(sequence_infoset_[p].end(), info.actions.size(), I);
    }
  }

  terminal_sequence_.assign(num_players_, std::vector<int>(num_terminals(), 0));
  std::vector<int> current(num_players_, 0);
  std::vector<char> on_path(infosets_.size(), 0);
  bool recall = true;
  std::function<void(int)> walk = [&](int h) {
    const Node& node = nodes_[h];
    if (node.kind == NodeKind::kTerminal) {
      for (Player p = 0; p < num_players_; ++p) terminal_sequence_[p][node.terminal] = current[p];
      return;
    }
    if (node.kind == NodeKind::kChance) {
      for (int c : node.children) walk(c);
      return;
    }
    Infoset& info = infosets_[node.infoset];
    const Player p = node.player;
    if (on_path[node.infoset]) recall = false;
    if (info.parent_sequence < 0) info.parent_sequence = current[p];
    else if (info.parent_sequence != current[p]) recall = false;
    on_path[node.infoset] = 1;
    const int saved = current[p];
    for (std::size_t a = 0; a < node.children.size(); ++a) {
      current[p] = info.first_sequence + static_cast<int>(a);
      walk(node.children[a]);
    }
    current[p] = saved;
    on_path[node.infoset] = 0;
  };
  walk(0);
  if (!recall) return;

  relevant_.assign(num_players_, {});
  for (Player p = 0; p < num_players_; ++p) {
    relevant_[p].assign(sequence_infoset_[p].size(), false);
    for (int s : terminal_sequence_[p]) relevant_[p][s] = true;
  }
  sequence_form_ready_ = true;
}

GameBuilder::GameBuilder(int num_players, std::string name)
    : num_players_(num_players), name_(std::move(name)) {
  if (num_players < 1) throw GameError("game needs at least one player");
}

int GameBuilder::attach(Edge at, Proto p) {
  const int id = static_cast<int>(protos_.size());
  if (at.node < 0) {
    if (root_ >= 0) throw GameError("root already set");
    root_ = id;
  } else {
    if (at.node >= id) throw GameError(fmt::format("unknown parent node {}", at.node));
    auto& slots = protos_[at.node].children;
    if (at.action < 0 || at.action >= static_cast<int>(slots.size()))
      throw GameError(fmt::format("node {} has no action {}", at.node, at.action));
    if (slots[at.action] >= 0)
      throw GameError(fmt::format("node {} action {} already attached", at.node, at.action));
    slots[at.action] = id;
  }
  protos_.push_back(std::move(p));
  return id;
}

int GameBuilder::chance(Edge at, std::vector<std::string> actions, std::vector<double> probs) {
  if (actions.empty()) throw GameError("chance node without actions");
  Proto p;
  p.kind = NodeKind::kChance;
  p.children.assign(actions.size(), -1);
  p.actions = std::move(actions);
  p.chance = std::move(probs);
  return attach(at, std::move(p));
}

int GameBuilder::decision(Edge at, Player player, const std::string& infoset_key,
                          std::vector<std::string> actions) {
  if (player < 0 || player >= num_players_)
    throw GameError(fmt::format("decision node for unknown player {}", player));
  if (actions.empty()) throw GameError("decision node without actions");
  Proto p;
  p.kind = NodeKind::kDecision;
  p.player = player;
  p.key = infoset_key;
  p.children.assign(actions.size(), -1);
  p.actions = std::move(actions);
  return attach(at, std::move(p));
}

int GameBuilder::terminal(Edge at, std::vector<double> utilities) {
  if (static_cast<int>(utilities.size()) != num_players_)
    throw GameError(fmt::format("terminal needs {} utilities, got {}", num_players_,
                                utilities.size()));
  Proto p;
  p.kind = NodeKind::kTerminal;
  p.utilities = std::move(utilities);
  return attach(at, std::move(p));
}

GameTree GameBuilder::build() && {
  if (root_ < 0) throw GameError("game has no root");
  for (std::size_t i = 0; i < protos_.size(); ++i)
    for (std::size_t a = 0; a < protos_[i].children.size(); ++a)
      if (protos_[i].children[a] < 0)
        throw GameError(fmt::format("node {} action {} has no child", i, a));

  if (!explicit_norm_) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const Proto& p : protos_)
      for (double u : p.utilities) {
        lo = std::min(lo, u);
        hi = std::max(hi, u);
      }
    normalization_.offset = std::isfinite(lo) ? lo : 0.0;
    normalization_.scale = (std::isfinite(hi) && hi > lo) ? hi - lo : 1.0;
  }

  GameTree g;
  g.num_players_ = num_players_;
  g.name_ = name_;
  g.normalization_ = normalization_;
  g.nodes_.reserve(protos_.size());

  std::map<std::pair<Player, std::string>, int> infoset_ids;
  std::vector<std::vector<double>> utils;
  std::vector<double> reach;

  struct Frame {
    int proto, parent, action;
    double reach;
  };
  std::vector<Frame> stack{{root_, -1, -1, 1.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    Proto& p = protos_[f.proto];
    const int id = static_cast<int>(g.nodes_.size());
    Node node;
    node.kind = p.kind;
    node.player = p.player;
    node.parent = f.parent;
    node.parent_action = f.action;
    node.children.assign(p.children.size(), -1);
    if (f.parent >= 0) g.nodes_[f.parent].children[f.action] = id;

    if (p.kind == NodeKind::kTerminal) {
      node.terminal = static_cast<int>(g.terminal_nodes_.size());
      g.terminal_nodes_.push_back(id);
      std::vector<double> u = std::move(p.utilities);
      for (double& x : u) x = (x - normalization_.offset) / normalization_.scale;
      utils.push_back(std::move(u));
      reach.push_back(f.reach);
    } else if (p.kind == NodeKind::kChance) {
      node.chance = p.chance;
      node.chance_actions = std::move(p.actions);
    } else {
      auto [it, fresh] = infoset_ids.try_emplace({p.player, p.key}, g.num_infosets());
      if (fresh) {
        Infoset info;
        info.player = p.player;
        info.key = p.key;
        info.actions = std::move(p.actions);
        g.infosets_.push_back(std::move(info));
      }
      node.infoset = it->second;
      g.infosets_[it->second].nodes.push_back(id);
    }
    g.nodes_.push_back(std::move(node));

    for (int a = static_cast<int>(p.children.size()) - 1; a >= 0; --a) {
      double r = f.reach;
      if (p.kind == NodeKind::kChance)
        r *= a < static_cast<int>(p.chance.size()) ? p.chance[a] : 0.0;
      stack.push_back({p.children[a], id, a, r});
    }
  }

  g.utilities_.resize(static_cast<Eigen::Index>(utils.size()), num_players_);
  for (std::size_t z = 0; z < utils.size(); ++z)
    for (int i = 0; i < num_players_; ++i) g.utilities_(z, i) = utils[z][i];
  g.chance_reach_ = Eigen::Map<const Vector>(reach.data(), static_cast<Eigen::Index>(reach.size()));
  g.finalize();
  return g;
}

std::vector<std::string> validate(const GameTree& game) {
  std::vector<std::string> out;
  for (int h = 0; h < game.num_nodes(); ++h) {
    const Node& node = game.node(h);
    if (node.kind != NodeKind::kChance) continue;
    if (node.chance.size() != node.children.size()) {
      out.push_back(fmt::format("node {}: chance law has {} entries for {} actions", h,
                                node.chance.size(), node.children.size()));
      continue;
    }
    double sum = 0.0;
    bool negative = false;
    for (double p : node.chance) {
      sum += p;
      negative = negative || !(p >= 0.0);
    }
    if (negative) out.push_back(fmt::format("node {}: negative chance probability", h));
    if (!(std::abs(sum - 1.0) <= 1e-12))
      out.push_back(fmt::format("node {}: chance law not normalized (sum {})", h, sum));
  }

  bool consistent = true;
  for (int I = 0; I < game.num_infosets(); ++I) {
    const Infoset& info = game.infoset(I);
    for (int h : info.nodes) {
      if (game.node(h).children.size() != info.actions.size()) {
        out.push_back(fmt::format("infoset {} (player {}): node {} has {} actions, expected {}",
                                  info.key, info.player, h, game.node(h).children.size(),
                                  info.actions.size()));
        consistent = false;
        break;
      }
    }
  }

  // Perfect recall, checked on (infoset, action) chains independently of the
  // sequence numbering.
  if (consistent) {
    using Step = std::pair<int, int>;
    std::vector<Step> first_seen(game.num_infosets(), Step{-2, -2});
    std::vector<Step> last(game.num_players(), Step{-1, -1});
    std::vector<char> on_path(game.num_infosets(), 0);
    std::vector<char> reported(game.num_infosets(), 0);
    std::function<void(int)> walk = [&](int h) {
      const Node& node = game.node(h);
      if (node.kind == NodeKind::kTerminal) return;
      if (node.kind == NodeKind::kChance) {
        for (int c : node.children) walk(c);
        return;
      }
      const int I = node.infoset;
      const Player p = node.player;
      bool bad = on_path[I] != 0;
      if (first_seen[I].first == -2) first_seen[I] = last[p];
      else if (first_seen[I] != last[p]) bad = true;
      if (bad && !reported[I]) {
        out.push_back(fmt::format("infoset {} (player {}): perfect recall violated",
                                  game.infoset(I).key, p));
        reported[I] = 1;
      }
      on_path[I] = 1;
      const Step saved = last[p];
      for (std::size_t a = 0; a < node.children.size(); ++a) {
        last[p] = {I, static_cast<int>(a)};
        walk(node.children[a]);
      }
      last[p] = saved;
      on_path[I] = 0;
    };
    if (game.num_nodes() > 0) walk(0);
  }

  for (int z = 0; z < game.num_terminals(); ++z)
    for (int i = 0; i < game.num_players(); ++i) {
      const double u = game.utility(z, i);
      if (!(u >= -1e-12 && u <= 1.0 + 1e-12))
        out.push_back(fmt::format("terminal {}: utility {} of player {} outside [0,1]", z, u, i));
    }
  return out;
}

}  // namespace steer
