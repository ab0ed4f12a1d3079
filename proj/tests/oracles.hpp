#pragma once

// Brute-force reference computations used by the tests. They walk the tree
// directly and never touch the sequence-form machinery under test.

#include "steer/game.hpp"

#include <functional>
#include <vector>

namespace oracle {

using steer::GameTree;
using steer::Node;
using steer::NodeKind;
using steer::Vector;

// Behavior: player -> infoset -> action distribution.
using Behavior = std::vector<std::vector<std::vector<double>>>;

// Behavior from sequence-form vectors by ratio of child to parent mass,
// recomputed from the tree (parent sequence found by walking up).
inline Behavior behavior_from_profile(const GameTree& g, const steer::Profile& x) {
  Behavior b(g.num_players());
  for (int p = 0; p < g.num_players(); ++p) b[p].resize(g.num_infosets());
  for (int I = 0; I < g.num_infosets(); ++I) {
    const auto& info = g.infoset(I);
    const int p = info.player;
    // parent mass: find the last own (infoset, action) above the first node
    int h = info.nodes.front();
    double parent = 1.0;
    for (int c = h, up = g.node(h).parent; up >= 0; c = up, up = g.node(up).parent) {
      const Node& n = g.node(up);
      if (n.kind == NodeKind::kDecision && n.player == p) {
        const auto& pi = g.infoset(n.infoset);
        parent = x[p][pi.first_sequence + g.node(c).parent_action];
        break;
      }
    }
    const int k = static_cast<int>(info.actions.size());
    b[p][I].resize(k);
    for (int a = 0; a < k; ++a)
      b[p][I][a] = parent > 0 ? x[p][info.first_sequence + a] / parent : 1.0 / k;
  }
  return b;
}

// Pr[z] by recursive walk.
inline Vector distribution(const GameTree& g, const Behavior& b) {
  Vector out = Vector::Zero(g.num_terminals());
  std::function<void(int, double)> walk = [&](int h, double pr) {
    const Node& n = g.node(h);
    if (n.kind == NodeKind::kTerminal) {
      out[n.terminal] += pr;
      return;
    }
    for (std::size_t a = 0; a < n.children.size(); ++a) {
      const double q = n.kind == NodeKind::kChance ? n.chance[a] : b[n.player][n.infoset][a];
      walk(n.children[a], pr * q);
    }
  };
  walk(0, 1.0);
  return out;
}

// Reach of z through the chosen players only (chance and others ignored).
inline Vector reach(const GameTree& g, const Behavior& b, const std::vector<int>& players) {
  Vector out = Vector::Zero(g.num_terminals());
  std::vector<char> in(g.num_players(), 0);
  for (int p : players) in[p] = 1;
  std::function<void(int, double)> walk = [&](int h, double pr) {
    const Node& n = g.node(h);
    if (n.kind == NodeKind::kTerminal) {
      out[n.terminal] = pr;
      return;
    }
    for (std::size_t a = 0; a < n.children.size(); ++a) {
      double q = 1.0;
      if (n.kind == NodeKind::kDecision && in[n.player]) q = b[n.player][n.infoset][a];
      walk(n.children[a], pr * q);
    }
  };
  walk(0, 1.0);
  return out;
}

// Every full pure plan of player p (one action per infoset, reachable or not),
// as a behavior row; calls f for each.
inline void for_each_plan(const GameTree& g, int p,
                          const std::function<void(const std::vector<std::vector<double>>&)>& f) {
  std::vector<int> mine;
  for (int I = 0; I < g.num_infosets(); ++I)
    if (g.infoset(I).player == p) mine.push_back(I);
  std::vector<std::vector<double>> rows(g.num_infosets());
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == mine.size()) {
      f(rows);
      return;
    }
    const int I = mine[k];
    const std::size_t na = g.infoset(I).actions.size();
    for (std::size_t a = 0; a < na; ++a) {
      rows[I].assign(na, 0.0);
      rows[I][a] = 1.0;
      rec(k + 1);
    }
  };
  rec(0);
}

inline double num_plans(const GameTree& g, int p) {
  double n = 1;
  for (int I = 0; I < g.num_infosets(); ++I)
    if (g.infoset(I).player == p) n *= static_cast<double>(g.infoset(I).actions.size());
  return n;
}

// max over pure plans of player p of E[u_p + bonus] with others fixed.
inline double best_value(const GameTree& g, const Behavior& b, int p, const Vector& values) {
  double best = -1e300;
  Behavior mod = b;
  for_each_plan(g, p, [&](const std::vector<std::vector<double>>& rows) {
    for (int I = 0; I < g.num_infosets(); ++I)
      if (g.infoset(I).player == p) mod[p][I] = rows[I];
    best = std::max(best, distribution(g, mod).dot(values));
  });
  return best;
}

// 1 on terminals where every decision of player p on the path takes an
// action that d plays with probability one.
inline Vector follows(const GameTree& g, const Behavior& d, int p) {
  Vector out = Vector::Zero(g.num_terminals());
  std::function<void(int, bool)> walk = [&](int h, bool ok) {
    const Node& n = g.node(h);
    if (n.kind == NodeKind::kTerminal) {
      out[n.terminal] = ok ? 1.0 : 0.0;
      return;
    }
    for (std::size_t a = 0; a < n.children.size(); ++a) {
      bool next = ok;
      if (n.kind == NodeKind::kDecision && n.player == p) next = ok && d[p][n.infoset][a] == 1.0;
      walk(n.children[a], next);
    }
  };
  walk(0, true);
  return out;
}

}  // namespace oracle
