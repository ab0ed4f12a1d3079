#include "steer/benchmarks.hpp"

#include "steer/evaluation.hpp"
#include "steer/sequence_form.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <functional>

namespace steer {

namespace {

using Edge = GameBuilder::Edge;

GameTree stag_hunt() {
  GameBuilder b(2, "stag_hunt");
  const int root = b.chance(GameBuilder::kRoot, {"left", "right"}, {0.5, 0.5});
  const int p2l = b.decision({root, 0}, 1, "P2", {"H", "S"});
  b.terminal({p2l, 0}, {0, 3});
  b.terminal({p2l, 1}, {0, 0});
  const int p1 = b.decision({root, 1}, 0, "P1", {"H", "S"});
  b.terminal({p1, 0}, {3, 0});
  const int p2r = b.decision({p1, 1}, 1, "P2", {"H", "S"});
  b.terminal({p2r, 0}, {0, 0});
  b.terminal({p2r, 1}, {4, 4});
  return std::move(b).build();
}

GameTree lower_bound(int n) {
  if (n < 2) throw ConfigError("lower_bound needs n >= 2");
  GameBuilder b(n, fmt::format("lower_bound({})", n));
  b.keep_raw_utilities();
  std::vector<std::string> labels;
  for (int j = 1; j <= n; ++j) labels.push_back(fmt::format("j={}", j));
  labels.push_back("bot");
  const int root = b.chance(GameBuilder::kRoot, labels,
                            std::vector<double>(n + 1, 1.0 / (n + 1)));
  const auto key = [](int i) { return fmt::format("P{}", i + 1); };
  for (int i = 0; i < n; ++i) {
    const int h = b.decision({root, i}, i, key(i), {"H", "S"});
    std::vector<double> hare(n, 0.0);
    hare[i] = 0.5;
    b.terminal({h, 0}, hare);
    b.terminal({h, 1}, std::vector<double>(n, 0.0));
  }
  std::vector<std::string> starts;
  for (int k = 1; k <= n; ++k) starts.push_back(fmt::format("k={}", k));
  const int pick = b.chance({root, n}, starts, std::vector<double>(n, 1.0 / n));
  for (int k = 0; k < n; ++k) {
    Edge at{pick, k};
    for (int step = 0; step < n; ++step) {
      const int i = (k + step) % n;
      const int h = b.decision(at, i, key(i), {"H", "S"});
      b.terminal({h, 0}, std::vector<double>(n, 0.0));
      at = {h, 1};
    }
    b.terminal(at, std::vector<double>(n, 1.0));
  }
  return std::move(b).build();
}

GameTree two_by_two(const std::string& name, const std::array<std::string, 2>& acts,
                    const std::array<std::array<double, 2>, 4>& payoffs, bool raw) {
  GameBuilder b(2, name);
  if (raw) b.keep_raw_utilities();
  const int p1 = b.decision(GameBuilder::kRoot, 0, "P1", {acts[0], acts[1]});
  for (int a = 0; a < 2; ++a) {
    const int p2 = b.decision({p1, a}, 1, "P2", {acts[0], acts[1]});
    for (int c = 0; c < 2; ++c) {
      const auto& u = payoffs[2 * a + c];
      b.terminal({p2, c}, {u[0], u[1]});
    }
  }
  return std::move(b).build();
}

GameTree kuhn3() {
  GameBuilder b(3, "kuhn3");
  const std::string names = "JQKA";
  std::vector<std::array<int, 3>> deals;
  for (int c0 = 0; c0 < 4; ++c0)
    for (int c1 = 0; c1 < 4; ++c1)
      for (int c2 = 0; c2 < 4; ++c2)
        if (c0 != c1 && c1 != c2 && c0 != c2) deals.push_back({c0, c1, c2});
  std::vector<std::string> labels;
  for (const auto& d : deals) labels.push_back({names[d[0]], names[d[1]], names[d[2]]});
  const int root = b.chance(GameBuilder::kRoot, labels,
                            std::vector<double>(deals.size(), 1.0 / deals.size()));

  for (std::size_t di = 0; di < deals.size(); ++di) {
    const auto& card = deals[di];
    const auto key = [&](int p, const std::string& hist) {
      return fmt::format("P{}:{}:{}", p + 1, names[card[p]], hist);
    };
    // Showdown among `in` players; contributions already include antes.
    const auto payoff = [&](const std::vector<int>& in, const std::array<double, 3>& paid) {
      int winner = in.front();
      for (int p : in)
        if (card[p] > card[winner]) winner = p;
      const double pot = paid[0] + paid[1] + paid[2];
      std::vector<double> u(3);
      for (int p = 0; p < 3; ++p) u[p] = (p == winner ? pot : 0.0) - paid[p];
      return u;
    };
    std::function<void(Edge, std::string, int)> open = [&](Edge at, std::string hist, int p) {
      const int h = b.decision(at, p, key(p, hist), {"check", "bet"});
      if (p == 2) b.terminal({h, 0}, payoff({0, 1, 2}, {1, 1, 1}));
      else open({h, 0}, hist + "p", p + 1);
      // Facing the bet, the other two respond in seat order after the bettor.
      const int r1 = (p + 1) % 3, r2 = (p + 2) % 3;
      const std::string hb = hist + "b";
      const int h1 = b.decision({h, 1}, r1, key(r1, hb), {"fold", "call"});
      for (int a1 = 0; a1 < 2; ++a1) {
        const std::string h1s = hb + (a1 ? "c" : "f");
        const int h2 = b.decision({h1, a1}, r2, key(r2, h1s), {"fold", "call"});
        for (int a2 = 0; a2 < 2; ++a2) {
          std::array<double, 3> paid{1, 1, 1};
          paid[p] += 1;
          std::vector<int> in{p};
          if (a1) {
            paid[r1] += 1;
            in.push_back(r1);
          }
          if (a2) {
            paid[r2] += 1;
            in.push_back(r2);
          }
          b.terminal({h2, a2}, payoff(in, paid));
        }
      }
    };
    open({root, static_cast<int>(di)}, "", 0);
  }
  return std::move(b).build();
}

GameTree sheriff(const BenchmarkSpec& s) {
  if (s.max_load < 0 || s.max_bribe < 0 || s.bribe_rounds < 1)
    throw ConfigError("sheriff: bad parameters");
  GameBuilder b(2, "sheriff");
  std::vector<std::string> loads, bribes;
  for (int n = 0; n <= s.max_load; ++n) loads.push_back(fmt::format("load{}", n));
  for (int x = 0; x <= s.max_bribe; ++x) bribes.push_back(fmt::format("bribe{}", x));
  const int root = b.decision(GameBuilder::kRoot, 0, "S:", loads);
  for (int n = 0; n <= s.max_load; ++n) {
    std::function<void(Edge, std::string, int)> round = [&](Edge at, std::string hist, int r) {
      const int sm = b.decision(at, 0, fmt::format("S:{}:{}", n, hist), bribes);
      for (int x = 0; x <= s.max_bribe; ++x) {
        const std::string hb = hist + std::to_string(x);
        const int sh = b.decision({sm, x}, 1, "Sh:" + hb, {"accept", "decline"});
        if (r + 1 < s.bribe_rounds) {
          round({sh, 0}, hb + "a", r + 1);
          round({sh, 1}, hb + "d", r + 1);
          continue;
        }
        b.terminal({sh, 0}, {s.item_value * n - x, static_cast<double>(x)});
        if (n > 0) b.terminal({sh, 1}, {-s.penalty * n, s.penalty * n});
        else b.terminal({sh, 1}, {s.compensation, -s.compensation});
      }
    };
    round({root, n}, "", 0);
  }
  return std::move(b).build();
}

GameTree battleship(const BenchmarkSpec& s) {
  const int cells = s.rows * s.cols;
  if (cells < 2 || s.shots < 1 || s.shots > cells) throw ConfigError("battleship: bad parameters");
  GameBuilder b(2, "battleship");
  std::vector<std::string> names;
  for (int c = 0; c < cells; ++c) names.push_back(fmt::format("r{}c{}", c / s.cols, c % s.cols));
  const int p1 = b.decision(GameBuilder::kRoot, 0, "P1:place", names);
  for (int ship1 = 0; ship1 < cells; ++ship1) {
    const int p2 = b.decision({p1, ship1}, 1, "P2:place", names);
    for (int ship2 = 0; ship2 < cells; ++ship2) {
      const std::array<int, 2> ship{ship1, ship2};
      // Shots alternate starting with P1; every shot so far was a miss.
      std::function<void(Edge, std::vector<int>)> fire = [&](Edge at, std::vector<int> hist) {
        const int shooter = static_cast<int>(hist.size()) % 2;
        if (static_cast<int>(hist.size()) == 2 * s.shots) {
          b.terminal(at, {0.0, 0.0});
          return;
        }
        std::vector<int> open_cells;
        for (int c = 0; c < cells; ++c) {
          bool used = false;
          for (std::size_t k = shooter; k < hist.size(); k += 2) used = used || hist[k] == c;
          if (!used) open_cells.push_back(c);
        }
        std::string key = fmt::format("P{}:ship{}:", shooter + 1, ship[shooter]);
        for (int c : hist) key += std::to_string(c);
        std::vector<std::string> acts;
        for (int c : open_cells) acts.push_back("fire_" + names[c]);
        const int h = b.decision(at, shooter, key, acts);
        for (std::size_t a = 0; a < open_cells.size(); ++a) {
          const int c = open_cells[a];
          if (c == ship[1 - shooter]) {
            std::vector<double> u(2);
            u[shooter] = s.ship_value;
            u[1 - shooter] = -s.loss_multiplier;
            b.terminal({h, static_cast<int>(a)}, u);
            continue;
          }
          auto next = hist;
          next.push_back(c);
          fire({h, static_cast<int>(a)}, next);
        }
      };
      fire({p2, ship2}, {});
    }
  }
  return std::move(b).build();
}

GameTree ridesharing(const BenchmarkSpec& s) {
  constexpr int kV = static_cast<int>(kRideRewards.size());
  if (s.start1 < 0 || s.start1 >= kV || s.start2 < 0 || s.start2 >= kV || s.horizon < 1)
    throw ConfigError("ridesharing: bad parameters");
  std::array<std::vector<int>, kV> adj;
  for (const auto& e : kRideEdges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  const auto moves = [&](int v) {
    std::vector<std::string> out;
    for (int w : adj[v]) out.push_back(fmt::format("to{}", w));
    return out;
  };

  GameBuilder b(2, "ridesharing");
  const unsigned all = (1u << kV) - 1;
  struct State {
    int pos[2];
    unsigned served;
    int t;
    double reward[2];
    std::string obs[2];  // own moves and the served sets seen so far
  };
  std::function<void(Edge, State)> step = [&](Edge at, State st) {
    if (st.t == s.horizon || st.served == all) {
      b.terminal(at, {st.reward[0], st.reward[1]});
      return;
    }
    const int h1 = b.decision(at, 0, "D1:" + st.obs[0], moves(st.pos[0]));
    for (std::size_t a1 = 0; a1 < adj[st.pos[0]].size(); ++a1) {
      const int h2 = b.decision({h1, static_cast<int>(a1)}, 1, "D2:" + st.obs[1],
                                moves(st.pos[1]));
      for (std::size_t a2 = 0; a2 < adj[st.pos[1]].size(); ++a2) {
        State nx = st;
        const int v1 = adj[st.pos[0]][a1];
        const int v2 = adj[st.pos[1]][a2];
        const bool free1 = !(st.served >> v1 & 1u);
        const bool free2 = !(st.served >> v2 & 1u);
        if (v1 == v2) {
          nx.served |= 1u << v1;  // simultaneous arrival: nobody is paid
        } else {
          if (free1) nx.reward[0] += kRideRewards[v1];
          if (free2) nx.reward[1] += kRideRewards[v2];
          nx.served |= (1u << v1) | (1u << v2);
        }
        nx.pos[0] = v1;
        nx.pos[1] = v2;
        nx.t = st.t + 1;
        nx.obs[0] += fmt::format("{}/{:x};", v1, nx.served);
        nx.obs[1] += fmt::format("{}/{:x};", v2, nx.served);
        step({h2, static_cast<int>(a2)}, nx);
      }
    }
  };
  State init{{s.start1, s.start2}, (1u << s.start1) | (1u << s.start2), 0, {0.0, 0.0}, {}};
  step(GameBuilder::kRoot, init);
  return std::move(b).build();
}

}  // namespace

std::vector<std::string> benchmark_tags() {
  return {"stag_hunt", "lower_bound", "coordination", "matching",
          "kuhn3",     "sheriff",     "battleship",   "ridesharing"};
}

BenchmarkSpec parse_benchmark(std::string_view text) {
  BenchmarkSpec spec;
  const auto open = text.find('(');
  spec.tag = std::string(text.substr(0, open));
  if (open != std::string_view::npos) {
    const auto close = text.find(')', open);
    if (close == std::string_view::npos) throw ConfigError(fmt::format("bad game tag '{}'", text));
    const auto arg = text.substr(open + 1, close - open - 1);
    int n = 0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
    if (ec != std::errc{} || ptr != arg.data() + arg.size() || spec.tag != "lower_bound")
      throw ConfigError(fmt::format("bad game tag '{}'", text));
    spec.n = n;
  }
  const auto tags = benchmark_tags();
  if (std::find(tags.begin(), tags.end(), spec.tag) == tags.end())
    throw ConfigError(fmt::format("unknown game '{}'", spec.tag));
  return spec;
}

GameTree build(const BenchmarkSpec& spec) {
  if (spec.tag == "stag_hunt") return stag_hunt();
  if (spec.tag == "lower_bound") return lower_bound(spec.n);
  if (spec.tag == "coordination")
    return two_by_two("coordination", {"A", "B"}, {{{0.5, 0.5}, {0, 0}, {0, 0}, {1, 1}}}, true);
  if (spec.tag == "matching")
    return two_by_two("matching", {"A", "B"}, {{{1, 1}, {-1, -1}, {-1, -1}, {1, 1}}}, false);
  if (spec.tag == "kuhn3") return kuhn3();
  if (spec.tag == "sheriff") return sheriff(spec);
  if (spec.tag == "battleship") return battleship(spec);
  if (spec.tag == "ridesharing") return ridesharing(spec);
  throw ConfigError(fmt::format("unknown game '{}'", spec.tag));
}

Profile target_equilibrium(const BenchmarkSpec& spec, const GameTree& game) {
  // Every canonical target picks the second action ("S" or "B") everywhere.
  if (spec.tag != "stag_hunt" && spec.tag != "lower_bound" && spec.tag != "coordination")
    throw ConfigError(fmt::format("'{}' has no canonical pure target; solve for one instead",
                                  spec.tag));
  Profile d;
  for (Player p = 0; p < game.num_players(); ++p) {
    std::vector<int> acts(game.player_infosets(p).size(), 1);
    d.push_back(pure_strategy(game, p, acts));
  }
  if (!is_nash(game, d)) throw GameError("canonical target is not a Nash equilibrium");
  return d;
}

}  // namespace steer
