#include <doctest.h>

#include "steer/benchmarks.hpp"
#include "steer/evaluation.hpp"
#include "steer/sequence_form.hpp"

#include <functional>
#include <set>

using namespace steer;

namespace {

// Rule-level terminal counts, written from the game descriptions alone.

int kuhn3_sequences() {
  // Open round: each seat may check or bet; once a bet is made the other two
  // seats each fold or call.
  int count = 1;           // check, check, check
  count += 3 * 2 * 2;      // bettor in any seat, two responders
  return count;
}

int sheriff_terminals(int loads, int bribes, int rounds) {
  int per_round = bribes * 2;
  int total = loads;
  for (int r = 0; r < rounds; ++r) total *= per_round;
  return total;
}

int battleship_terminals(int cells, int shots) {
  int total = 0;
  for (int s1 = 0; s1 < cells; ++s1)
    for (int s2 = 0; s2 < cells; ++s2) {
      std::function<int(int, std::vector<std::set<int>>)> go = [&](int k,
                                                                  std::vector<std::set<int>> fired) {
        if (k == 2 * shots) return 1;
        const int shooter = k % 2;
        const int target = shooter == 0 ? s2 : s1;
        int n = 0;
        for (int c = 0; c < cells; ++c) {
          if (fired[shooter].count(c)) continue;
          if (c == target) {
            ++n;
            continue;
          }
          auto next = fired;
          next[shooter].insert(c);
          n += go(k + 1, next);
        }
        return n;
      };
      total += go(0, {{}, {}});
    }
  return total;
}

int ridesharing_terminals(int start1, int start2, int horizon) {
  std::vector<std::vector<int>> adj(7);
  for (const auto& e : kRideEdges) {
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  std::function<int(int, int, unsigned, int)> go = [&](int a, int b, unsigned served, int t) {
    if (t == horizon || served == 127u) return 1;
    int n = 0;
    for (int x : adj[a])
      for (int y : adj[b]) n += go(x, y, served | (1u << x) | (1u << y), t + 1);
    return n;
  };
  return go(start1, start2, (1u << start1) | (1u << start2), 0);
}

double welfare(const GameTree& g, const Profile& x) {
  double w = 0;
  for (Player i = 0; i < g.num_players(); ++i) w += expected_utility(g, x, i);
  return w;
}

Profile constant_profile(const GameTree& g, int action) {
  Profile x;
  for (Player p = 0; p < g.num_players(); ++p)
    x.push_back(pure_strategy(g, p, std::vector<int>(g.player_infosets(p).size(), action)));
  return x;
}

}  // namespace

TEST_CASE("every benchmark validates") {
  for (const auto& tag : benchmark_tags()) {
    CAPTURE(tag);
    CHECK(validate(build(tag)).empty());
  }
}

TEST_CASE("terminal counts match rule-level enumeration") {
  CHECK(build("kuhn3").num_terminals() == 24 * kuhn3_sequences());
  CHECK(build("sheriff").num_terminals() == sheriff_terminals(2, 3, 2));
  CHECK(build("battleship").num_terminals() == battleship_terminals(4, 2));
  CHECK(build("ridesharing").num_terminals() == ridesharing_terminals(2, 2, 2));
  BenchmarkSpec r = parse_benchmark("ridesharing");
  r.start1 = 0;
  r.start2 = 4;
  CHECK(build(r).num_terminals() == ridesharing_terminals(0, 4, 2));
}

TEST_CASE("lower bound game welfare and equilibria") {
  for (int n = 2; n <= 6; ++n) {
    CAPTURE(n);
    BenchmarkSpec spec = parse_benchmark("lower_bound");
    spec.n = n;
    const GameTree g = build(spec);
    const Profile stag = constant_profile(g, 1);
    const Profile hare = constant_profile(g, 0);
    CHECK(welfare(g, stag) == doctest::Approx(double(n) / (n + 1)).epsilon(1e-12));
    CHECK(welfare(g, hare) == doctest::Approx(0.5 * n / (n + 1)).epsilon(1e-12));
    CHECK(is_nash(g, hare));
    CHECK(is_nash(g, stag));
    const Profile d = target_equilibrium(spec, g);
    for (Player p = 0; p < n; ++p) CHECK(d[p] == stag[p]);
  }
  CHECK_THROWS_AS(build("lower_bound(1)"), ConfigError);
}

TEST_CASE("coordination and matching payoffs") {
  const GameTree c = build("coordination");
  // terminals in order (A,A), (A,B), (B,A), (B,B)
  const double cu[4] = {0.5, 0, 0, 1};
  for (int z = 0; z < 4; ++z) {
    CHECK(c.utility(z, 0) == cu[z]);
    CHECK(c.utility(z, 1) == cu[z]);
  }
  const GameTree m = build("matching");
  const double mu[4] = {1, -1, -1, 1};
  for (int z = 0; z < 4; ++z) CHECK(m.normalization().raw(m.utility(z, 0)) == mu[z]);
  const auto spec = parse_benchmark("coordination");
  const Profile d = target_equilibrium(spec, c);
  CHECK(d[0][2] == 1.0);  // B
  CHECK(d[1][2] == 1.0);
}

TEST_CASE("stag hunt target") {
  const auto spec = parse_benchmark("stag_hunt");
  const GameTree g = build(spec);
  const Profile d = target_equilibrium(spec, g);
  CHECK(g.sequence_label(0, 2) == "P1:S");
  CHECK(d[0][2] == 1.0);
  CHECK(d[1][2] == 1.0);
  CHECK_THROWS_AS(target_equilibrium(parse_benchmark("kuhn3"), build("kuhn3")), ConfigError);
}

TEST_CASE("sheriff zero-bribe baseline") {
  const GameTree g = build("sheriff");
  // load 0, bribe 0 accepted twice: first terminal in depth-first order
  CHECK(g.normalization().raw(g.utility(0, 0)) == 0.0);
  CHECK(g.normalization().raw(g.utility(0, 1)) == 0.0);
  // load 1, bribe 2 accepted on the binding round: Smuggler 5 - 2, Sheriff 2
  bool found = false;
  for (int z = 0; z < g.num_terminals(); ++z)
    if (g.normalization().raw(g.utility(z, 0)) == 3.0 && g.normalization().raw(g.utility(z, 1)) == 2.0)
      found = true;
  CHECK(found);
}

TEST_CASE("ridesharing map") {
  CHECK(kRideRewards == std::array<double, 7>{1, .5, .5, 1.5, 4.5, 2, 1.5});
  CHECK(kRideEdges.size() == 10);
  const GameTree g = build("ridesharing");
  // Best single-driver haul in two steps from the hub is the 4.5 request.
  CHECK(g.normalization().scale == 4.5);
  // Both drivers racing to vertex 4 first get nothing there.
  double min_welfare = 1e9;
  for (int z = 0; z < g.num_terminals(); ++z)
    min_welfare = std::min(min_welfare, g.utility(z, 0) + g.utility(z, 1));
  CHECK(min_welfare == 0.0);
}

TEST_CASE("kuhn3 is zero-sum") {
  const GameTree g = build("kuhn3");
  for (int z = 0; z < g.num_terminals(); ++z) {
    double s = 0;
    for (Player i = 0; i < 3; ++i) s += g.normalization().raw(g.utility(z, i));
    CHECK(s == doctest::Approx(0.0));
  }
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse_benchmark("chess"), ConfigError);
  CHECK_THROWS_AS(parse_benchmark("kuhn3(2)"), ConfigError);
  CHECK(parse_benchmark("lower_bound(5)").n == 5);
}
