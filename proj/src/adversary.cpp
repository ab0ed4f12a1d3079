#include "steer/adversary.hpp"

#include "steer/evaluation.hpp"
#include "steer/sequence_form.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

namespace steer {

int NormalForm::num_profiles() const {
  int n = 1;
  for (int k : actions) n *= k;
  return n;
}

int NormalForm::index(const std::vector<int>& a) const {
  int idx = 0;
  for (std::size_t i = 0; i < actions.size(); ++i) idx = idx * actions[i] + a[i];
  return idx;
}

std::vector<int> NormalForm::profile(int index) const {
  std::vector<int> a(actions.size());
  for (std::size_t i = actions.size(); i-- > 0;) {
    a[i] = index % actions[i];
    index /= actions[i];
  }
  return a;
}

NormalForm normal_form(const GameTree& game) {
  return normal_form(game, [](Player, const std::vector<int>&) { return 0.0; });
}

NormalForm normal_form(const GameTree& game,
                       const std::function<double(Player, const std::vector<int>&)>& extra) {
  NormalForm nf;
  for (Player p = 0; p < game.num_players(); ++p) {
    if (game.player_infosets(p).size() != 1)
      throw std::invalid_argument(fmt::format("player {} does not have exactly one infoset", p));
    nf.actions.push_back(static_cast<int>(game.infoset(game.player_infosets(p)[0]).actions.size()));
  }
  nf.payoff.assign(game.num_players(), Vector::Zero(nf.num_profiles()));
  for (int k = 0; k < nf.num_profiles(); ++k) {
    const auto a = nf.profile(k);
    Profile x;
    for (Player p = 0; p < game.num_players(); ++p) x.push_back(pure_strategy(game, p, std::vector<int>{a[p]}));
    for (Player p = 0; p < game.num_players(); ++p)
      nf.payoff[p][k] = expected_utility(game, x, p) + extra(p, a);
  }
  return nf;
}

Profile to_profile(const GameTree& game, const MixedProfile& m) {
  Profile x;
  for (Player p = 0; p < game.num_players(); ++p) {
    const Infoset& info = game.infoset(game.player_infosets(p)[0]);
    Vector s = Vector::Zero(game.num_sequences(p));
    s[0] = 1.0;
    s.segment(info.first_sequence, m[p].size()) = m[p];
    x.push_back(std::move(s));
  }
  return x;
}

MixedProfile to_mixed(const GameTree& game, const Profile& x) {
  MixedProfile m;
  for (Player p = 0; p < game.num_players(); ++p) {
    const Infoset& info = game.infoset(game.player_infosets(p)[0]);
    m.push_back(x[p].segment(info.first_sequence, static_cast<Eigen::Index>(info.actions.size())));
  }
  return m;
}

double nf_utility(const NormalForm& g, Player i, const MixedProfile& m) {
  double total = 0.0;
  for (int k = 0; k < g.num_profiles(); ++k) {
    const auto a = g.profile(k);
    double pr = 1.0;
    for (int p = 0; p < g.num_players() && pr != 0.0; ++p) pr *= m[p][a[p]];
    total += pr * g.payoff[i][k];
  }
  return total;
}

double nf_deviation_benefit(const NormalForm& g, Player i, const MixedProfile& m) {
  const double now = nf_utility(g, i, m);
  double best = -1e300;
  MixedProfile dev = m;
  for (int a = 0; a < g.actions[i]; ++a) {
    dev[i] = Vector::Unit(g.actions[i], a);
    best = std::max(best, nf_utility(g, i, dev));
  }
  return best - now;
}

bool nf_is_nash(const NormalForm& g, const MixedProfile& m, double tol) {
  for (int i = 0; i < g.num_players(); ++i)
    if (nf_deviation_benefit(g, i, m) > tol) return false;
  return true;
}

MixedProfile pure_mixed(const NormalForm& g, const std::vector<int>& a) {
  MixedProfile m;
  for (int i = 0; i < g.num_players(); ++i) m.push_back(Vector::Unit(g.actions[i], a[i]));
  return m;
}

std::vector<std::vector<int>> pure_equilibria(const NormalForm& g, double tol) {
  std::vector<std::vector<int>> out;
  for (int k = 0; k < g.num_profiles(); ++k) {
    const auto a = g.profile(k);
    if (nf_is_nash(g, pure_mixed(g, a), tol)) out.push_back(a);
  }
  return out;
}

namespace {

std::vector<std::vector<int>> subsets(int k) {
  std::vector<std::vector<int>> out;
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<int> s;
    for (int a = 0; a < k; ++a)
      if (mask >> a & 1) s.push_back(a);
    out.push_back(s);
  }
  return out;
}

// Mix of the column player over `cols` making the row player indifferent over
// `rows`, where A(r, c) is the row player's payoff.
std::optional<Vector> indifference_mix(const Matrix& A, const std::vector<int>& rows,
                                       const std::vector<int>& cols) {
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(cols.size());
  Matrix M = Matrix::Zero(nr + 1, nc + 1);
  Vector rhs = Vector::Zero(nr + 1);
  for (Eigen::Index r = 0; r < nr; ++r) {
    for (Eigen::Index c = 0; c < nc; ++c) M(r, c) = A(rows[r], cols[c]);
    M(r, nc) = -1.0;
  }
  M.block(nr, 0, 1, nc).setOnes();
  rhs[nr] = 1.0;
  const Vector sol = M.completeOrthogonalDecomposition().solve(rhs);
  if ((M * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-9) return std::nullopt;
  Vector mix = Vector::Zero(A.cols());
  for (Eigen::Index c = 0; c < nc; ++c) {
    if (sol[c] < -1e-12) return std::nullopt;
    mix[cols[c]] = std::max(0.0, sol[c]);
  }
  return Vector(mix / mix.sum());
}

std::vector<MixedProfile> two_player(const NormalForm& g, double tol) {
  Matrix A(g.actions[0], g.actions[1]), B(g.actions[1], g.actions[0]);
  for (int a = 0; a < g.actions[0]; ++a)
    for (int b = 0; b < g.actions[1]; ++b) {
      A(a, b) = g.payoff[0][g.index({a, b})];
      B(b, a) = g.payoff[1][g.index({a, b})];
    }
  std::vector<MixedProfile> out;
  for (const auto& s1 : subsets(g.actions[0]))
    for (const auto& s2 : subsets(g.actions[1])) {
      const auto y = indifference_mix(A, s1, s2);
      const auto x = indifference_mix(B, s2, s1);
      if (!x || !y) continue;
      MixedProfile m{*x, *y};
      if (!nf_is_nash(g, m, tol)) continue;
      const bool dup = std::any_of(out.begin(), out.end(), [&](const MixedProfile& o) {
        return (o[0] - m[0]).lpNorm<1>() + (o[1] - m[1]).lpNorm<1>() < 1e-9;
      });
      if (!dup) out.push_back(std::move(m));
    }
  return out;
}

// Three players with two actions each.
std::vector<MixedProfile> three_binary(const NormalForm& g, double tol) {
  const auto u = [&](int i, int a0, int a1, int a2) { return g.payoff[i][g.index({a0, a1, a2})]; };
  // Expected payoff of player i for own action a when the others play action 1
  // with the given probabilities.
  const auto val = [&](int i, int a, double qa, double qb) {
    double v = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const double pr = (x ? qa : 1 - qa) * (y ? qb : 1 - qb);
        int acts[3];
        acts[i] = a;
        acts[(i + 1) % 3] = x;
        acts[(i + 2) % 3] = y;
        v += pr * u(i, acts[0], acts[1], acts[2]);
      }
    return v;
  };
  // indifference residual of player i given the others' probabilities of action 1
  const auto diff = [&](int i, double qa, double qb) { return val(i, 1, qa, qb) - val(i, 0, qa, qb); };

  std::vector<MixedProfile> out;
  const auto add = [&](const std::array<double, 3>& p) {
    MixedProfile m;
    for (int i = 0; i < 3; ++i) m.push_back((Vector(2) << 1 - p[i], p[i]).finished());
    if (!nf_is_nash(g, m, tol)) return;
    for (const auto& o : out) {
      double d = 0;
      for (int i = 0; i < 3; ++i) d += (o[i] - m[i]).lpNorm<1>();
      if (d < 1e-7) return;
    }
    out.push_back(std::move(m));
  };

  for (const auto& a : pure_equilibria(g, tol)) add({double(a[0]), double(a[1]), double(a[2])});

  // One player mixes, two are pure: the mixing probability ranges over an
  // interval cut out by the pure players' best-response conditions.
  for (int i = 0; i < 3; ++i)
    for (int b = 0; b < 4; ++b) {
      const int j = (i + 1) % 3, k = (i + 2) % 3;
      const int aj = b & 1, ak = b >> 1;
      double lo = 0.0, hi = 1.0;
      bool ok = true;
      // player i indifferent: payoff independent of own mix
      {
        std::array<double, 3> p{};
        p[j] = aj;
        p[k] = ak;
        if (std::abs(diff(i, p[(i + 1) % 3], p[(i + 2) % 3])) > tol) continue;
      }
      for (int who : {j, k}) {
        // linear in q = prob of action 1 for player i: f(q) = f0 + (f1 - f0) q >= 0
        const int own = who == j ? aj : ak;
        const auto gain = [&](double q) {
          std::array<double, 3> p{};
          p[i] = q;
          p[j] = aj;
          p[k] = ak;
          const double d = diff(who, p[(who + 1) % 3], p[(who + 2) % 3]);
          return own == 1 ? d : -d;
        };
        const double f0 = gain(0.0), f1 = gain(1.0);
        if (std::abs(f1 - f0) < 1e-15) {
          if (f0 < -tol) ok = false;
          continue;
        }
        const double root = -f0 / (f1 - f0);
        if (f1 > f0) lo = std::max(lo, root);
        else hi = std::min(hi, root);
      }
      if (!ok || lo > hi + 1e-12) continue;
      std::array<double, 3> p{};
      p[i] = 0.5 * (lo + hi);
      p[j] = aj;
      p[k] = ak;
      add(p);
    }

  // Two players mix against a pure third: solve the reduced 2x2 game.
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < 2; ++c) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      // player i indifferent => solve for q_j; player j indifferent => q_i
      const auto solve = [&](int who, int other) -> std::optional<double> {
        const auto f = [&](double q) {
          std::array<double, 3> p{};
          p[k] = c;
          p[other] = q;
          return diff(who, p[(who + 1) % 3], p[(who + 2) % 3]);
        };
        const double f0 = f(0.0), f1 = f(1.0);
        if (std::abs(f1 - f0) < 1e-15) return std::nullopt;
        const double q = -f0 / (f1 - f0);
        if (q < -1e-12 || q > 1 + 1e-12) return std::nullopt;
        return std::clamp(q, 0.0, 1.0);
      };
      const auto qj = solve(i, j);
      const auto qi = solve(j, i);
      if (!qj || !qi) continue;
      std::array<double, 3> p{};
      p[k] = c;
      p[i] = *qi;
      p[j] = *qj;
      add(p);
    }

  // All three mix. Player i's residual is bilinear in the others,
  // r_i = a + b q_{i+1} + c q_{i+2} + d q_{i+1} q_{i+2}. Players 1 and 2 give q2
  // and q1 as ratios of linear functions of q0; substituting into player 0's
  // residual leaves a quadratic in q0. Degenerate denominators make a variable
  // free, in which case the remaining equation pins it down.
  struct Bilinear {
    double a, b, c, d;
  };
  Bilinear r[3];
  for (int i = 0; i < 3; ++i) {
    const double f00 = diff(i, 0, 0), f10 = diff(i, 1, 0), f01 = diff(i, 0, 1), f11 = diff(i, 1, 1);
    r[i] = {f00, f10 - f00, f01 - f00, f11 - f10 - f01 + f00};
  }
  using Poly = std::array<double, 3>;  // c0 + c1 q + c2 q^2
  const auto mul = [](Poly x, Poly y) {
    return Poly{x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[0] * y[2] + x[1] * y[1] + x[2] * y[0]};
  };
  const auto add_poly = [](Poly x, Poly y, double s) {
    return Poly{x[0] + s * y[0], x[1] + s * y[1], x[2] + s * y[2]};
  };
  // q1 = n1 / d1 from player 2 (a + b q0 + c q1 + d q0 q1); q2 = n2 / d2 from player 1.
  const Poly n1{-r[2].a, -r[2].b, 0}, d1{r[2].c, r[2].d, 0};
  const Poly n2{-r[1].a, -r[1].c, 0}, d2{r[1].b, r[1].d, 0};
  Poly q{};
  q = add_poly(q, mul(d1, d2), r[0].a);
  q = add_poly(q, mul(n1, d2), r[0].b);
  q = add_poly(q, mul(d1, n2), r[0].c);
  q = add_poly(q, mul(n1, n2), r[0].d);

  std::vector<double> candidates{0.5};
  const auto linear_root = [&](Poly p) {
    if (std::abs(p[1]) > 1e-14) candidates.push_back(-p[0] / p[1]);
  };
  for (const Poly& p : {n1, d1, n2, d2}) linear_root(p);
  if (std::abs(q[2]) > 1e-14) {
    const double disc = q[1] * q[1] - 4 * q[2] * q[0];
    if (disc >= 0) {
      candidates.push_back((-q[1] + std::sqrt(disc)) / (2 * q[2]));
      candidates.push_back((-q[1] - std::sqrt(disc)) / (2 * q[2]));
    }
  } else {
    linear_root(q);
  }
  const auto eval = [](Poly p, double x) { return p[0] + p[1] * x + p[2] * x * x; };
  // Solve a + b x = 0 for x in [0, 1]; a free variable gets `fallback`.
  const auto solve_linear = [](double a, double b, double fallback) -> std::optional<double> {
    if (std::abs(b) > 1e-12) return -a / b;
    if (std::abs(a) <= 1e-12) return fallback;
    return std::nullopt;
  };
  for (const double q0 : candidates) {
    if (!(q0 > -1e-12 && q0 < 1 + 1e-12)) continue;
    const double dv1 = eval(d1, q0), dv2 = eval(d2, q0);
    std::optional<double> q1, q2;
    if (std::abs(dv1) > 1e-12) q1 = eval(n1, q0) / dv1;
    if (std::abs(dv2) > 1e-12) q2 = eval(n2, q0) / dv2;
    if (!q1 && std::abs(eval(n1, q0)) > 1e-12) continue;
    if (!q2 && std::abs(eval(n2, q0)) > 1e-12) continue;
    // player 0: a + b q1 + c q2 + d q1 q2 = 0
    if (!q1 && !q2) q1 = 0.5;
    if (!q1) q1 = solve_linear(r[0].a + r[0].c * *q2, r[0].b + r[0].d * *q2, 0.5);
    else if (!q2) q2 = solve_linear(r[0].a + r[0].b * *q1, r[0].c + r[0].d * *q1, 0.5);
    if (!q1 || !q2) continue;
    if (*q1 < -1e-12 || *q1 > 1 + 1e-12 || *q2 < -1e-12 || *q2 > 1 + 1e-12) continue;
    add({std::clamp(q0, 0.0, 1.0), std::clamp(*q1, 0.0, 1.0), std::clamp(*q2, 0.0, 1.0)});
  }
  return out;
}

}  // namespace

std::vector<MixedProfile> mixed_equilibria(const NormalForm& g, double tol) {
  std::vector<MixedProfile> out;
  if (g.num_players() == 2 && g.actions[0] <= 3 && g.actions[1] <= 3) out = two_player(g, tol);
  else if (g.num_players() == 3 && g.actions == std::vector<int>{2, 2, 2}) out = three_binary(g, tol);
  else throw NoEquilibrium("support enumeration supports 2 players (<= 3 actions) or 2x2x2 games");
  if (out.empty()) throw NoEquilibrium("support enumeration found no equilibrium");
  return out;
}

MixedProfile any_equilibrium(const NormalForm& g) {
  const auto pure = pure_equilibria(g);
  if (!pure.empty()) return pure_mixed(g, pure.front());
  return mixed_equilibria(g).front();
}

MixedProfile EquilibriumAdversary::choose(int round, const NormalForm& game,
                                          const NormalForm* payments) const {
  if (round <= policy_.warmup_rounds || !policy_.preferred) return any_equilibrium(game);
  const MixedProfile pref = pure_mixed(game, *policy_.preferred);
  if (nf_is_nash(game, pref, 1e-12)) return pref;
  if (policy_.grab_payments) {
    if (!payments) throw std::invalid_argument("payment grabbing needs the payment table");
    int best = 0;
    double most = -1.0;
    for (int k = 0; k < payments->num_profiles(); ++k) {
      double total = 0.0;
      for (int i = 0; i < payments->num_players(); ++i) total += payments->payoff[i][k];
      if (total > most + 1e-12) {
        most = total;
        best = k;
      }
    }
    return pure_mixed(game, game.profile(best));
  }
  return any_equilibrium(game);
}

}  // namespace steer
