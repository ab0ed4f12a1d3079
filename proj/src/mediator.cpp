#include "steer/mediator.hpp"

#include "steer/evaluation.hpp"
#include "steer/payments.hpp"
#include "steer/sequence_form.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace steer {

namespace {

struct PathState {
  std::vector<std::string> recs;  // per player: received recommendation tokens
  TerminalIdentity id;
};

class Augmenter {
 public:
  explicit Augmenter(const GameTree& base)
      : base_(base), n_(base.num_players()), b_(n_ + 1, base.name() + "+mediator") {
    b_.set_normalization(base.normalization());
  }

  AugmentedGame run() && {
    PathState s;
    s.recs.assign(n_, "");
    grow(GameBuilder::kRoot, 0, s);
    AugmentedGame aug;
    aug.base = &base_;
    aug.mediator = n_;
    aug.terminals = std::move(terminals_);
    aug.game = std::move(b_).build();
    fill_recommendations(aug, rec_of_key_);
    return aug;
  }

  static void fill_recommendations(AugmentedGame& aug,
                                   const std::unordered_map<std::string, int>& rec_of_key) {
    aug.recommended.assign(aug.game.num_infosets(), -1);
    for (int I = 0; I < aug.game.num_infosets(); ++I) {
      const Infoset& info = aug.game.infoset(I);
      if (info.player == aug.mediator) continue;
      const auto it = rec_of_key.find(fmt::format("{}#{}", info.player, info.key));
      if (it != rec_of_key.end()) aug.recommended[I] = it->second;
    }
  }

 private:
  void grow(GameBuilder::Edge at, int h, const PathState& s) {
    const Node& node = base_.node(h);
    switch (node.kind) {
      case NodeKind::kTerminal: {
        std::vector<double> u(n_ + 1);
        for (Player i = 0; i < n_; ++i) u[i] = base_.normalization().raw(base_.utility(node.terminal, i));
        u[n_] = base_.normalization().offset;  // stored as 0
        b_.terminal(at, std::move(u));
        TerminalIdentity id = s.id;
        id.base_terminal = node.terminal;
        terminals_.push_back(std::move(id));
        return;
      }
      case NodeKind::kChance: {
        const int c = b_.chance(at, node.chance_actions, node.chance);
        for (std::size_t a = 0; a < node.children.size(); ++a)
          grow({c, static_cast<int>(a)}, node.children[a], s);
        return;
      }
      case NodeKind::kDecision: break;
    }
    const Player i = node.player;
    const Infoset& info = base_.infoset(node.infoset);
    const int k = static_cast<int>(info.actions.size());
    if (s.id.deviators.size() < 2) {
      const int m = b_.decision(at, n_, fmt::format("m{}", mediator_nodes_++), info.actions);
      for (int r = 0; r < k; ++r) {
        PathState next = s;
        next.recs[i] += fmt::format("/{}", r);
        const std::string key = info.key + "|" + next.recs[i];
        rec_of_key_[fmt::format("{}#{}", i, key)] = r;
        const int d = b_.decision({m, r}, i, key, info.actions);
        for (int a = 0; a < k; ++a) {
          PathState child = next;
          if (a != r && std::find(child.id.deviators.begin(), child.id.deviators.end(), i) ==
                            child.id.deviators.end()) {
            child.id.deviators.push_back(i);
            child.id.deviation_nodes.push_back(h);
            child.id.deviation_actions.push_back(a);
          }
          grow({d, a}, node.children[a], child);
        }
      }
    } else {
      PathState next = s;
      next.recs[i] += "/-";
      const int d = b_.decision(at, i, info.key + "|" + next.recs[i], info.actions);
      for (int a = 0; a < k; ++a) grow({d, a}, node.children[a], next);
    }
  }

  const GameTree& base_;
  Player n_;
  GameBuilder b_;
  int mediator_nodes_ = 0;
  std::unordered_map<std::string, int> rec_of_key_;
  std::vector<TerminalIdentity> terminals_;
};

void copy_fixed(const GameTree& g, Player mediator, const Vector& mu, int h, GameBuilder::Edge at,
                GameBuilder& b) {
  const Node& node = g.node(h);
  switch (node.kind) {
    case NodeKind::kTerminal: {
      std::vector<double> u(mediator);
      for (Player i = 0; i < mediator; ++i) u[i] = g.normalization().raw(g.utility(node.terminal, i));
      b.terminal(at, std::move(u));
      return;
    }
    case NodeKind::kChance: {
      const int c = b.chance(at, node.chance_actions, node.chance);
      for (std::size_t a = 0; a < node.children.size(); ++a)
        copy_fixed(g, mediator, mu, node.children[a], {c, static_cast<int>(a)}, b);
      return;
    }
    case NodeKind::kDecision: break;
  }
  const Infoset& info = g.infoset(node.infoset);
  int id = 0;
  if (node.player == mediator) {
    std::vector<double> probs;
    for (std::size_t a = 0; a < info.actions.size(); ++a)
      probs.push_back(std::max(0.0, behavioral_prob(g, mu, node.infoset, static_cast<int>(a))));
    double sum = 0.0;
    for (double p : probs) sum += p;
    for (double& p : probs) p /= sum;
    id = b.chance(at, info.actions, std::move(probs));
  } else {
    id = b.decision(at, node.player, info.key, info.actions);
  }
  for (std::size_t a = 0; a < node.children.size(); ++a)
    copy_fixed(g, mediator, mu, node.children[a], {id, static_cast<int>(a)}, b);
}

// Best response of player i in the augmented game against (μ, d_{-i}),
// restricted to `plans` when given.
BestResponse restricted_best_response(const AugmentedGame& aug, const Profile& full, Player i,
                                      const std::vector<Vector>* plans) {
  if (!plans || plans->empty()) return best_response(aug.game, full, i);
  const Vector g = utility_gradient(aug.game, full, i);
  BestResponse br;
  br.value = -std::numeric_limits<double>::infinity();
  for (const Vector& p : *plans) {
    const double v = g.dot(p);
    if (v > br.value) {
      br.value = v;
      br.strategy = p;
    }
  }
  return br;
}

const std::vector<Vector>* plans_for(const std::vector<std::vector<Vector>>* sets, Player i) {
  if (!sets || static_cast<std::size_t>(i) >= sets->size() || (*sets)[i].empty()) return nullptr;
  return &(*sets)[i];
}

}  // namespace

AugmentedGame augment(const GameTree& base) {
  if (!base.sequence_form_ready()) throw GameError("augment: base game lacks perfect recall");
  return Augmenter(base).run();
}

AugmentedGame correlation_game(const GameTree& base) {
  if (!is_normal_form(base)) throw ConfigError("correlation game needs a normal-form base game");
  const int n = base.num_players();
  for (const Node& node : base.nodes())
    if (node.kind == NodeKind::kChance) throw ConfigError("correlation game: chance nodes unsupported");

  std::vector<int> sizes(n);
  int K = 1;
  for (Player i = 0; i < n; ++i) {
    sizes[i] = static_cast<int>(base.infoset(base.player_infosets(i)[0]).actions.size());
    K *= sizes[i];
  }
  // Profile k in mixed radix, player 0 most significant.
  auto decode = [&](int k) {
    std::vector<int> r(n);
    for (Player i = n - 1; i >= 0; --i) {
      r[i] = k % sizes[i];
      k /= sizes[i];
    }
    return r;
  };

  GameBuilder b(n + 1, base.name() + "+correlation");
  b.set_normalization(base.normalization());
  std::vector<std::string> labels;
  for (int k = 0; k < K; ++k) {
    const auto r = decode(k);
    std::string s;
    for (Player i = 0; i < n; ++i) {
      const Infoset& I = base.infoset(base.player_infosets(i)[0]);
      s += (i ? "," : "") + I.actions[r[i]];
    }
    labels.push_back(std::move(s));
  }
  AugmentedGame aug;
  aug.base = &base;
  aug.mediator = n;
  std::unordered_map<std::string, int> rec_of_key;
  const int root = b.decision(GameBuilder::kRoot, n, "root", labels);

  // Walks the base tree under recommendation profile r.
  auto walk = [&](auto&& self, int h, GameBuilder::Edge at, const std::vector<int>& r,
                  TerminalIdentity id) -> void {
    const Node& node = base.node(h);
    if (node.kind == NodeKind::kTerminal) {
      std::vector<double> u(n + 1);
      for (Player i = 0; i < n; ++i) u[i] = base.normalization().raw(base.utility(node.terminal, i));
      u[n] = base.normalization().offset;
      b.terminal(at, std::move(u));
      id.base_terminal = node.terminal;
      aug.terminals.push_back(std::move(id));
      return;
    }
    const Player i = node.player;
    const Infoset& I = base.infoset(node.infoset);
    const std::string key = fmt::format("rec{}", r[i]);
    rec_of_key[fmt::format("{}#{}", i, key)] = r[i];
    const int d = b.decision(at, i, key, I.actions);
    for (std::size_t a = 0; a < I.actions.size(); ++a) {
      TerminalIdentity next = id;
      if (static_cast<int>(a) != r[i] && next.deviators.size() < 2) {
        next.deviators.push_back(i);
        next.deviation_nodes.push_back(h);
        next.deviation_actions.push_back(static_cast<int>(a));
      }
      self(self, node.children[a], {d, static_cast<int>(a)}, r, std::move(next));
    }
  };
  for (int k = 0; k < K; ++k) walk(walk, 0, {root, k}, decode(k), TerminalIdentity{});
  aug.game = std::move(b).build();
  Augmenter::fill_recommendations(aug, rec_of_key);
  return aug;
}

Vector direct_strategy(const AugmentedGame& aug, Player i) {
  if (i < 0 || i >= aug.num_players()) throw std::invalid_argument("direct_strategy: bad player");
  const auto infosets = aug.game.player_infosets(i);
  std::vector<int> actions;
  for (int I : infosets) actions.push_back(std::max(0, aug.recommended[I]));
  return pure_strategy(aug.game, i, actions);
}

Profile direct_profile(const AugmentedGame& aug) {
  Profile d;
  for (Player i = 0; i < aug.num_players(); ++i) d.push_back(direct_strategy(aug, i));
  return d;
}

GameTree fix_mediator(const AugmentedGame& aug, const Vector& mu) {
  if (!is_valid_strategy(aug.game, aug.mediator, mu, 1e-7))
    throw std::invalid_argument("fix_mediator: invalid mediator strategy");
  GameBuilder b(aug.num_players(), aug.game.name() + "|mu");
  b.set_normalization(aug.game.normalization());
  copy_fixed(aug.game, aug.mediator, mu, 0, GameBuilder::kRoot, b);
  return std::move(b).build();
}

Profile with_mediator(const Profile& players, const Vector& mu) {
  Profile full = players;
  full.push_back(mu);
  return full;
}

Objective parse_objective(std::string_view tag) {
  if (tag == "welfare") return {};
  if (tag == "neg_welfare") return {Objective::Kind::kNegativeWelfare, 0};
  if (tag.starts_with("player")) {
    const std::string digits(tag.substr(6));
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos)
      return {Objective::Kind::kPlayer, std::stoi(digits)};
  }
  throw ConfigError(fmt::format("unknown objective '{}'", tag));
}

std::string to_string(const Objective& o) {
  switch (o.kind) {
    case Objective::Kind::kWelfare: return "welfare";
    case Objective::Kind::kNegativeWelfare: return "neg_welfare";
    case Objective::Kind::kPlayer: return fmt::format("player{}", o.player);
  }
  return "?";
}

Vector objective_vector(const GameTree& g, int num_players, const Objective& o) {
  if (num_players < 1 || num_players > g.num_players())
    throw std::invalid_argument("objective_vector: bad player count");
  if (o.kind == Objective::Kind::kPlayer) {
    if (o.player < 0 || o.player >= num_players)
      throw ConfigError(fmt::format("objective player {} out of range", o.player));
    return g.utility_vector(o.player);
  }
  Vector mean = Vector::Zero(g.num_terminals());
  for (Player i = 0; i < num_players; ++i) mean += g.utility_vector(i);
  mean /= num_players;
  if (o.kind == Objective::Kind::kNegativeWelfare) return Vector::Ones(mean.size()) - mean;
  return mean;
}

double lagrangian_value(const AugmentedGame& aug, const Vector& objective, double lambda,
                        const Vector& mu, const Profile& x) {
  const Profile d = with_mediator(direct_profile(aug), mu);
  double value = expected_value(aug.game, d, objective);
  for (Player i = 0; i < aug.num_players(); ++i) {
    Profile dev = d;
    dev[i] = x[i];
    value -= lambda * (expected_utility(aug.game, dev, i) - expected_utility(aug.game, d, i));
  }
  return value;
}

std::vector<double> deviation_benefits(const AugmentedGame& aug, const Vector& mu,
                                       const std::vector<std::vector<Vector>>* deviation_sets) {
  const Profile d = with_mediator(direct_profile(aug), mu);
  std::vector<double> out;
  for (Player i = 0; i < aug.num_players(); ++i) {
    const BestResponse br = restricted_best_response(aug, d, i, plans_for(deviation_sets, i));
    out.push_back(br.value - expected_utility(aug.game, d, i));
  }
  return out;
}

namespace {

// ∇_μ L(μ, x): linear in μ, so L(μ, x) = grad·μ.
Vector lagrangian_gradient(const AugmentedGame& aug, const Vector& objective,
                           const std::vector<Vector>& u, double lambda, const Profile& full_d,
                           const Profile& x) {
  const Player med = aug.mediator;
  Vector grad = utility_gradient(aug.game, full_d, med, objective);
  for (Player i = 0; i < aug.num_players(); ++i) {
    Profile dev = full_d;
    dev[i] = x[i];
    grad -= lambda * (utility_gradient(aug.game, dev, med, u[i]) - utility_gradient(aug.game, full_d, med, u[i]));
  }
  return grad;
}

}  // namespace

BceSolution solve_optimal_bce(const AugmentedGame& aug, const Vector& objective,
                              const BceOptions& opts) {
  const GameTree& g = aug.game;
  const Player med = aug.mediator;
  const int n = aug.num_players();
  if (objective.size() != g.num_terminals())
    throw ConfigError("objective must have one entry per augmented terminal");
  if (opts.iterations < 1 || opts.check_every < 1 || opts.lambda0 <= 0)
    throw ConfigError("invalid BCE solver options");
  const auto* sets = opts.deviation_sets.empty() ? nullptr : &opts.deviation_sets;

  const Profile d = direct_profile(aug);
  std::vector<Vector> u(n);
  for (Player i = 0; i < n; ++i) u[i] = g.utility_vector(i);

  BceSolution best;
  double best_score = std::numeric_limits<double>::infinity();
  double lambda = opts.lambda0;
  int total = 0;
  for (int round = 0; round <= opts.max_doublings; ++round, lambda *= 2) {
    CfrPlus mediator(g, med, /*linear_averaging=*/true);
    std::vector<std::unique_ptr<CfrPlus>> deviators;
    for (Player i = 0; i < n; ++i) deviators.push_back(std::make_unique<CfrPlus>(g, i, true));
    Profile x_sum(n);
    for (Player i = 0; i < n; ++i) x_sum[i] = Vector::Zero(g.num_sequences(i));
    double weight = 0.0;

    for (int t = 1; t <= opts.iterations; ++t) {
      Profile full = with_mediator(d, mediator.strategy());
      Profile x(n);
      for (Player i = 0; i < n; ++i) {
        const auto* plans = plans_for(sets, i);
        x[i] = (plans || opts.best_response_deviators)
                   ? restricted_best_response(aug, full, i, plans).strategy
                   : deviators[i]->strategy();
        x_sum[i] += t * x[i];
      }
      weight += t;
      mediator.step(lagrangian_gradient(aug, objective, u, lambda, full, x));
      // Deviators answer the updated μ (alternating updates).
      full.back() = mediator.strategy();
      for (Player i = 0; i < n; ++i)
        if (!plans_for(sets, i) && !opts.best_response_deviators) deviators[i]->step(utility_gradient(g, full, i));
      ++total;
      if (t % opts.check_every != 0 && t != opts.iterations) continue;

      const Vector mu = mediator.average_strategy();
      const Profile full_bar = with_mediator(d, mu);
      const auto benefit = deviation_benefits(aug, mu, sets);
      const double violation = *std::max_element(benefit.begin(), benefit.end());
      const double value = expected_value(g, full_bar, objective);
      Profile x_bar(n);
      for (Player i = 0; i < n; ++i) x_bar[i] = x_sum[i] / weight;
      double lower = value;
      for (double b : benefit) lower -= lambda * std::max(0.0, b);
      const double upper =
          best_response_to_gradient(g, med, lagrangian_gradient(aug, objective, u, lambda, full, x_bar)).value;
      const double gap = std::max(0.0, upper - lower);
      const bool feasible = violation <= opts.tolerance;
      // Feasible points beat infeasible ones; then smaller gap / violation.
      const double score = feasible ? gap - 1e9 : violation;
      if (score < best_score) {
        best_score = score;
        best.mu = mu;
        best.lambda = lambda;
        best.deviation_benefit = benefit;
        best.value = value;
        best.duality_gap = gap;
        best.certified = feasible;
      }
      if (feasible && gap <= opts.value_tolerance) {
        best.iterations = total;
        return best;
      }
    }
    if (best.certified) break;  // a larger λ only slows convergence
  }
  best.iterations = total;
  return best;
}

// ---------------------------------------------------------------- steering

MediatedMetrics compute_then_steer(const AugmentedGame& aug, const Vector& objective,
                                   const BceSolution& solution, const LearnerSpec& learner,
                                   SteerConfig cfg, std::uint64_t seed, bool force) {
  if (!solution.certified && !force)
    throw ConfigError("compute-then-steer needs a certified equilibrium");
  const GameTree fixed = fix_mediator(aug, solution.mu);
  const Target target(fixed, direct_profile(aug), /*require_equilibrium=*/false);
  cfg.objective = objective;
  LearnerPopulation pop(make_learners(learner, fixed, scheme_cap(cfg)), seed);
  MediatedMetrics out;
  out.steering = run_steering(target, pop, cfg, seed);
  out.optimum = solution.value;
  out.optimality_gap = solution.value - out.steering.average_objective;
  return out;
}

MediatedMetrics online_steer(const AugmentedGame& aug, const Vector& objective, double optimum,
                             const OnlineConfig& cfg, std::uint64_t seed) {
  const GameTree& g = aug.game;
  const Player med = aug.mediator;
  const int n = aug.num_players();
  if (cfg.T < 1) throw ConfigError("T must be positive");
  if (cfg.lambda <= 0) throw ConfigError("lambda must be positive");
  if (cfg.alpha < 0) throw ConfigError("alpha must be nonnegative");
  if (objective.size() != g.num_terminals())
    throw ConfigError("objective must have one entry per augmented terminal");

  const Profile d = direct_profile(aug);
  std::vector<Vector> u(n), relevant(n);
  for (Player i = 0; i < n; ++i) {
    u[i] = g.utility_vector(i);
    relevant[i] = d[i];
    const auto& mask = g.relevant_sequences(i);
    for (Eigen::Index s = 0; s < relevant[i].size(); ++s)
      if (!mask[s]) relevant[i][s] = 0.0;
  }
  std::vector<Player> players(n);
  for (Player i = 0; i < n; ++i) players[i] = i;
  const Vector dhat = reach_products(g, with_mediator(d, Vector::Ones(g.num_sequences(med))), players);

  CfrPlus mediator(g, med);
  std::vector<std::unique_ptr<Learner>> learners;
  for (Player i = 0; i < n; ++i) {
    if (i < static_cast<int>(cfg.deviation_sets.size()) && !cfg.deviation_sets[i].empty())
      learners.push_back(std::make_unique<PlanHedge>(g, i, cfg.deviation_sets[i], cfg.hedge_eta));
    else
      learners.push_back(make_learner(cfg.learner, g, i, 4.0));
  }
  std::vector<Rng> streams;
  for (Player i = 0; i < n; ++i) streams.push_back(make_stream(seed, fmt::format("player{}", i)));
  Rng sampler = make_stream(seed, "mediator");

  constexpr double kCap = 3.0;
  std::vector<RegretRecord> records;
  for (Player i = 0; i < n; ++i) records.emplace_back(g, i, kCap);
  GapTracker tracker(dhat, 50);
  MediatedMetrics out;
  SteeringMetrics& m = out.steering;
  m.average_realized.assign(n, 0.0);
  m.average_expected.assign(n, 0.0);
  m.deviation_mass.assign(n, 0.0);
  m.rounds.reserve(cfg.T);

  for (int t = 1; t <= cfg.T; ++t) {
    const Vector mu = mediator.strategy();
    Profile x(n);
    for (Player i = 0; i < n; ++i) x[i] = learners[i]->play(streams[i]);
    const Profile full_x = with_mediator(x, mu);
    const Profile full_d = with_mediator(d, mu);
    const int z = sample_playout(g, full_x, sampler);
    const Vector dist = terminal_distribution(g, full_x);
    const bool active = t > cfg.burn_in;

    RoundRecord rec;
    rec.round = t;
    rec.terminal = z;
    rec.alpha = active ? cfg.alpha : 0.0;
    rec.cap = active ? kCap : 0.0;
    Vector med_grad = utility_gradient(g, full_d, med, objective) / cfg.lambda;
    for (Player i = 0; i < n; ++i) {
      Profile mixed = full_d;
      mixed[i] = x[i];
      const Vector grad_x = utility_gradient(g, full_x, i);
      LinearPayment pay = LinearPayment::zero(static_cast<int>(x[i].size()));
      if (active) pay = ff_payment_from_gradients(g, i, cfg.alpha, relevant[i], utility_gradient(g, full_d, i), grad_x);
      const double value = pay(x[i]);
      Feedback fb;
      fb.gradient = grad_x + pay.slope;
      fb.terminal = z;
      fb.payoff = g.utility(z, i) + value;
      records[i].add(fb.gradient, x[i]);
      learners[i]->observe(fb);
      rec.realized.push_back(value);
      rec.expected.push_back(value);
      rec.welfare += grad_x.dot(x[i]);
      m.average_realized[i] += value;
      m.average_expected[i] += value;
      m.total_paid += value;
      double off = 0.0;
      for (int zz = 0; zz < g.num_terminals(); ++zz)
        if (d[i][g.terminal_sequence(i, zz)] == 0.0) off += dist[zz];
      m.deviation_mass[i] += off;
      med_grad -= utility_gradient(g, mixed, med, u[i]) - utility_gradient(g, full_d, med, u[i]);
    }
    mediator.step(med_grad);
    tracker.add(reach_products(g, full_x, players));
    rec.gap = tracker.gap();
    rec.objective = dist.dot(objective);
    m.average_welfare += rec.welfare;
    m.average_objective += rec.objective;
    m.rounds.push_back(std::move(rec));
    if (t == cfg.T) m.last = x;
  }
  const double T = cfg.T;
  for (Player i = 0; i < n; ++i) {
    m.average_realized[i] /= T;
    m.average_expected[i] /= T;
    m.deviation_mass[i] /= T;
    m.regret.push_back(measured_regret(g, records[i]));
  }
  m.average_welfare /= T;
  m.average_objective /= T;
  m.final_gap = tracker.gap();
  out.optimum = optimum;
  out.optimality_gap = optimum - m.average_objective;
  return out;
}

// ---------------------------------------------------------------- normal form

namespace {

// Base terminal reached by a pure action profile of a normal-form game.
int nf_terminal(const GameTree& base, const std::vector<int>& a) {
  int h = 0;
  while (base.node(h).kind == NodeKind::kDecision) h = base.node(h).children[a[base.node(h).player]];
  return base.node(h).terminal;
}

double nf_u(const GameTree& base, const std::vector<int>& a, Player i) {
  return base.utility(nf_terminal(base, a), i);
}

int num_actions(const GameTree& base, Player i) {
  return static_cast<int>(base.infoset(base.player_infosets(i)[0]).actions.size());
}

}  // namespace

double nf_exploration_payment(const GameTree& base, const std::vector<int>& played,
                              const std::vector<int>& recommended, Player i) {
  return 1.0 - nf_u(base, played, i) + (played[i] == recommended[i] ? 1.0 : 0.0);
}

double nf_exploitation_payment(const GameTree& base, const std::vector<int>& played,
                               const std::vector<int>& recommended, Player i) {
  std::vector<int> own = recommended;
  own[i] = played[i];
  double lowest = std::numeric_limits<double>::infinity();
  for (int a = 0; a < num_actions(base, i); ++a) {
    std::vector<int> vs_d = recommended, vs_x = played;
    vs_d[i] = vs_x[i] = a;
    lowest = std::min(lowest, nf_u(base, vs_d, i) - nf_u(base, vs_x, i));
  }
  return nf_u(base, own, i) - nf_u(base, played, i) - lowest;
}

MediatedMetrics nf_online_steer(const GameTree& base, const AugmentedGame& corr,
                                const Vector& objective, double optimum,
                                const NfOnlineConfig& cfg, std::uint64_t seed) {
  const GameTree& g = corr.game;
  const Player med = corr.mediator;
  const int n = corr.num_players();
  if (cfg.T < 1) throw ConfigError("T must be positive");
  if (cfg.alpha < 0 || cfg.alpha > 1) throw ConfigError("alpha must lie in [0, 1]");
  if (cfg.lambda <= 0) throw ConfigError("lambda must be positive");
  if (objective.size() != g.num_terminals())
    throw ConfigError("objective must have one entry per terminal of the correlation game");

  const double med_range = 2.0 * n + 1.0 / cfg.lambda;
  Exp3 mediator(g, med, cfg.mediator_epsilon, med_range);
  std::vector<std::unique_ptr<Exp3>> players;
  for (Player i = 0; i < n; ++i) players.push_back(std::make_unique<Exp3>(g, i, cfg.player_epsilon, 3.0));
  std::vector<Rng> streams;
  for (Player i = 0; i < n; ++i) streams.push_back(make_stream(seed, fmt::format("player{}", i)));
  Rng med_rng = make_stream(seed, "mediator");
  Rng explore_rng = make_stream(seed, "explore");

  // Root action k of the correlation game -> recommendation profile.
  const Infoset& root = g.infoset(g.player_infosets(med)[0]);
  const int K = static_cast<int>(root.actions.size());
  std::vector<int> sizes(n);
  for (Player i = 0; i < n; ++i) sizes[i] = num_actions(base, i);
  auto decode = [&](int k) {
    std::vector<int> r(n);
    for (Player i = n - 1; i >= 0; --i) {
      r[i] = k % sizes[i];
      k /= sizes[i];
    }
    return r;
  };
  // Action a plan takes on recommendation r.
  auto act = [&](const Vector& plan, Player i, int r) {
    for (int I : g.player_infosets(i)) {
      if (corr.recommended[I] != r) continue;
      const Infoset& info = g.infoset(I);
      for (std::size_t a = 0; a < info.actions.size(); ++a)
        if (plan[info.first_sequence + static_cast<int>(a)] > 0.5) return static_cast<int>(a);
    }
    throw std::logic_error("plan has no action for recommendation");
  };
  // Objective of the base profile (mediator component ignored): look it up on
  // any correlation terminal with that base terminal.
  Vector base_objective = Vector::Zero(base.num_terminals());
  for (int z = 0; z < g.num_terminals(); ++z) base_objective[corr.terminals[z].base_terminal] = objective[z];

  std::vector<Player> who(n);
  for (Player i = 0; i < n; ++i) who[i] = i;
  Profile d = direct_profile(corr);
  const Vector dhat = reach_products(g, with_mediator(d, Vector::Ones(g.num_sequences(med))), who);
  GapTracker tracker(dhat, 50);
  std::vector<RegretRecord> records;
  for (Player i = 0; i < n; ++i) records.emplace_back(g, i, 2.0);

  MediatedMetrics out;
  SteeringMetrics& m = out.steering;
  m.average_realized.assign(n, 0.0);
  m.average_expected.assign(n, 0.0);
  m.deviation_mass.assign(n, 0.0);
  m.rounds.reserve(cfg.T);
  std::bernoulli_distribution explore(cfg.alpha);

  for (int t = 1; t <= cfg.T; ++t) {
    const Vector mu = mediator.strategy();
    const Vector med_plan = mediator.play(med_rng);
    Profile x(n), plans(n);
    for (Player i = 0; i < n; ++i) {
      x[i] = players[i]->strategy();
      plans[i] = players[i]->play(streams[i]);
    }
    int k = 0;
    for (int a = 0; a < K; ++a)
      if (med_plan[root.first_sequence + a] > 0.5) k = a;
    const bool exploring = explore(explore_rng);
    const std::vector<int> rec =
        exploring ? decode(std::uniform_int_distribution<int>(0, K - 1)(explore_rng)) : decode(k);
    std::vector<int> played(n);
    for (Player i = 0; i < n; ++i) played[i] = act(plans[i], i, rec[i]);

    // Terminal of the correlation game for (rec, played).
    int node = g.node(0).children[0];
    {
      int rk = 0;
      for (Player i = 0; i < n; ++i) rk = rk * sizes[i] + rec[i];
      node = g.node(0).children[rk];
      while (g.node(node).kind == NodeKind::kDecision) node = g.node(node).children[played[g.node(node).player]];
    }
    const int z = g.node(node).terminal;

    RoundRecord r;
    r.round = t;
    r.terminal = z;
    r.alpha = cfg.alpha;
    r.cap = 2.0;
    double med_reward = 0.0;
    if (!exploring) med_reward += base_objective[nf_terminal(base, rec)] / cfg.lambda;
    const Profile full_x = with_mediator(x, mu);
    const Vector dist = terminal_distribution(g, full_x);
    for (Player i = 0; i < n; ++i) {
      const double q = exploring ? nf_exploration_payment(base, played, rec, i)
                                 : nf_exploitation_payment(base, played, rec, i);
      if (!exploring) {
        std::vector<int> own = rec;
        own[i] = played[i];
        med_reward -= nf_u(base, own, i) - nf_u(base, rec, i);
      }
      Feedback fb;
      fb.terminal = z;
      fb.payoff = g.utility(z, i) + q;
      players[i]->observe(fb);
      const Vector grad = utility_gradient(g, full_x, i);
      records[i].add(grad, x[i]);
      r.realized.push_back(q);
      r.expected.push_back(q);
      r.welfare += grad.dot(x[i]);
      m.average_realized[i] += q;
      m.average_expected[i] += q;
      m.total_paid += q;
      double off = 0.0;
      for (int zz = 0; zz < g.num_terminals(); ++zz)
        if (d[i][g.terminal_sequence(i, zz)] == 0.0) off += dist[zz];
      m.deviation_mass[i] += off;
    }
    Feedback mfb;
    mfb.terminal = z;
    mfb.payoff = med_reward + n;  // shift into [0, med_range]
    mediator.observe(mfb);

    tracker.add(reach_products(g, full_x, who));
    r.gap = tracker.gap();
    r.objective = dist.dot(objective);
    m.average_welfare += r.welfare;
    m.average_objective += r.objective;
    m.rounds.push_back(std::move(r));
    if (t == cfg.T) m.last = x;
  }
  const double T = cfg.T;
  for (Player i = 0; i < n; ++i) {
    m.average_realized[i] /= T;
    m.average_expected[i] /= T;
    m.deviation_mass[i] /= T;
    m.regret.push_back(measured_regret(g, records[i]));
  }
  m.average_welfare /= T;
  m.average_objective /= T;
  m.final_gap = tracker.gap();
  out.optimum = optimum;
  out.optimality_gap = optimum - m.average_objective;
  return out;
}

// ---------------------------------------------------------------- PlanHedge

PlanHedge::PlanHedge(const GameTree& game, Player player, std::vector<Vector> plans, double eta)
    : Learner(game, player), plans_(std::move(plans)), eta_(eta) {
  if (plans_.empty()) throw ConfigError("plan_hedge: empty plan set");
  if (eta_ <= 0) throw ConfigError("plan_hedge: eta must be positive");
  for (const Vector& p : plans_)
    if (!is_valid_strategy(game, player, p)) throw ConfigError("plan_hedge: invalid plan");
  logw_ = Vector::Zero(static_cast<Eigen::Index>(plans_.size()));
  sum_ = Vector::Zero(game.num_sequences(player));
  recompute();
}

void PlanHedge::recompute() {
  const Vector w = (logw_.array() - logw_.maxCoeff()).exp();
  const Vector p = w / w.sum();
  x_ = Vector::Zero(game_->num_sequences(player_));
  for (std::size_t k = 0; k < plans_.size(); ++k) x_ += p[static_cast<Eigen::Index>(k)] * plans_[k];
}

void PlanHedge::observe(const Feedback& fb) {
  sum_ += x_;
  ++rounds_;
  for (std::size_t k = 0; k < plans_.size(); ++k)
    logw_[static_cast<Eigen::Index>(k)] += eta_ * fb.gradient.dot(plans_[k]);
  recompute();
}

double PlanHedge::regret_bound(double T, double range) const {
  return range * (std::log(static_cast<double>(plans_.size())) / eta_ + eta_ * T / 8.0);
}

}  // namespace steer
