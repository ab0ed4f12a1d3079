#include "steer/harness.hpp"

#include "steer/evaluation.hpp"
#include "steer/sequence_form.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/core.h>
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

namespace steer {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

Algorithm parse_algorithm(std::string_view tag) {
  if (tag == "none") return Algorithm::kNone;
  if (tag == "nf") return Algorithm::kNormalForm;
  if (tag == "full_feedback") return Algorithm::kFullFeedback;
  if (tag == "trajectory") return Algorithm::kTrajectory;
  if (tag == "compute_then_steer") return Algorithm::kComputeThenSteer;
  if (tag == "online") return Algorithm::kOnline;
  if (tag == "nf_online") return Algorithm::kNfOnline;
  throw ConfigError(fmt::format("steering.algorithm: unknown algorithm '{}'", tag));
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kNone: return "none";
    case Algorithm::kNormalForm: return "nf";
    case Algorithm::kFullFeedback: return "full_feedback";
    case Algorithm::kTrajectory: return "trajectory";
    case Algorithm::kComputeThenSteer: return "compute_then_steer";
    case Algorithm::kOnline: return "online";
    case Algorithm::kNfOnline: return "nf_online";
  }
  return "?";
}

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"game",
       {"tag", "n", "rows", "cols", "shots", "ship_value", "loss_multiplier", "horizon", "start1",
        "start2", "max_load", "max_bribe", "bribe_rounds", "item_value", "penalty", "compensation"}},
      {"steering",
       {"algorithm", "T", "burn_in", "target", "profile", "objective", "P", "P_mult", "alpha_mode",
        "alpha", "alpha_base", "alpha_cap", "window", "schedule_mode", "budget", "lambda",
        "inner_scheme"}},
      {"learner", {"tag", "eta", "epsilon", "linear_averaging"}},
      {"bce", {"iterations", "check_every", "tolerance", "value_tolerance", "lambda0"}},
      {"run", {"seed", "output", "player_csv"}},
  };
  return s;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

// Typed accessors over one section; every failure names "section.key".
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }
  std::string where(const std::string& key) const { return name_ + "." + key; }

  std::string str(const std::string& key) const { return trim(tree_->get<std::string>(key)); }

  std::optional<std::string> opt_str(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return str(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) const {
    if (!has(key)) return;
    out = parse<T>(key, str(key));
  }

  template <typename T>
  void read_opt(const std::string& key, std::optional<T>& out) const {
    if (!has(key)) return;
    out = parse<T>(key, str(key));
  }

 private:
  template <typename T>
  T parse(const std::string& key, const std::string& v) const {
    try {
      std::size_t used = 0;
      if constexpr (std::is_same_v<T, bool>) {
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        throw std::invalid_argument("bool");
      } else if constexpr (std::is_same_v<T, int>) {
        const long long x = std::stoll(v, &used);
        if (used == v.size() && x >= INT32_MIN && x <= INT32_MAX) return static_cast<int>(x);
      } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!v.empty() && v[0] != '-') {
          const unsigned long long x = std::stoull(v, &used);
          if (used == v.size()) return x;
        }
      } else {
        const double x = std::stod(v, &used);
        if (used == v.size() && !std::isnan(x)) return x;
      }
    } catch (const std::invalid_argument&) {
    } catch (const std::out_of_range&) {
    }
    const char* type = std::is_same_v<T, bool>  ? "a boolean"
                       : std::is_same_v<T, int> ? "an integer"
                       : std::is_same_v<T, std::uint64_t> ? "a nonnegative integer"
                                                          : "a number";
    throw ConfigError(fmt::format("{}: expected {}, got '{}'", where(key), type, v));
  }

  const pt::ptree* tree_;
  std::string name_;
};

Section section(const pt::ptree& root, const std::string& name) {
  const auto it = root.find(name);
  return {it == root.not_found() ? nullptr : &it->second, name};
}

void check_keys(const pt::ptree& root) {
  for (const auto& [name, body] : root) {
    const auto it = schema().find(name);
    if (it == schema().end()) {
      if (body.empty()) throw ConfigError(fmt::format("{}: key outside any section", name));
      throw ConfigError(fmt::format("[{}]: unknown section", name));
    }
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError(fmt::format("{}.{}: unknown key", name, key));
    }
  }
}

// "1,0;1": players separated by ';', actions per infoset by ','.
std::vector<std::vector<int>> parse_profile(const std::string& text) {
  std::vector<std::vector<int>> out;
  std::stringstream players(text);
  std::string player;
  while (std::getline(players, player, ';')) {
    std::vector<int> actions;
    std::stringstream ss(player);
    std::string a;
    while (std::getline(ss, a, ',')) {
      a = trim(a);
      std::size_t used = 0;
      int v = -1;
      try {
        v = std::stoi(a, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != a.size() || a.empty() || v < 0)
        throw ConfigError(fmt::format("steering.profile: bad action '{}'", a));
      actions.push_back(v);
    }
    out.push_back(std::move(actions));
  }
  if (out.empty()) throw ConfigError("steering.profile: empty profile");
  return out;
}

bool mediated(Algorithm a) {
  return a == Algorithm::kComputeThenSteer || a == Algorithm::kOnline || a == Algorithm::kNfOnline;
}

Scheme scheme_of(Algorithm a) {
  switch (a) {
    case Algorithm::kNone: return Scheme::kNone;
    case Algorithm::kNormalForm: return Scheme::kNormalForm;
    case Algorithm::kFullFeedback: return Scheme::kFullFeedback;
    default: return Scheme::kTrajectory;
  }
}

Theorem theorem_of(Scheme s) {
  switch (s) {
    case Scheme::kNormalForm: return Theorem::kNormalForm;
    case Scheme::kFullFeedback: return Theorem::kFullFeedback;
    default: return Theorem::kTrajectory;
  }
}

// Largest per-player regret bound for utilities in [0, 1].
RegretBound learner_bound(const LearnerSpec& spec, const GameTree& game, int players) {
  auto learners = std::make_shared<std::vector<std::unique_ptr<Learner>>>();
  for (Player i = 0; i < players; ++i) learners->push_back(make_learner(spec, game, i, 1.0));
  return [learners](double T) {
    double r = 0.0;
    for (const auto& l : *learners) r = std::max(r, l->regret_bound(T, 1.0));
    return r;
  };
}

int max_actions(const GameTree& game, int players) {
  int b = 1;
  for (int I = 0; I < game.num_infosets(); ++I) {
    if (game.infoset(I).player < players) b = std::max<int>(b, game.infoset(I).actions.size());
  }
  return b;
}

Profile explicit_profile(const GameTree& game, const std::vector<std::vector<int>>& actions) {
  if (static_cast<int>(actions.size()) != game.num_players())
    throw ConfigError(fmt::format("steering.profile: {} players given, game has {}", actions.size(),
                                  game.num_players()));
  Profile d;
  for (Player i = 0; i < game.num_players(); ++i) {
    const auto infosets = game.player_infosets(i);
    if (actions[i].size() != infosets.size())
      throw ConfigError(fmt::format("steering.profile: player {} needs {} actions, got {}", i,
                                    infosets.size(), actions[i].size()));
    for (std::size_t k = 0; k < infosets.size(); ++k) {
      if (actions[i][k] >= static_cast<int>(game.infoset(infosets[k]).actions.size()))
        throw ConfigError(fmt::format("steering.profile: action {} out of range for player {}",
                                      actions[i][k], i));
    }
    d.push_back(pure_strategy(game, i, actions[i]));
  }
  return d;
}

// Fills α/P settings of `sc` for a run in `game` (the game the learners see).
Hyperparams steer_params(const ExperimentConfig& cfg, const GameTree& game, double range,
                         SteerConfig& sc) {
  Hyperparams h;
  sc.alpha_base = cfg.alpha_base;
  sc.alpha_cap = cfg.alpha_cap.value_or(range);
  sc.window = cfg.window;
  switch (cfg.alpha_mode) {
    case AlphaSource::kFixed:
      sc.alpha = cfg.alpha;
      h.alpha = cfg.alpha;
      break;
    case AlphaSource::kDynamic:
      sc.alpha_mode = AlphaMode::kDynamic;
      h.alpha = sc.alpha_cap;
      break;
    case AlphaSource::kTheorem: {
      ScheduleInput in;
      in.theorem = theorem_of(sc.scheme);
      in.n = game.num_players();
      in.Z = game.num_terminals();
      in.R = learner_bound(cfg.learner, game, in.n);
      h = schedule(in, cfg.T, cfg.schedule_mode);
      sc.alpha = h.alpha;
      break;
    }
  }
  if (sc.scheme == Scheme::kTrajectory) {
    if (cfg.alpha_mode == AlphaSource::kTheorem && !cfg.P && !cfg.P_mult) {
      sc.cap = h.cap;
    } else if (cfg.P) {
      sc.cap = *cfg.P;
    } else if (cfg.P_mult) {
      sc.cap = *cfg.P_mult * range;
    } else {
      throw ConfigError("steering.P: trajectory steering needs P or P_mult");
    }
  }
  return h;
}

void fill_common(RunSummary& s, const SteeringMetrics& m) {
  s.final_gap = m.final_gap;
  s.average_payment = m.average_realized;
  s.average_welfare = m.average_welfare;
  s.final_welfare = m.rounds.empty() ? 0.0 : m.rounds.back().welfare;
  s.average_objective = m.average_objective;
  s.final_objective = m.rounds.empty() ? 0.0 : m.rounds.back().objective;
  s.regret = m.regret;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const Overrides& overrides) {
  pt::ptree root;
  try {
    std::istringstream in(text);
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  for (const auto& [key, value] : overrides) {
    const auto dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
      throw ConfigError(fmt::format("{}: overrides must look like section.key", key));
    root.put(pt::ptree::path_type(key, '.'), value);
  }
  check_keys(root);

  ExperimentConfig cfg;
  const Section game = section(root, "game");
  if (!game.has("tag")) throw ConfigError("game.tag: required key missing");
  cfg.game_text = game.str("tag");
  try {
    cfg.game = parse_benchmark(cfg.game_text);
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("game.tag: {}", e.what()));
  }
  BenchmarkSpec& g = cfg.game;
  game.read("n", g.n);
  game.read("rows", g.rows);
  game.read("cols", g.cols);
  game.read("shots", g.shots);
  game.read("ship_value", g.ship_value);
  game.read("loss_multiplier", g.loss_multiplier);
  game.read("horizon", g.horizon);
  game.read("start1", g.start1);
  game.read("start2", g.start2);
  game.read("max_load", g.max_load);
  game.read("max_bribe", g.max_bribe);
  game.read("bribe_rounds", g.bribe_rounds);
  game.read("item_value", g.item_value);
  game.read("penalty", g.penalty);
  game.read("compensation", g.compensation);

  const Section st = section(root, "steering");
  if (!st.has("algorithm")) throw ConfigError("steering.algorithm: required key missing");
  cfg.algorithm = parse_algorithm(st.str("algorithm"));
  if (!st.has("T")) throw ConfigError("steering.T: required key missing");
  st.read("T", cfg.T);
  st.read("burn_in", cfg.burn_in);
  if (cfg.T < 1) throw ConfigError("steering.T: must be positive");
  if (cfg.burn_in < 0) throw ConfigError("steering.burn_in: must be nonnegative");
  if (cfg.burn_in >= cfg.T) throw ConfigError("steering.burn_in: must be smaller than T");

  cfg.target = mediated(cfg.algorithm) ? "bce" : "canonical";
  if (auto t = st.opt_str("target")) {
    if (*t != "canonical" && *t != "profile" && *t != "bce")
      throw ConfigError(fmt::format("steering.target: unknown target '{}'", *t));
    if ((*t == "bce") != mediated(cfg.algorithm))
      throw ConfigError(fmt::format("steering.target: '{}' does not fit algorithm {}", *t,
                                    to_string(cfg.algorithm)));
    cfg.target = *t;
  }
  if (auto p = st.opt_str("profile")) {
    if (cfg.target != "profile") throw ConfigError("steering.profile: only used with target = profile");
    cfg.profile = parse_profile(*p);
  } else if (cfg.target == "profile") {
    throw ConfigError("steering.profile: required when target = profile");
  }
  if (auto o = st.opt_str("objective")) {
    try {
      cfg.objective = parse_objective(*o);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("steering.objective: {}", e.what()));
    }
  }

  st.read_opt("P", cfg.P);
  st.read_opt("P_mult", cfg.P_mult);
  if (cfg.P && cfg.P_mult) throw ConfigError("steering.P_mult: give either P or P_mult, not both");
  if (cfg.P && *cfg.P < 0) throw ConfigError("steering.P: must be nonnegative");
  if (cfg.P_mult && *cfg.P_mult <= 0) throw ConfigError("steering.P_mult: must be positive");

  if (auto m = st.opt_str("alpha_mode")) {
    if (*m == "fixed") cfg.alpha_mode = AlphaSource::kFixed;
    else if (*m == "dynamic") cfg.alpha_mode = AlphaSource::kDynamic;
    else if (*m == "theorem") cfg.alpha_mode = AlphaSource::kTheorem;
    else throw ConfigError(fmt::format("steering.alpha_mode: unknown mode '{}'", *m));
  }
  st.read("alpha", cfg.alpha);
  st.read("alpha_base", cfg.alpha_base);
  st.read_opt("alpha_cap", cfg.alpha_cap);
  st.read("window", cfg.window);
  if (cfg.alpha < 0) throw ConfigError("steering.alpha: must be nonnegative");
  if (cfg.alpha_base < 0) throw ConfigError("steering.alpha_base: must be nonnegative");
  if (cfg.alpha_cap && *cfg.alpha_cap < 0) throw ConfigError("steering.alpha_cap: must be nonnegative");
  if (cfg.window < 1) throw ConfigError("steering.window: must be positive");
  if (cfg.alpha_mode == AlphaSource::kDynamic &&
      (cfg.algorithm == Algorithm::kOnline || cfg.algorithm == Algorithm::kNfOnline))
    throw ConfigError("steering.alpha_mode: dynamic alpha is not available for online algorithms");
  if (auto m = st.opt_str("schedule_mode")) {
    if (*m == "strict") cfg.schedule_mode = ScheduleMode::kStrict;
    else if (*m == "clamp") cfg.schedule_mode = ScheduleMode::kClamp;
    else throw ConfigError(fmt::format("steering.schedule_mode: unknown mode '{}'", *m));
  }
  st.read("budget", cfg.budget);
  if (cfg.budget < 0) throw ConfigError("steering.budget: must be nonnegative");
  st.read_opt("lambda", cfg.lambda);
  if (cfg.lambda && *cfg.lambda <= 0) throw ConfigError("steering.lambda: must be positive");
  if (auto s = st.opt_str("inner_scheme")) {
    try {
      cfg.inner_scheme = parse_scheme(*s);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("steering.inner_scheme: {}", e.what()));
    }
  }

  const Section le = section(root, "learner");
  if (auto t = le.opt_str("tag")) cfg.learner.tag = *t;
  le.read("eta", cfg.learner.eta);
  le.read("epsilon", cfg.learner.epsilon);
  le.read("linear_averaging", cfg.learner.linear_averaging);
  if (cfg.learner.tag != "cfr+" && cfg.learner.tag != "mwu" && cfg.learner.tag != "exp3" &&
      cfg.learner.tag != "bandit_cfr")
    throw ConfigError(fmt::format("learner.tag: unknown learner '{}'", cfg.learner.tag));
  if (cfg.learner.eta <= 0) throw ConfigError("learner.eta: must be positive");
  if (cfg.learner.epsilon <= 0 || cfg.learner.epsilon > 1)
    throw ConfigError("learner.epsilon: must lie in (0, 1]");

  const Section bce = section(root, "bce");
  bce.read("iterations", cfg.bce.iterations);
  bce.read("check_every", cfg.bce.check_every);
  bce.read("tolerance", cfg.bce.tolerance);
  bce.read("value_tolerance", cfg.bce.value_tolerance);
  bce.read("lambda0", cfg.bce.lambda0);
  if (cfg.bce.iterations < 1) throw ConfigError("bce.iterations: must be positive");
  if (cfg.bce.check_every < 1) throw ConfigError("bce.check_every: must be positive");
  if (cfg.bce.lambda0 <= 0) throw ConfigError("bce.lambda0: must be positive");

  const Section rs = section(root, "run");
  rs.read("seed", cfg.seed);
  if (auto o = rs.opt_str("output")) cfg.output = *o;
  rs.read("player_csv", cfg.player_csv);

  // Fixed α against the theorem's precondition; needs |Z| of the steered game.
  if (cfg.alpha_mode == AlphaSource::kFixed && cfg.algorithm != Algorithm::kNone) {
    double limit = 1.0;
    const char* why = "1";
    if (cfg.algorithm == Algorithm::kFullFeedback ||
        (cfg.algorithm == Algorithm::kComputeThenSteer && cfg.inner_scheme == Scheme::kFullFeedback) ||
        cfg.algorithm == Algorithm::kOnline) {
      const GameTree base = build(cfg.game);
      const int Z = mediated(cfg.algorithm) ? augment(base).game.num_terminals() : base.num_terminals();
      limit = 1.0 / Z;
      why = "1/|Z|";
    } else if (cfg.algorithm == Algorithm::kNfOnline) {
      limit = 1.0 / (2.0 * build(cfg.game).num_players());
      why = "1/(2n)";
    }
    if (cfg.alpha > limit + 1e-15)
      throw ConfigError(fmt::format("steering.alpha: {} exceeds the precondition limit {} = {}",
                                    cfg.alpha, why, limit));
  }

  std::ostringstream echo;
  pt::write_ini(echo, root);
  cfg.echo = echo.str();
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

double reward_range(const GameTree& game) {
  const Matrix& u = game.utilities();
  if (u.size() == 0) return 0.0;
  return u.maxCoeff() - u.minCoeff();
}

int convergence_round(const SteeringMetrics& m, double reference, double tol) {
  const double band = tol * std::max(std::abs(reference), 1e-12);
  int first = -1;
  for (auto it = m.rounds.rbegin(); it != m.rounds.rend(); ++it) {
    if (std::abs(it->objective - reference) > band) break;
    first = it->round;
  }
  return first;
}

RunSummary run(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const GameTree game = build(cfg.game);
  const int n = game.num_players();
  const double range = reward_range(game);
  const Vector base_objective = objective_vector(game, n, cfg.objective);

  RunSummary s;
  s.algorithm = cfg.algorithm;
  s.game = game.name();
  s.T = cfg.T;
  s.seed = cfg.seed;
  s.config = cfg.echo;

  switch (cfg.algorithm) {
    case Algorithm::kNone:
    case Algorithm::kNormalForm:
    case Algorithm::kFullFeedback:
    case Algorithm::kTrajectory: {
      Profile d = cfg.target == "profile" ? explicit_profile(game, cfg.profile)
                                          : target_equilibrium(cfg.game, game);
      const Target target(game, std::move(d));
      SteerConfig sc;
      sc.scheme = scheme_of(cfg.algorithm);
      sc.T = cfg.T;
      sc.burn_in = cfg.burn_in;
      sc.budget = cfg.budget;
      sc.objective = base_objective;
      const Hyperparams h = steer_params(cfg, game, range, sc);
      s.alpha = h.alpha;
      s.clamped = h.clamped;
      s.P = scheme_cap(sc);
      LearnerPopulation pop(make_learners(cfg.learner, game, scheme_cap(sc)), cfg.seed);
      s.steering = run_steering(target, pop, sc, cfg.seed);
      s.reference_objective = expected_value(game, target.profile(), base_objective);
      break;
    }
    case Algorithm::kComputeThenSteer: {
      const AugmentedGame aug = augment(game);
      const Vector c = objective_vector(aug, cfg.objective);
      const BceSolution sol = solve_optimal_bce(aug, c, cfg.bce);
      if (!sol.certified)
        throw NotCertified(fmt::format("optimal equilibrium not certified: deviation benefit above {}",
                                       cfg.bce.tolerance));
      SteerConfig sc;
      sc.scheme = cfg.inner_scheme;
      sc.T = cfg.T;
      sc.burn_in = cfg.burn_in;
      sc.budget = cfg.budget;
      const Hyperparams h = steer_params(cfg, aug.game, range, sc);
      s.alpha = h.alpha;
      s.clamped = h.clamped;
      s.P = scheme_cap(sc);
      s.certified_lambda = sol.lambda;
      MediatedMetrics mm = compute_then_steer(aug, c, sol, cfg.learner, sc, cfg.seed);
      s.steering = std::move(mm.steering);
      s.reference_objective = mm.optimum;
      s.optimality_gap = mm.optimality_gap;
      break;
    }
    case Algorithm::kOnline:
    case Algorithm::kNfOnline: {
      const bool nf = cfg.algorithm == Algorithm::kNfOnline;
      const AugmentedGame aug = nf ? correlation_game(game) : augment(game);
      const Vector c = objective_vector(aug, cfg.objective);
      const BceSolution sol = solve_optimal_bce(aug, c, cfg.bce);
      if (!sol.certified)
        throw NotCertified(fmt::format("optimal equilibrium not certified: deviation benefit above {}",
                                       cfg.bce.tolerance));
      s.certified_lambda = sol.lambda;
      double alpha = cfg.alpha;
      double lambda = cfg.lambda.value_or(1.0);
      if (cfg.alpha_mode == AlphaSource::kTheorem) {
        ScheduleInput in;
        in.theorem = nf ? Theorem::kNfOnline : Theorem::kOnline;
        in.n = n;
        in.Z = aug.game.num_terminals();
        in.b = max_actions(game, n);
        if (nf) {
          auto med = std::make_shared<Exp3>(aug.game, aug.mediator, cfg.learner.epsilon, 1.0);
          in.R0 = [med](double T) { return med->regret_bound(T, 1.0); };
          LearnerSpec bandit = cfg.learner;
          bandit.tag = "exp3";
          in.R = learner_bound(bandit, aug.game, n);
        } else {
          auto med = std::make_shared<CfrPlus>(aug.game, aug.mediator);
          in.R0 = [med](double T) { return med->regret_bound(T, 1.0); };
          in.R = learner_bound(cfg.learner, aug.game, n);
        }
        const Hyperparams h = schedule(in, cfg.T, cfg.schedule_mode);
        alpha = h.alpha;
        if (!cfg.lambda) lambda = h.lambda;
        s.clamped = h.clamped;
      }
      s.alpha = alpha;
      s.lambda = lambda;
      MediatedMetrics mm;
      if (nf) {
        NfOnlineConfig oc;
        oc.T = cfg.T;
        oc.alpha = alpha;
        oc.lambda = lambda;
        oc.mediator_epsilon = cfg.learner.epsilon;
        oc.player_epsilon = cfg.learner.epsilon;
        mm = nf_online_steer(game, aug, c, sol.value, oc, cfg.seed);
        s.P = 3.0;
      } else {
        OnlineConfig oc;
        oc.T = cfg.T;
        oc.alpha = alpha;
        oc.lambda = lambda;
        oc.burn_in = cfg.burn_in;
        oc.learner = cfg.learner;
        mm = online_steer(aug, c, sol.value, oc, cfg.seed);
        s.P = 3.0;
      }
      s.steering = std::move(mm.steering);
      s.reference_objective = mm.optimum;
      s.optimality_gap = mm.optimality_gap;
      break;
    }
  }
  fill_common(s, s.steering);

  s.baseline = run_unsteered(game, cfg.learner, cfg.T, base_objective, cfg.seed);
  s.baseline_welfare = s.baseline.average_welfare;
  s.baseline_final_welfare = s.baseline.rounds.empty() ? 0.0 : s.baseline.rounds.back().welfare;
  s.baseline_final_objective = s.baseline.rounds.empty() ? 0.0 : s.baseline.rounds.back().objective;
  s.convergence_round = convergence_round(s.steering, s.reference_objective);

  s.wall_clock = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

std::string summary_json(const RunSummary& s, bool include_wall_clock) {
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(s.algorithm);
  j["game"] = s.game;
  j["T"] = s.T;
  j["seed"] = s.seed;
  j["P"] = s.P;
  j["alpha"] = s.alpha;
  if (s.algorithm == Algorithm::kOnline || s.algorithm == Algorithm::kNfOnline) j["lambda"] = s.lambda;
  j["alpha_clamped"] = s.clamped;
  j["final_directness_gap"] = s.final_gap;
  j["average_payment"] = s.average_payment;
  j["average_welfare"] = s.average_welfare;
  j["baseline_average_welfare"] = s.baseline_welfare;
  j["final_welfare"] = s.final_welfare;
  j["baseline_final_welfare"] = s.baseline_final_welfare;
  j["average_objective"] = s.average_objective;
  j["final_objective"] = s.final_objective;
  j["baseline_final_objective"] = s.baseline_final_objective;
  j["reference_objective"] = s.reference_objective;
  j["optimality_gap"] = s.optimality_gap ? nlohmann::ordered_json(*s.optimality_gap) : nullptr;
  j["certified_lambda"] = s.certified_lambda ? nlohmann::ordered_json(*s.certified_lambda) : nullptr;
  j["regret"] = s.regret;
  j["convergence_round"] = s.convergence_round;
  if (include_wall_clock) j["wall_clock_seconds"] = s.wall_clock;
  j["config"] = s.config;
  return j.dump(2);
}

void write_outputs(const RunSummary& s, const std::string& dir, bool player_csv) {
  fs::create_directories(dir);
  const fs::path root(dir);
  write_round_csv(s.steering, (root / "rounds.csv").string());
  write_round_csv(s.baseline, (root / "baseline.csv").string());
  if (player_csv) write_player_csv(s.steering, (root / "players.csv").string());
  std::ofstream out(root / "summary.json");
  out << summary_json(s) << '\n';
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", (root / "summary.json").string()));
}

std::vector<RunSummary> sweep(const std::string& config_text, const Overrides& overrides,
                              const std::string& key, const std::vector<std::string>& values,
                              unsigned workers) {
  // Validate every config up front so a bad value fails before any work.
  std::vector<ExperimentConfig> configs;
  for (const std::string& v : values) {
    Overrides o = overrides;
    o.emplace_back(key, v);
    ExperimentConfig c = parse_config(config_text, o);
    if (!c.output.empty()) c.output = (fs::path(c.output) / fmt::format("{}={}", key, v)).string();
    configs.push_back(std::move(c));
  }
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, std::max<std::size_t>(1, configs.size()));

  std::vector<RunSummary> out(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < configs.size(); k = next++) {
      try {
        out[k] = run(configs[k]);
        if (!configs[k].output.empty()) write_outputs(out[k], configs[k].output, configs[k].player_csv);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace steer
