#include "steer/schedule.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

namespace steer {

Theorem parse_theorem(std::string_view tag) {
  if (tag == "normal_form") return Theorem::kNormalForm;
  if (tag == "full_feedback") return Theorem::kFullFeedback;
  if (tag == "trajectory") return Theorem::kTrajectory;
  if (tag == "online") return Theorem::kOnline;
  if (tag == "nf_online") return Theorem::kNfOnline;
  throw ConfigError(fmt::format("unknown schedule '{}'", tag));
}

HorizonTooShort::HorizonTooShort(double T, double min_T)
    : ConfigError(fmt::format("horizon too short: T = {} violates the schedule precondition; minimal T = {}",
                              T, min_T)),
      min_T(min_T) {}

double alpha_limit(const ScheduleInput& in) {
  switch (in.theorem) {
    case Theorem::kNormalForm:
    case Theorem::kTrajectory:
      return 1.0;
    case Theorem::kFullFeedback:
    case Theorem::kOnline:
      return 1.0 / in.Z;
    case Theorem::kNfOnline:
      return 1.0 / (2.0 * in.n);
  }
  return 0.0;
}

namespace {

Hyperparams formulas(const ScheduleInput& in, double T) {
  if (!in.R) throw ConfigError("schedule needs a regret bound");
  if (!(T >= 1)) throw ConfigError("schedule needs T >= 1");
  const double Z = in.Z, n = in.n, b = in.b;
  Hyperparams h;
  h.T = T;
  switch (in.theorem) {
    case Theorem::kNormalForm:
      h.epsilon = 4 * n * in.R(T) / T;
      h.alpha = std::sqrt(h.epsilon);
      h.cap = 1 + h.alpha;
      break;
    case Theorem::kFullFeedback:
      h.epsilon = 4 * n * in.R(T) / T;
      h.alpha = std::sqrt(h.epsilon);
      h.cap = 3;
      break;
    case Theorem::kTrajectory:
      h.epsilon = in.R(T) / T;
      h.alpha = 4 * std::sqrt(Z) * std::pow(h.epsilon, 0.25);
      h.cap = 2 * std::sqrt(Z) * std::pow(h.epsilon, -0.25);
      break;
    case Theorem::kOnline:
    case Theorem::kNfOnline: {
      if (!in.R0) throw ConfigError("online schedules need the mediator's regret bound");
      h.epsilon = (in.R0(T) + 4 * n * in.R(T)) / T;
      if (in.theorem == Theorem::kOnline) {
        h.alpha = std::pow(h.epsilon, 2.0 / 3) * std::pow(Z, -1.0 / 3);
        h.lambda = std::pow(Z, 2.0 / 3) * std::pow(h.epsilon, -1.0 / 3);
        h.cap = 3;
      } else {
        h.alpha = std::cbrt(Z) * std::pow(n, -2.0 / 3) * std::cbrt(b) * std::pow(h.epsilon, 2.0 / 3);
        h.lambda = std::cbrt(Z) * std::cbrt(n) * std::cbrt(b) * std::pow(h.epsilon, -1.0 / 3);
        h.cap = 2;
      }
      break;
    }
  }
  return h;
}

bool admissible(const ScheduleInput& in, double T) {
  return formulas(in, T).alpha <= alpha_limit(in) + 1e-15;
}

}  // namespace

double minimal_horizon(const ScheduleInput& in) {
  double hi = 1;
  while (!admissible(in, hi)) {
    hi *= 2;
    if (hi > std::ldexp(1.0, 60)) return std::numeric_limits<double>::infinity();
  }
  double lo = hi / 2;  // inadmissible unless hi == 1
  if (hi == 1) return 1;
  while (hi - lo > 1) {
    const double mid = std::floor((lo + hi) / 2);
    (admissible(in, mid) ? hi : lo) = mid;
  }
  return hi;
}

Hyperparams schedule(const ScheduleInput& in, double T, ScheduleMode mode) {
  Hyperparams h = formulas(in, T);
  const double limit = alpha_limit(in);
  if (h.alpha > limit + 1e-15) {
    if (mode == ScheduleMode::kStrict) throw HorizonTooShort(T, minimal_horizon(in));
    h.alpha = limit;
    if (in.theorem == Theorem::kNormalForm) h.cap = 1 + h.alpha;
    h.clamped = true;
  }
  if ((in.theorem == Theorem::kOnline || in.theorem == Theorem::kNfOnline) && h.lambda < 1) {
    if (mode == ScheduleMode::kStrict) throw HorizonTooShort(T, minimal_horizon(in));
    h.lambda = 1;
    h.clamped = true;
  }
  return h;
}

}  // namespace steer
