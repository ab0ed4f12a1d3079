#pragma once

#include "steer/types.hpp"

#include <functional>
#include <string_view>

namespace steer {

enum class Theorem {
  kNormalForm,    // ε = 4nR/T, α = √ε, needs α ≤ 1
  kFullFeedback,  // ε = 4nR/T, α = √ε, needs α ≤ 1/|Z|
  kTrajectory,    // ε = R/T, α = 4|Z|^{1/2} ε^{1/4}, P = 2|Z|^{1/2} ε^{-1/4}, needs α ≤ 1
  kOnline,        // ε = (R0 + 4nR)/T, α = ε^{2/3}|Z|^{-1/3}, λ = |Z|^{2/3} ε^{-1/3}, needs α ≤ 1/|Z|
  kNfOnline,      // ε = (R0 + 4nR)/T, α = |Z|^{1/3} n^{-2/3} b^{1/3} ε^{2/3},
                  // λ = |Z|^{1/3} n^{1/3} b^{1/3} ε^{-1/3}, needs α ≤ 1/(2n)
};

Theorem parse_theorem(std::string_view tag);

struct Hyperparams {
  double alpha = 0.0;
  double cap = 0.0;  // per-round payment bound P of the scheme
  double epsilon = 0.0;
  double lambda = 0.0;
  double T = 0.0;
  bool clamped = false;  // α was cut to the precondition limit
};

using RegretBound = std::function<double(double T)>;

struct ScheduleInput {
  Theorem theorem = Theorem::kNormalForm;
  RegretBound R;   // per-player bound for utilities in [0, 1]
  RegretBound R0;  // mediator's bound (online theorems only)
  int n = 2;
  int Z = 1;
  int b = 2;  // max actions per player (normal-form online)
};

enum class ScheduleMode {
  kStrict,  // precondition violation is an error
  kClamp,   // cut α to its limit and keep the rest of the formulas
};

struct HorizonTooShort : ConfigError {
  HorizonTooShort(double T, double min_T);
  double min_T;
};

Hyperparams schedule(const ScheduleInput& in, double T, ScheduleMode mode = ScheduleMode::kStrict);

// Smallest integer T meeting the precondition, assuming R(T)/T decreases.
// Infinity when no T up to 2^60 works.
double minimal_horizon(const ScheduleInput& in);

// Largest α the theorem allows.
double alpha_limit(const ScheduleInput& in);

}  // namespace steer
