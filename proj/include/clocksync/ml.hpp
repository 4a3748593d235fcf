#pragma once

#include <span>

#include "clocksync/likelihood.hpp"

namespace clocksync {

struct MlEstimate {
  double xi_hat = 0.0;
  double psi_hat = 0.0;
  double theta_hat = 0.0;
  double d_hat = 0.0;
  // True when the first order statistic was the active branch.
  bool clamped_u = false;
  bool clamped_v = false;
};

/// Stationary point sum(eta) / (N sigma_eta^2) of the concave exponent.
/// Requires an unconstrained model with sigma_eta^2 > 0.
double ml_unconstrained(std::span<const double> series, const LikelihoodModel& model);

/// Same, with an externally supplied sigma_eta^2 (e.g. the empirical moment).
double ml_unconstrained(std::span<const double> series, const LikelihoodModel& model,
                        const ExpFamSpec& spec);

struct ConstrainedMl {
  double value = 0.0;
  bool clamped = false;
};

/// min(sum(eta) / (N sigma_eta^2), z_(1)); for sigma_eta^2 = 0 the stationary
/// point is +inf and the first order statistic is returned.
ConstrainedMl ml_constrained(std::span<const double> series, const LikelihoodModel& model);

MlEstimate ml_theta(std::span<const double> u, std::span<const double> v,
                    const LikelihoodModel& model_u, const LikelihoodModel& model_v);

}  // namespace clocksync
