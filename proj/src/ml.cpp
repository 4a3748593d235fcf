#include "clocksync/ml.hpp"

#include <algorithm>
#include <limits>

#include "clocksync/error.hpp"

namespace clocksync {

namespace {

double eta_sum(std::span<const double> series, const LikelihoodModel& model) {
  double sum = 0.0;
  for (double z : series) sum += eta(model, z);
  return sum;
}

}  // namespace

double ml_unconstrained(std::span<const double> series, const LikelihoodModel& model,
                        const ExpFamSpec& spec) {
  if (model.constrained()) {
    throw ConfigError("unconstrained ML requested for a constrained model; use ml_constrained");
  }
  if (series.empty()) throw DomainError("empty series");
  if (!(spec.sigma_eta_sq > 0.0)) throw DomainError("unconstrained ML undefined");
  return eta_sum(series, model) / (static_cast<double>(series.size()) * spec.sigma_eta_sq);
}

double ml_unconstrained(std::span<const double> series, const LikelihoodModel& model) {
  return ml_unconstrained(series, model, expfam_spec(model));
}

ConstrainedMl ml_constrained(std::span<const double> series, const LikelihoodModel& model) {
  if (!model.constrained()) {
    throw ConfigError("constrained ML requested for an unconstrained model");
  }
  if (series.empty()) throw DomainError("empty series");
  const double first_order = *std::min_element(series.begin(), series.end());
  const double s2 = sigma_eta_sq(model);
  const double stationary =
      s2 > 0.0 ? eta_sum(series, model) / (static_cast<double>(series.size()) * s2)
               : std::numeric_limits<double>::infinity();
  if (stationary <= first_order) return {stationary, false};
  return {first_order, true};
}

namespace {

ConstrainedMl location_ml(std::span<const double> series, const LikelihoodModel& model) {
  if (model.constrained()) return ml_constrained(series, model);
  return {ml_unconstrained(series, model), false};
}

}  // namespace

MlEstimate ml_theta(std::span<const double> u, std::span<const double> v,
                    const LikelihoodModel& model_u, const LikelihoodModel& model_v) {
  const auto xi = location_ml(u, model_u);
  const auto psi = location_ml(v, model_v);
  MlEstimate out;
  out.xi_hat = xi.value;
  out.psi_hat = psi.value;
  out.clamped_u = xi.clamped;
  out.clamped_v = psi.clamped;
  out.theta_hat = (xi.value - psi.value) / 2.0;
  out.d_hat = (xi.value + psi.value) / 2.0;
  return out;
}

}  // namespace clocksync
