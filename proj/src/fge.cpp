#include "clocksync/fge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "clocksync/error.hpp"

namespace clocksync {

BackwardCoefficients backward_coefficients(std::span<const double> series,
                                           const LikelihoodModel& model, double sigma_gm) {
  if (!(sigma_gm > 0.0) || !std::isfinite(sigma_gm)) {
    throw ConfigError("Gauss-Markov sigma must be positive for the factor-graph estimator; "
                      "use ML path for a static offset");
  }
  if (series.empty()) throw DomainError("empty series");

  const std::size_t n = series.size();
  const double var = sigma_gm * sigma_gm;
  const double half_precision = 1.0 / (2.0 * var);
  const double alpha = -sigma_eta_sq(model) / 2.0;

  BackwardCoefficients out;
  out.sigma_gm = sigma_gm;
  out.a.resize(n);
  out.b.assign(n, -half_precision);
  out.c.assign(n, 1.0 / var);
  out.d.resize(n);
  out.alpha.assign(n, alpha);
  out.beta.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.beta[k] = eta(model, series[k]);

  out.a[n - 1] = -half_precision + alpha;
  out.d[n - 1] = out.beta[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) {
    const double a_next = out.a[k + 1];
    const double c_next = out.c[k + 1];
    out.a[k] = -half_precision + out.alpha[k] + out.b[k + 1] - c_next * c_next / (4.0 * a_next);
    out.d[k] = out.beta[k] - c_next * out.d[k + 1] / (2.0 * a_next);
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(out.a[k] < 0.0)) {
      std::ostringstream msg;
      msg << "backward recursion produced A_" << k + 1 << " = " << out.a[k] << " >= 0";
      throw InvariantError(msg.str());
    }
  }
  return out;
}

double xi0_estimate(const BackwardCoefficients& coeffs) {
  if (coeffs.size() == 0) throw DomainError("empty coefficient set");
  const double a = coeffs.a[0];
  const double b = coeffs.b[0];
  const double c = coeffs.c[0];
  const double d = coeffs.d[0];
  const double denominator = 4.0 * a * b - c * c;
  if (std::abs(denominator) <= kSingularDenominator * c * c) {
    // The message into x_0 is linear with slope sign(D_1): unbounded maximizer.
    return std::copysign(std::numeric_limits<double>::infinity(), c * d);
  }
  return c * d / denominator;
}

double g_apply(const BackwardCoefficients& coeffs, std::size_t k, double x) {
  if (k == 0 || k > coeffs.size()) throw DomainError("g_apply: step index out of range");
  const double a = coeffs.a[k - 1];
  if (!(a < 0.0)) throw InvariantError("g_apply: A_k must be negative");
  return -(coeffs.c[k - 1] * x + coeffs.d[k - 1]) / (2.0 * a);
}

namespace {

void check_sizes(std::span<const double> series, const BackwardCoefficients& coeffs) {
  if (series.empty()) throw DomainError("empty series");
  if (series.size() != coeffs.size()) {
    throw DomainError("coefficients were computed for a series of different length");
  }
}

}  // namespace

ChainEstimate fge_forward(std::span<const double> series, const LikelihoodModel& model,
                          const BackwardCoefficients& coeffs) {
  check_sizes(series, coeffs);
  ChainEstimate out;
  out.x0_hat = xi0_estimate(coeffs);
  out.per_step.resize(series.size());
  double x = out.x0_hat;
  for (std::size_t k = 1; k <= series.size(); ++k) {
    const double unconstrained = g_apply(coeffs, k, x);
    x = model.constrained() ? std::min(unconstrained, series[k - 1]) : unconstrained;
    out.per_step[k - 1] = x;
  }
  return out;
}

double fge_composition(std::span<const double> series, const LikelihoodModel& model,
                       const BackwardCoefficients& coeffs) {
  check_sizes(series, coeffs);
  const std::size_t n = series.size();
  // G_j^N(x) = g_N(g_{N-1}(... g_j(x)))
  const auto compose = [&](std::size_t j, double x) {
    for (std::size_t m = j; m <= n; ++m) x = g_apply(coeffs, m, x);
    return x;
  };
  double best = compose(1, xi0_estimate(coeffs));
  if (!model.constrained()) return best;
  best = std::min(best, series[n - 1]);
  for (std::size_t j = 2; j <= n; ++j) best = std::min(best, compose(j, series[j - 2]));
  return best;
}

double fge_exponential_closed_form(std::span<const double> series, double lambda,
                                   double sigma_gm) {
  if (series.empty()) throw DomainError("empty series");
  if (!(lambda > 0.0) || !(sigma_gm > 0.0)) {
    throw ConfigError("lambda and sigma must be positive");
  }
  const double step = lambda * sigma_gm * sigma_gm;
  const std::size_t n = series.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    const double lag = static_cast<double>(k);
    best = std::min(best, series[n - 1 - k] + 0.5 * lag * (lag + 1.0) * step);
  }
  return best;
}

double linear_penalty_exponential_estimate(std::span<const double> series, double lambda,
                                           double sigma_gm) {
  if (series.empty()) throw DomainError("empty series");
  if (!(lambda > 0.0) || !(sigma_gm > 0.0)) {
    throw ConfigError("lambda and sigma must be positive");
  }
  const double step = lambda * sigma_gm * sigma_gm;
  const std::size_t n = series.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    best = std::min(best, series[n - 1 - k] + static_cast<double>(k) * step);
  }
  return best;
}

FgeEstimate fge_theta(std::span<const double> u, std::span<const double> v,
                      const LikelihoodModel& model_u, const LikelihoodModel& model_v,
                      double sigma_gm) {
  if (u.size() != v.size()) throw DomainError("U and V series differ in length");
  const auto coeffs_u = backward_coefficients(u, model_u, sigma_gm);
  const auto coeffs_v = backward_coefficients(v, model_v, sigma_gm);
  auto xi = fge_forward(u, model_u, coeffs_u);
  auto psi = fge_forward(v, model_v, coeffs_v);

  FgeEstimate out;
  out.xi_hat_n = xi.final();
  out.psi_hat_n = psi.final();
  out.theta_hat_n = (out.xi_hat_n - out.psi_hat_n) / 2.0;
  out.xi0_hat = xi.x0_hat;
  out.psi0_hat = psi.x0_hat;
  out.per_step_xi = std::move(xi.per_step);
  out.per_step_psi = std::move(psi.per_step);
  return out;
}

}  // namespace clocksync
