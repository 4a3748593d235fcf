#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clocksync/likelihood.hpp"
#include "clocksync/random.hpp"

namespace clocksync {

enum class BoundKind { kCrb, kChrb, kBcrb, kBchrb };

std::string_view bound_name(BoundKind kind);

struct SearchDiagnostics {
  std::vector<double> argmin;  // h (CHRB) or the h-vector (BCHRB)
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  double start_objective = 0.0;
  double objective = 0.0;  // achieved inf estimate (information, not variance)
  bool at_boundary = false;
  bool converged = true;
};

struct BoundReport {
  BoundKind kind = BoundKind::kCrb;
  double per_param_bound = 0.0;  // variance bound for xi_hat (or rho_k)
  double theta_mse_bound = 0.0;  // assuming an identical, unbiased psi chain
  std::optional<SearchDiagnostics> diagnostics;
};

struct BiasPair {
  double b_xi = 0.0;
  double b_psi = 0.0;
};

/// 1-D search for the CHRB infimum over h.
struct ScalarSearchConfig {
  double h_min = 1e-6;
  double h_max = 10.0;
  std::size_t grid_points = 400;
  double rel_tol = 1e-8;
};

/// Multi-dimensional search for the BCHRB infimum over the h-vector.
struct VectorSearchConfig {
  ScalarSearchConfig slice{};  // constant-h slice used as the starting point
  std::size_t max_evaluations = 10000;
  double rel_tol = 1e-8;
};

/// 1 / (N sigma_eta^2). Throws ConfigError for constrained models.
double crb(const LikelihoodModel& model, std::size_t n);

/// E[exp(2 h eta(Z)) I(Z - rho - h)]. Exponential: exp(lambda h) for h >= 0
/// and exp(2 lambda h) for h < 0. Unconstrained laws carry no indicator and
/// give M_eta(rho, 2h).
double zeta(const LikelihoodModel& model, double rho, double h);
double log_zeta(const LikelihoodModel& model, double rho, double h);

/// Sampling estimate of zeta from `samples` draws of Z with location rho.
double zeta_monte_carlo(const LikelihoodModel& model, double rho, double h,
                        std::size_t samples, RandomStream& stream);

/// (M^{-2N}(h) zeta^N(h) - 1) / h^2, evaluated in log-space.
double chrb_objective(const LikelihoodModel& model, std::size_t n, double h);

/// [inf_h chrb_objective]^{-1}. Constrained models search h > 0 only;
/// unconstrained models search both signs.
BoundReport chrb(const LikelihoodModel& model, std::size_t n,
                 const ScalarSearchConfig& search = {});

struct BcrbTrace {
  std::vector<double> information;  // J(1) .. J(k)
  std::vector<double> bound;        // 1 / J(j), +inf while J = 0
};

/// J(j+1) = (sigma^2 + 1/J(j))^{-1} + sigma_eta_j^2 from J(0) = 0; one
/// entry of `sigma_eta_sq_per_step` per step.
BcrbTrace bcrb(std::span<const double> sigma_eta_sq_per_step, double sigma_gm);
BcrbTrace bcrb(const LikelihoodModel& model, double sigma_gm, std::size_t k);

/// log T_k(h) for h = (h_1..h_k) with h_0 = 0.
double bchrb_log_t(const LikelihoodModel& model, double sigma_gm,
                   std::span<const double> h);

/// (T_k(h) - 1) / h_k^2.
double bchrb_objective(const LikelihoodModel& model, double sigma_gm,
                       std::span<const double> h);

/// Best objective over the constant slice h_j = c.
struct SliceMinimum {
  double c = 0.0;
  double objective = 0.0;
};
SliceMinimum bchrb_constant_slice(const LikelihoodModel& model, double sigma_gm,
                                  std::size_t k, const ScalarSearchConfig& search = {});

BoundReport bchrb(const LikelihoodModel& model, double sigma_gm, std::size_t k,
                  const VectorSearchConfig& search = {});

/// 1/4 (bound_xi + bound_psi) + 1/4 (b_xi - b_psi)^2.
double mse_bound_theta(double bound_xi, double bound_psi, const BiasPair& biases = {});

/// Exact MSE of the ML offset estimator for matched families.
double ml_mse_oracle(const LikelihoodModel& model_u, const LikelihoodModel& model_v,
                     std::size_t n);

/// Bias of the ML location estimator: 1/(lambda N) for exponential, else 0.
double ml_bias(const LikelihoodModel& model, std::size_t n);

}  // namespace clocksync
