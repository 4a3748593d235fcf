#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clocksync/likelihood.hpp"

namespace clocksync {

/// Quadratic forms of the backward max-product messages along one chain.
///
/// Entry k - 1 holds the coefficients of step k (k = 1..N). The message
/// from step k to step k - 1 is maximized over x_k of
///   A_k x_k^2 + B_k x_{k-1}^2 + C_k x_k x_{k-1} + D_k x_k.
struct BackwardCoefficients {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c;
  std::vector<double> d;
  std::vector<double> alpha;  // -sigma_eta_k^2 / 2
  std::vector<double> beta;   // eta(z_k)
  double sigma_gm = 0.0;

  std::size_t size() const { return a.size(); }
};

struct ChainEstimate {
  double x0_hat = 0.0;            // maximizer of the message into x_0
  std::vector<double> per_step;   // x_hat_1 .. x_hat_N
  double final() const { return per_step.back(); }
};

struct FgeEstimate {
  double xi_hat_n = 0.0;
  double psi_hat_n = 0.0;
  double theta_hat_n = 0.0;
  double xi0_hat = 0.0;
  double psi0_hat = 0.0;
  std::vector<double> per_step_xi;
  std::vector<double> per_step_psi;
};

/// Singular threshold of the x_0 maximizer, relative to C_1^2.
inline constexpr double kSingularDenominator = 1e-12;

BackwardCoefficients backward_coefficients(std::span<const double> series,
                                           const LikelihoodModel& model, double sigma_gm);

/// C_1 D_1 / (4 A_1 B_1 - C_1^2), or +inf when the denominator vanishes
/// (sigma_eta^2 = 0).
double xi0_estimate(const BackwardCoefficients& coeffs);

/// g_k(x) = -(C_k x + D_k) / (2 A_k), k is 1-based. Monotone increasing.
double g_apply(const BackwardCoefficients& coeffs, std::size_t k, double x);

/// Forward min-recursion: x_k = min(g_k(x_{k-1}), z_k) for constrained
/// models, x_k = g_k(x_{k-1}) otherwise.
ChainEstimate fge_forward(std::span<const double> series, const LikelihoodModel& model,
                          const BackwardCoefficients& coeffs);

/// Explicit form min(z_N, G_N^N(z_{N-1}), ..., G_2^N(z_1), G_1^N(x_0)) for
/// constrained models, G_1^N(x_0) otherwise. O(N^2); used for cross-checks.
double fge_composition(std::span<const double> series, const LikelihoodModel& model,
                       const BackwardCoefficients& coeffs);

/// Closed form of the recursion for exponential delays:
///   min_k z_{N-k} + k (k + 1) / 2 * lambda sigma^2,  k = 0..N-1.
double fge_exponential_closed_form(std::span<const double> series, double lambda,
                                   double sigma_gm);

/// The constant-penalty variant min_k z_{N-k} + k lambda sigma^2. This is the
/// greedy filter x_k = min(z_k, x_{k-1} + lambda sigma^2); it is not the MAP
/// of the chain for N >= 3 and is kept only for comparison.
double linear_penalty_exponential_estimate(std::span<const double> series,
                                           double lambda, double sigma_gm);

/// Runs the xi-chain on U and the psi-chain on V.
FgeEstimate fge_theta(std::span<const double> u, std::span<const double> v,
                      const LikelihoodModel& model_u, const LikelihoodModel& model_v,
                      double sigma_gm);

}  // namespace clocksync
