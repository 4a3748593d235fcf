#pragma once

#include <span>
#include <string>
#include <string_view>

namespace clocksync {

enum class Family { kGaussian, kLogNormal, kExponential };

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

/// Delay likelihood of one direction of the exchange.
///
/// Gaussian and log-normal laws are parameterized by the standard deviation
/// (of the observation, resp. of its logarithm); the exponential law by its
/// rate. Only the exponential law is constrained: its support U >= xi
/// depends on the location parameter.
class LikelihoodModel {
 public:
  static LikelihoodModel gaussian(double sigma);
  static LikelihoodModel lognormal(double sigma);
  static LikelihoodModel exponential(double lambda);

  Family family() const { return family_; }
  /// sigma for Gaussian/log-normal, lambda for exponential.
  double parameter() const { return parameter_; }
  bool constrained() const { return family_ == Family::kExponential; }

  /// Variance of a single observation around its location (log-domain for
  /// the log-normal law).
  double delay_variance() const;

  std::string describe() const;

  friend bool operator==(const LikelihoodModel&, const LikelihoodModel&) = default;

 private:
  LikelihoodModel(Family family, double parameter)
      : family_(family), parameter_(parameter) {}

  Family family_;
  double parameter_;
};

/// Quadratic log-partition phi(rho) = a * rho^2 with a = sigma_eta^2 / 2.
struct ExpFamSpec {
  double sigma_eta_sq = 0.0;
  double a_coeff = 0.0;

  static ExpFamSpec from_variance(double sigma_eta_sq);
};

/// Sufficient statistic eta(z). Throws DomainError for log-normal z <= 0.
double eta(const LikelihoodModel& model, double z);

/// Variance of the sufficient statistic: 1/sigma^2, or 0 for exponential.
double sigma_eta_sq(const LikelihoodModel& model);

ExpFamSpec expfam_spec(const LikelihoodModel& model);

/// log M_eta(h) = phi(rho + h) - phi(rho) = sigma_eta^2 (rho h + h^2 / 2).
double log_mgf_eta(const LikelihoodModel& model, double rho, double h);
double mgf_eta(const LikelihoodModel& model, double rho, double h);

/// Unbiased sample variance of eta over the series (divisor N - 1).
double empirical_sigma_eta_sq(std::span<const double> series,
                              const LikelihoodModel& model);

}  // namespace clocksync
