#include "clocksync/likelihood.hpp"

#include <cmath>
#include <sstream>

#include "clocksync/error.hpp"

namespace clocksync {

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kGaussian:
      return "gaussian";
    case Family::kLogNormal:
      return "lognormal";
    case Family::kExponential:
      return "exponential";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::kGaussian;
  if (name == "lognormal") return Family::kLogNormal;
  if (name == "exponential") return Family::kExponential;
  throw ConfigError("unknown distribution '" + std::string(name) +
                    "' (expected gaussian, lognormal or exponential)");
}

namespace {

double require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << what << " must be positive and finite, got " << value;
    throw ConfigError(msg.str());
  }
  return value;
}

}  // namespace

LikelihoodModel LikelihoodModel::gaussian(double sigma) {
  return {Family::kGaussian, require_positive(sigma, "gaussian sigma")};
}

LikelihoodModel LikelihoodModel::lognormal(double sigma) {
  return {Family::kLogNormal, require_positive(sigma, "lognormal sigma")};
}

LikelihoodModel LikelihoodModel::exponential(double lambda) {
  return {Family::kExponential, require_positive(lambda, "exponential lambda")};
}

double LikelihoodModel::delay_variance() const {
  if (family_ == Family::kExponential) return 1.0 / (parameter_ * parameter_);
  return parameter_ * parameter_;
}

std::string LikelihoodModel::describe() const {
  std::ostringstream out;
  out << family_name(family_) << (constrained() ? "(lambda=" : "(sigma=") << parameter_
      << ')';
  return out.str();
}

ExpFamSpec ExpFamSpec::from_variance(double sigma_eta_sq) {
  if (!(sigma_eta_sq >= 0.0)) {
    throw DomainError("sigma_eta^2 must be non-negative");
  }
  return {sigma_eta_sq, sigma_eta_sq / 2.0};
}

double eta(const LikelihoodModel& model, double z) {
  const double p = model.parameter();
  switch (model.family()) {
    case Family::kGaussian:
      return z / (p * p);
    case Family::kLogNormal:
      if (!(z > 0.0)) {
        std::ostringstream msg;
        msg << "log-normal observation must be positive, got " << z;
        throw DomainError(msg.str());
      }
      return std::log(z) / (p * p);
    case Family::kExponential:
      return p;
  }
  return 0.0;
}

double sigma_eta_sq(const LikelihoodModel& model) {
  if (model.family() == Family::kExponential) return 0.0;
  const double p = model.parameter();
  return 1.0 / (p * p);
}

ExpFamSpec expfam_spec(const LikelihoodModel& model) {
  return ExpFamSpec::from_variance(sigma_eta_sq(model));
}

double log_mgf_eta(const LikelihoodModel& model, double rho, double h) {
  return sigma_eta_sq(model) * (rho * h + 0.5 * h * h);
}

double mgf_eta(const LikelihoodModel& model, double rho, double h) {
  return std::exp(log_mgf_eta(model, rho, h));
}

double empirical_sigma_eta_sq(std::span<const double> series,
                              const LikelihoodModel& model) {
  if (series.size() < 2) {
    throw DomainError("empirical sigma_eta^2 needs at least two observations");
  }
  // Welford
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double z : series) {
    const double x = eta(model, z);
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  return m2 / static_cast<double>(count - 1);
}

}  // namespace clocksync
