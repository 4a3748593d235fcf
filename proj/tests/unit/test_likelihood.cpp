#include <doctest.h>

#include <cmath>
#include <vector>

#include "clocksync/error.hpp"
#include "clocksync/likelihood.hpp"
#include "clocksync/model.hpp"
#include "clocksync/random.hpp"
#include "oracles.hpp"

using namespace clocksync;

TEST_CASE("model constructors validate parameters") {
  CHECK_THROWS_AS(LikelihoodModel::gaussian(0.0), ConfigError);
  CHECK_THROWS_AS(LikelihoodModel::lognormal(-1.0), ConfigError);
  CHECK_THROWS_AS(LikelihoodModel::exponential(std::nan("")), ConfigError);
  CHECK_FALSE(LikelihoodModel::gaussian(0.1).constrained());
  CHECK_FALSE(LikelihoodModel::lognormal(0.1).constrained());
  CHECK(LikelihoodModel::exponential(10).constrained());
}

TEST_CASE("family names round trip") {
  for (Family f : {Family::kGaussian, Family::kLogNormal, Family::kExponential}) {
    CHECK(parse_family(family_name(f)) == f);
  }
  CHECK_THROWS_AS(parse_family("weibull"), ConfigError);
}

TEST_CASE("eta") {
  CHECK(eta(LikelihoodModel::gaussian(0.1), 2.0) == doctest::Approx(200.0).epsilon(1e-14));
  CHECK(eta(LikelihoodModel::lognormal(1.0), std::exp(1.0)) == doctest::Approx(1.0));
  CHECK(eta(LikelihoodModel::exponential(10), 123.4) == 10.0);
  CHECK(eta(LikelihoodModel::exponential(10), -5.0) == 10.0);
  CHECK_THROWS_AS(eta(LikelihoodModel::lognormal(1.0), 0.0), DomainError);
  CHECK_THROWS_AS(eta(LikelihoodModel::lognormal(1.0), -2.0), DomainError);
}

TEST_CASE("eta is the slope of the log density in the location") {
  // d/dx log f(z | x) = eta(z) - sigma_eta^2 x for the quadratic log-partition.
  const double h = 1e-5;
  for (const auto& model : {LikelihoodModel::gaussian(0.1), LikelihoodModel::gaussian(2.0),
                            LikelihoodModel::lognormal(0.5)}) {
    for (double z : {0.3, 1.0, 2.0, 7.5}) {
      for (double x : {-0.4, 0.0, 1.3}) {
        const double slope = (oracle::log_density(model, z, x + h) -
                              oracle::log_density(model, z, x - h)) /
                             (2.0 * h);
        const double expected = eta(model, z) - sigma_eta_sq(model) * x;
        CHECK(slope == doctest::Approx(expected).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("sigma_eta_sq") {
  CHECK(sigma_eta_sq(LikelihoodModel::gaussian(0.1)) == doctest::Approx(100.0));
  CHECK(sigma_eta_sq(LikelihoodModel::exponential(10)) == 0.0);
  CHECK(sigma_eta_sq(LikelihoodModel::lognormal(2.0)) == 0.25);
}

TEST_CASE("sigma_eta_sq is minus the curvature of the log density") {
  const double h = 1e-3;
  for (const auto& model : {LikelihoodModel::gaussian(0.3), LikelihoodModel::lognormal(2.0)}) {
    const double z = 1.7;
    const double x = 0.2;
    const double curvature =
        (oracle::log_density(model, z, x + h) - 2.0 * oracle::log_density(model, z, x) +
         oracle::log_density(model, z, x - h)) /
        (h * h);
    CHECK(-curvature == doctest::Approx(sigma_eta_sq(model)).epsilon(1e-6));
  }
}

TEST_CASE("exponential-family coefficients keep a = sigma_eta^2 / 2") {
  for (const auto& model : {LikelihoodModel::gaussian(0.1), LikelihoodModel::lognormal(0.7),
                            LikelihoodModel::exponential(3)}) {
    const auto spec = expfam_spec(model);
    CHECK(spec.a_coeff * 2.0 == spec.sigma_eta_sq);
    CHECK(spec.sigma_eta_sq >= 0.0);
  }
  CHECK_THROWS_AS(ExpFamSpec::from_variance(-1.0), DomainError);
}

TEST_CASE("mgf") {
  const auto expo = LikelihoodModel::exponential(10);
  for (double rho : {-1.0, 0.0, 2.5}) {
    for (double h : {-0.3, 0.0, 0.7}) CHECK(mgf_eta(expo, rho, h) == 1.0);
  }
  for (const auto& model : {LikelihoodModel::gaussian(0.1), LikelihoodModel::lognormal(0.4)}) {
    CHECK(mgf_eta(model, 0.8, 0.0) == 1.0);
    // log M(h) = phi(rho + h) - phi(rho) with phi(rho) = a rho^2
    const double a = expfam_spec(model).a_coeff;
    const double rho = 0.8;
    const double h = 0.013;
    CHECK(log_mgf_eta(model, rho, h) ==
          doctest::Approx(a * (rho + h) * (rho + h) - a * rho * rho).epsilon(1e-12));
  }
  CHECK(mgf_eta(LikelihoodModel::gaussian(1.0), 0.0, 1.0) == doctest::Approx(std::exp(0.5)));
}

TEST_CASE("mgf agrees with sampling") {
  RandomStream stream(2024);
  const auto model = LikelihoodModel::gaussian(1.0);
  const std::size_t samples = 1000000;
  double sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    sum += std::exp(1.0 * eta(model, draw_observation(model, 0.0, stream)));
  }
  CHECK(sum / samples == doctest::Approx(mgf_eta(model, 0.0, 1.0)).epsilon(0.01));

  const auto logn = LikelihoodModel::lognormal(0.5);
  const double rho = 0.3;
  const double h = 0.1;
  sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    sum += std::exp(h * eta(logn, draw_observation(logn, rho, stream)));
  }
  CHECK(sum / samples == doctest::Approx(mgf_eta(logn, rho, h)).epsilon(0.01));
}

TEST_CASE("empirical sigma_eta^2") {
  const auto g = LikelihoodModel::gaussian(0.1);
  const std::vector<double> constant(10, 3.0);
  CHECK(empirical_sigma_eta_sq(constant, g) == 0.0);
  const std::vector<double> expo{1.2, 1.9, 1.25, 7.0};
  CHECK(empirical_sigma_eta_sq(expo, LikelihoodModel::exponential(10)) == 0.0);
  CHECK_THROWS_AS(empirical_sigma_eta_sq(std::vector<double>{1.0}, g), DomainError);

  RandomStream stream(7);
  std::vector<double> sample(100000);
  for (double& z : sample) z = draw_observation(g, 1.0, stream);
  CHECK(empirical_sigma_eta_sq(sample, g) == doctest::Approx(100.0).epsilon(0.05));

  // Hand computation: eta = {100, 200, 300}, variance (divisor 2) = 10000.
  CHECK(empirical_sigma_eta_sq(std::vector<double>{1.0, 2.0, 3.0}, g) ==
        doctest::Approx(10000.0));
}

TEST_CASE("delay variance") {
  CHECK(LikelihoodModel::gaussian(0.1).delay_variance() == doctest::Approx(0.01));
  CHECK(LikelihoodModel::exponential(10).delay_variance() == doctest::Approx(0.01));
  CHECK(LikelihoodModel::lognormal(0.2).delay_variance() == doctest::Approx(0.04));
}
