#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "clocksync/bounds.hpp"
#include "clocksync/error.hpp"

using namespace clocksync;

namespace {

// inf_{x > 0} (e^x - 1) / x^2, from the stationarity condition
// x e^x = 2 (e^x - 1) solved by bisection.
double exp_ratio_infimum() {
  double lo = 1.0;
  double hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double g = mid * std::exp(mid) - 2.0 * std::expm1(mid);
    (g < 0.0 ? lo : hi) = mid;
  }
  const double x = 0.5 * (lo + hi);
  return std::expm1(x) / (x * x);
}

// log M^-2(h) zeta(h) at rho = 0 for the two families used here.
double per_step_log(const LikelihoodModel& m, double h) {
  if (m.constrained()) return m.parameter() * h;
  return sigma_eta_sq(m) * h * h;
}

}  // namespace

TEST_CASE("CRB") {
  CHECK(crb(LikelihoodModel::gaussian(0.1), 25) == doctest::Approx(4e-4).epsilon(1e-14));
  CHECK(crb(LikelihoodModel::gaussian(0.1), 50) == doctest::Approx(2e-4).epsilon(1e-14));
  CHECK(crb(LikelihoodModel::lognormal(1.0), 1) == 1.0);
  try {
    crb(LikelihoodModel::exponential(10), 25);
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("CRB undefined: regularity conditions fail") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(crb(LikelihoodModel::gaussian(0.1), 0), ConfigError);
}

TEST_CASE("zeta") {
  const auto e = LikelihoodModel::exponential(10);
  CHECK(zeta(e, 0.0, 0.0) == 1.0);
  CHECK(zeta(e, 0.3, 0.1) == doctest::Approx(std::exp(1.0)));
  CHECK(zeta(e, 0.0, -0.1) == doctest::Approx(std::exp(-2.0)));
  const auto g = LikelihoodModel::gaussian(0.5);
  CHECK(zeta(g, 0.2, 0.1) == doctest::Approx(mgf_eta(g, 0.2, 0.2)));
}

TEST_CASE("zeta agrees with sampling") {
  RandomStream stream(31);
  const std::size_t samples = 1000000;
  const auto e = LikelihoodModel::exponential(10);
  for (double h : {0.0, 0.05, 0.1}) {
    CHECK(zeta_monte_carlo(e, 0.4, h, samples, stream) ==
          doctest::Approx(zeta(e, 0.4, h)).epsilon(0.01));
  }
  const auto g = LikelihoodModel::gaussian(1.0);
  CHECK(zeta_monte_carlo(g, 0.0, 0.2, samples, stream) ==
        doctest::Approx(zeta(g, 0.0, 0.2)).epsilon(0.01));
  const auto l = LikelihoodModel::lognormal(1.0);
  CHECK(zeta_monte_carlo(l, 0.3, 0.1, samples, stream) ==
        doctest::Approx(zeta(l, 0.3, 0.1)).epsilon(0.01));
}

TEST_CASE("CHRB for exponential delays") {
  const double inf_ratio = exp_ratio_infimum();
  CHECK(inf_ratio == doctest::Approx(1.5441).epsilon(1e-4));
  CHECK(1.0 / inf_ratio == doctest::Approx(0.6476).epsilon(1e-3));
  for (auto [lambda, n] : {std::pair{10.0, 25}, std::pair{10.0, 5}, std::pair{2.5, 40}}) {
    const auto r = chrb(LikelihoodModel::exponential(lambda), n);
    const double expected = 1.0 / (inf_ratio * lambda * lambda * n * n);
    CHECK(r.per_param_bound == doctest::Approx(expected).epsilon(1e-7));
    CHECK(r.per_param_bound == doctest::Approx(0.6476 / (lambda * lambda * n * n)).epsilon(1e-3));
    REQUIRE(r.diagnostics);
    CHECK(r.diagnostics->argmin[0] > 0.0);
    CHECK_FALSE(r.diagnostics->at_boundary);
  }
  CHECK(chrb(LikelihoodModel::exponential(10), 25).per_param_bound ==
        doctest::Approx(1.036e-5).epsilon(1e-3));
}

TEST_CASE("CHRB approaches the CRB for Gaussian delays") {
  for (std::size_t n : {1u, 10u, 25u}) {
    const auto g = LikelihoodModel::gaussian(0.1);
    const double c = crb(g, n);
    const double ch = chrb(g, n).per_param_bound;
    CHECK(ch <= c * (1.0 + 1e-12));
    CHECK(ch == doctest::Approx(c).epsilon(0.01));
  }
  const auto l = LikelihoodModel::lognormal(0.2);
  CHECK(chrb(l, 7).per_param_bound == doctest::Approx(crb(l, 7)).epsilon(0.01));
}

TEST_CASE("CHRB objective") {
  const auto e = LikelihoodModel::exponential(10);
  CHECK(chrb_objective(e, 25, 0.01) == doctest::Approx(std::expm1(2.5) / 1e-4));
  const auto g = LikelihoodModel::gaussian(0.1);
  CHECK(chrb_objective(g, 4, 0.02) == doctest::Approx(std::expm1(4 * 100 * 4e-4) / 4e-4));
  CHECK(chrb_objective(g, 4, -0.02) == doctest::Approx(chrb_objective(g, 4, 0.02)));
}

TEST_CASE("BCRB") {
  const auto g = LikelihoodModel::gaussian(0.1);
  for (std::size_t k : {1u, 10u, 25u}) {
    const auto trace = bcrb(g, 1e-9, k);
    CHECK(trace.bound.back() == doctest::Approx(crb(g, k)).epsilon(1e-6));
  }
  const std::vector<double> per_step(30, 100.0);
  const auto trace = bcrb(per_step, 1e-4);
  CHECK(trace.information[0] == 100.0);
  for (std::size_t k = 1; k < trace.information.size(); ++k) {
    CHECK(trace.information[k] >= trace.information[k - 1]);
  }
  // J(2) = (sigma^2 + 1/J(1))^-1 + 100
  CHECK(trace.information[1] == doctest::Approx(1.0 / (1e-8 + 0.01) + 100.0));

  const auto e = bcrb(LikelihoodModel::exponential(10), 1e-4, 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(e.information[k] == 0.0);
    CHECK(std::isinf(e.bound[k]));
  }
  CHECK_THROWS_AS(bcrb(per_step, -1.0), ConfigError);
}

TEST_CASE("BCHRB objective pieces") {
  const auto e = LikelihoodModel::exponential(10);
  const std::vector<double> h{0.01, 0.03, 0.02};
  const double sigma = 0.1;
  const double expected =
      10.0 * (0.01 + 0.03 + 0.02) + (0.01 * 0.01 + 0.02 * 0.02 + 0.01 * 0.01) / (sigma * sigma);
  CHECK(bchrb_log_t(e, sigma, h) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(bchrb_objective(e, sigma, h) == doctest::Approx(std::expm1(expected) / 4e-4));

  const auto g = LikelihoodModel::gaussian(0.1);
  // per step: M^-2(h) M(2h) = exp(sigma_eta^2 h^2)
  const double expected_g = 100.0 * (1e-4 + 9e-4 + 4e-4) + 6e-4 / (sigma * sigma);
  CHECK(bchrb_log_t(g, sigma, h) == doctest::Approx(expected_g).epsilon(1e-14));
}

TEST_CASE("BCHRB with one step is a scalar search") {
  const double sigma = 0.05;
  for (const auto& m : {LikelihoodModel::gaussian(0.1), LikelihoodModel::exponential(10)}) {
    double best = INFINITY;
    for (int i = 0; i <= 200000; ++i) {
      const double h = 1e-6 * std::pow(1e7, i / 200000.0);
      const double t = per_step_log(m, h);
      best = std::min(best, std::expm1(t + h * h / (sigma * sigma)) / (h * h));
    }
    const auto r = bchrb(m, sigma, 1);
    CHECK(r.per_param_bound == doctest::Approx(1.0 / best).epsilon(1e-5));
  }
}

TEST_CASE("BCHRB search improves on the constant slice") {
  for (const auto& m : {LikelihoodModel::gaussian(0.1), LikelihoodModel::exponential(10)}) {
    for (double sigma : {1e-3, 1e-2, 1e-1}) {
      for (std::size_t k : {2u, 5u, 12u}) {
        const auto slice = bchrb_constant_slice(m, sigma, k);
        const auto r = bchrb(m, sigma, k);
        REQUIRE(r.diagnostics);
        CHECK(r.diagnostics->start_objective == slice.objective);
        CHECK(r.diagnostics->objective <= slice.objective);
        CHECK(r.per_param_bound == doctest::Approx(1.0 / r.diagnostics->objective));
        CHECK(bchrb_objective(m, sigma, r.diagnostics->argmin) ==
              doctest::Approx(r.diagnostics->objective).epsilon(1e-9));
        if (m.constrained()) {
          for (double h : r.diagnostics->argmin) CHECK(h >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("BCHRB with weak coupling approaches the one-sample CHRB") {
  const auto e = LikelihoodModel::exponential(10);
  const double single = chrb(e, 1).per_param_bound;
  for (std::size_t k : {1u, 3u, 5u}) {
    CHECK(bchrb(e, 1e3, k).per_param_bound == doctest::Approx(single).epsilon(0.01));
  }
}

TEST_CASE("theta MSE combination") {
  CHECK(mse_bound_theta(4e-4, 4e-4) == doctest::Approx(2e-4).epsilon(1e-14));
  CHECK(mse_bound_theta(1e-3, 3e-3, {0.25, 0.25}) == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(mse_bound_theta(0.0, 0.0, {0.3, 0.1}) == doctest::Approx(0.01).epsilon(1e-14));
  const auto e = LikelihoodModel::exponential(10);
  const double per = chrb(e, 25).per_param_bound;
  CHECK(mse_bound_theta(per, per) == doctest::Approx(0.162 / 625.0 * (2.0 / 100.0)).epsilon(1e-3));
}

TEST_CASE("ML MSE oracle") {
  const auto g = LikelihoodModel::gaussian(0.1);
  CHECK(ml_mse_oracle(g, g, 25) == doctest::Approx(2e-4).epsilon(1e-14));
  CHECK(ml_mse_oracle(g, g, 25) == doctest::Approx(mse_bound_theta(crb(g, 25), crb(g, 25))).epsilon(1e-15));
  const auto e = LikelihoodModel::exponential(10);
  CHECK(ml_mse_oracle(e, e, 25) == doctest::Approx(8e-6).epsilon(1e-14));
  const auto e2 = LikelihoodModel::exponential(5);
  // 0.25/N^2 (1/100 + 1/25) + 0.25/N^2 (1/10 - 1/5)^2
  CHECK(ml_mse_oracle(e, e2, 10) == doctest::Approx(0.0025 * (0.05 + 0.01)).epsilon(1e-14));
  const auto l = LikelihoodModel::lognormal(0.2);
  CHECK(ml_mse_oracle(l, l, 4) == doctest::Approx(0.08 / 16.0).epsilon(1e-14));
  CHECK_THROWS_AS(ml_mse_oracle(g, e, 25), ConfigError);
  CHECK(ml_bias(e, 25) == doctest::Approx(1.0 / 250.0));
  CHECK(ml_bias(g, 25) == 0.0);
}
