#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "clocksync/error.hpp"
#include "clocksync/optimize.hpp"

using namespace clocksync::optimize;

TEST_CASE("golden section") {
  const auto r = golden_section([](double x) { return (x - 2.0) * (x - 2.0) + 1.0; }, 0.0,
                                5.0, 1e-10);
  CHECK(r.x == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(r.value == doctest::Approx(1.0));
  CHECK(r.evaluations > 0);

  const auto nan_edge = golden_section(
      [](double x) { return x < 0.5 ? std::nan("") : (x - 1.0) * (x - 1.0); }, 0.0, 3.0, 1e-10);
  CHECK(nan_edge.x == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("log grid minimization") {
  // inf (e^x - 1) / x^2 at x* solving x e^x = 2 (e^x - 1)
  const auto r = log_grid_minimize([](double x) { return std::expm1(x) / (x * x); }, 1e-6,
                                   10.0, 400, 1e-10);
  CHECK(r.x == doctest::Approx(1.5936242600).epsilon(1e-7));
  CHECK(r.value == doctest::Approx(1.5441).epsilon(1e-4));
  CHECK_FALSE(r.at_boundary);

  const auto edge = log_grid_minimize([](double x) { return x; }, 1e-3, 1.0, 50, 1e-10);
  CHECK(edge.at_boundary);
  CHECK(edge.x == doctest::Approx(1e-3));

  CHECK_THROWS_AS(log_grid_minimize([](double) { return std::nan(""); }, 1e-3, 1.0, 50, 1e-8),
                  clocksync::SearchError);
}

TEST_CASE("Nelder-Mead") {
  const auto rosen = [](std::span<const double> x) {
    return 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1.0 - x[0]) * (1.0 - x[0]);
  };
  NelderMeadOptions opt;
  opt.rel_tol = 1e-12;
  const auto r = nelder_mead(rosen, {-1.2, 1.0}, opt);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(r.evaluations <= opt.max_evaluations);

  const auto bowl = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = x[i] - static_cast<double>(i);
      s += (1.0 + static_cast<double>(i)) * d * d;
    }
    return s;
  };
  const auto b = nelder_mead(bowl, std::vector<double>(6, 3.0), opt);
  for (std::size_t i = 0; i < 6; ++i) CHECK(b.x[i] == doctest::Approx(double(i)).epsilon(1e-3));
  CHECK(b.value < 1e-8);

  NelderMeadOptions tight;
  tight.max_evaluations = 30;
  const auto capped = nelder_mead(bowl, std::vector<double>(6, 3.0), tight);
  CHECK(capped.evaluations <= 40);
  CHECK_FALSE(capped.converged);

  const auto walled = nelder_mead(
      [](std::span<const double> x) {
        return x[0] < 0.0 ? std::numeric_limits<double>::infinity() : (x[0] - 0.5) * (x[0] - 0.5);
      },
      {2.0}, opt);
  CHECK(walled.x[0] == doctest::Approx(0.5).epsilon(1e-5));
}
