#include "clocksync/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "clocksync/error.hpp"

namespace clocksync::optimize {

namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // 1 / golden ratio

double finite_or_inf(double v) {
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

ScalarMinimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double rel_tol, std::size_t max_iter) {
  if (!(lo < hi)) throw SearchError("golden_section: empty interval");
  double a = lo;
  double b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = finite_or_inf(f(x1));
  double f2 = finite_or_inf(f(x2));
  std::size_t evals = 2;
  for (std::size_t it = 0; it < max_iter; ++it) {
    if (b - a <= rel_tol * (1.0 + std::abs(a) + std::abs(b))) break;
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = finite_or_inf(f(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = finite_or_inf(f(x2));
    }
    ++evals;
  }
  ScalarMinimum out;
  if (f1 <= f2) {
    out.x = x1;
    out.value = f1;
  } else {
    out.x = x2;
    out.value = f2;
  }
  out.evaluations = evals;
  return out;
}

ScalarMinimum log_grid_minimize(const std::function<double(double)>& f, double lo,
                                double hi, std::size_t points, double rel_tol) {
  if (!(lo > 0.0) || !(hi > lo)) throw SearchError("log_grid_minimize: need 0 < lo < hi");
  points = std::max<std::size_t>(points, 3);
  const double t_lo = std::log(lo);
  const double t_hi = std::log(hi);
  const double dt = (t_hi - t_lo) / static_cast<double>(points - 1);

  std::size_t best = points;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points; ++i) {
    const double t = (i + 1 == points) ? t_hi : t_lo + dt * static_cast<double>(i);
    const double v = f(std::exp(t));
    if (std::isfinite(v) && v < best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best == points) {
    std::ostringstream msg;
    msg << "no finite objective value on the log grid [" << lo << ", " << hi << "] ("
        << points << " points)";
    throw SearchError(msg.str());
  }

  const double left = t_lo + dt * static_cast<double>(best == 0 ? 0 : best - 1);
  const double right = std::min(t_hi, t_lo + dt * static_cast<double>(best + 1));
  auto refined = golden_section([&](double t) { return f(std::exp(t)); }, left, right, rel_tol);

  ScalarMinimum out;
  if (refined.value <= best_value) {
    out.x = std::exp(refined.x);
    out.value = refined.value;
  } else {
    out.x = std::exp(t_lo + dt * static_cast<double>(best));
    out.value = best_value;
  }
  out.evaluations = points + refined.evaluations;
  out.at_boundary = best == 0 || best + 1 == points;
  return out;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  if (dim == 0) throw SearchError("nelder_mead: zero-dimensional problem");

  // Dimension-adaptive coefficients keep the simplex from collapsing in
  // higher dimensions.
  const double n = static_cast<double>(dim);
  const double reflect = 1.0;
  const double expand = 1.0 + 2.0 / n;
  const double contract = 0.75 - 1.0 / (2.0 * n);
  const double shrink = 1.0 - 1.0 / n;

  NelderMeadResult result;
  result.x = std::move(start);
  result.value = finite_or_inf(f(result.x));
  result.evaluations = 1;

  const auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    return finite_or_inf(f(x));
  };

  for (std::size_t round = 0; round <= options.restarts; ++round) {
    std::vector<std::vector<double>> simplex(dim + 1, result.x);
    std::vector<double> values(dim + 1, result.value);
    for (std::size_t i = 0; i < dim; ++i) {
      simplex[i + 1][i] += options.initial_step;
      values[i + 1] = eval(simplex[i + 1]);
    }
    const double round_start = result.value;
    bool converged = false;
    std::vector<std::size_t> order(dim + 1);
    std::vector<double> centroid(dim);
    std::vector<double> trial(dim);
    std::vector<double> trial2(dim);

    while (result.evaluations < options.max_evaluations) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(),
                [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second = order[dim - 1];
      ++result.iterations;

      const double spread = values[worst] - values[best];
      if (std::isfinite(spread) &&
          spread <= options.rel_tol * (std::abs(values[best]) + 1e-300)) {
        converged = true;
        break;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= dim; ++i) {
        if (i == worst) continue;
        for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i][j];
      }
      for (double& c : centroid) c /= n;

      for (std::size_t j = 0; j < dim; ++j) {
        trial[j] = centroid[j] + reflect * (centroid[j] - simplex[worst][j]);
      }
      const double f_reflect = eval(trial);
      if (f_reflect < values[best]) {
        for (std::size_t j = 0; j < dim; ++j) {
          trial2[j] = centroid[j] + expand * (trial[j] - centroid[j]);
        }
        const double f_expand = eval(trial2);
        if (f_expand < f_reflect) {
          simplex[worst] = trial2;
          values[worst] = f_expand;
        } else {
          simplex[worst] = trial;
          values[worst] = f_reflect;
        }
        continue;
      }
      if (f_reflect < values[second]) {
        simplex[worst] = trial;
        values[worst] = f_reflect;
        continue;
      }
      const bool outside = f_reflect < values[worst];
      for (std::size_t j = 0; j < dim; ++j) {
        const double from = outside ? trial[j] : simplex[worst][j];
        trial2[j] = centroid[j] + contract * (from - centroid[j]);
      }
      const double f_contract = eval(trial2);
      if (f_contract < (outside ? f_reflect : values[worst])) {
        simplex[worst] = trial2;
        values[worst] = f_contract;
        continue;
      }
      for (std::size_t i = 0; i <= dim; ++i) {
        if (i == best) continue;
        for (std::size_t j = 0; j < dim; ++j) {
          simplex[i][j] = simplex[best][j] + shrink * (simplex[i][j] - simplex[best][j]);
        }
        values[i] = eval(simplex[i]);
      }
    }

    const auto best_it = std::min_element(values.begin(), values.end());
    if (*best_it < result.value) {
      result.value = *best_it;
      result.x = simplex[static_cast<std::size_t>(best_it - values.begin())];
    }
    result.converged = converged;
    const bool improved =
        result.value < round_start - options.rel_tol * std::abs(round_start);
    if (!improved || result.evaluations >= options.max_evaluations) break;
  }
  return result;
}

}  // namespace clocksync::optimize
