#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace clocksync::optimize {

struct ScalarMinimum {
  double x = 0.0;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool at_boundary = false;  // minimum on the edge of the scanned interval
};

/// Golden-section search of a unimodal function on [lo, hi].
ScalarMinimum golden_section(const std::function<double(double)>& f, double lo,
                             double hi, double rel_tol, std::size_t max_iter = 500);

/// Scans `points` log-spaced abscissae in [lo, hi] (lo > 0), then refines the
/// best bracket by golden-section search in log-space.
/// Throws SearchError if no grid point has a finite objective.
ScalarMinimum log_grid_minimize(const std::function<double(double)>& f, double lo,
                                double hi, std::size_t points, double rel_tol);

struct NelderMeadOptions {
  std::size_t max_evaluations = 10000;
  double rel_tol = 1e-8;
  double initial_step = 0.25;
  std::size_t restarts = 3;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> start,
                             const NelderMeadOptions& options = {});

}  // namespace clocksync::optimize
