#include "clocksync/bounds.hpp"

#include <cmath>
#include <limits>

#include "clocksync/error.hpp"
#include "clocksync/model.hpp"
#include "clocksync/optimize.hpp"

namespace clocksync {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_n(std::size_t n) {
  if (n == 0) throw ConfigError("number of observations must be at least 1");
}

// Per-observation exponent log zeta(h) - 2 log M(h), evaluated at rho = 0
// (the in-scope families give rho-free bounds).
double per_observation_log_ratio(const LikelihoodModel& model, double h) {
  return log_zeta(model, 0.0, h) - 2.0 * log_mgf_eta(model, 0.0, h);
}

}  // namespace

std::string_view bound_name(BoundKind kind) {
  switch (kind) {
    case BoundKind::kCrb:
      return "crb";
    case BoundKind::kChrb:
      return "chrb";
    case BoundKind::kBcrb:
      return "bcrb";
    case BoundKind::kBchrb:
      return "bchrb";
  }
  return "unknown";
}

double crb(const LikelihoodModel& model, std::size_t n) {
  if (model.constrained()) {
    throw ConfigError("CRB undefined: regularity conditions fail for constrained likelihood " +
                      model.describe());
  }
  require_n(n);
  return 1.0 / (static_cast<double>(n) * sigma_eta_sq(model));
}

double log_zeta(const LikelihoodModel& model, double rho, double h) {
  if (model.constrained()) {
    const double lambda = model.parameter();
    // E[exp(2 h lambda) I(Z >= rho + h)], Z - rho ~ Exp(lambda)
    return h >= 0.0 ? lambda * h : 2.0 * lambda * h;
  }
  return log_mgf_eta(model, rho, 2.0 * h);
}

double zeta(const LikelihoodModel& model, double rho, double h) {
  return std::exp(log_zeta(model, rho, h));
}

double zeta_monte_carlo(const LikelihoodModel& model, double rho, double h,
                        std::size_t samples, RandomStream& stream) {
  if (samples == 0) throw ConfigError("zeta_monte_carlo needs at least one sample");
  double sum = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double z = draw_observation(model, rho, stream);
    if (model.constrained() && z - rho - h < 0.0) continue;
    sum += std::exp(2.0 * h * eta(model, z));
  }
  return sum / static_cast<double>(samples);
}

double chrb_objective(const LikelihoodModel& model, std::size_t n, double h) {
  const double exponent = static_cast<double>(n) * per_observation_log_ratio(model, h);
  return std::expm1(exponent) / (h * h);
}

BoundReport chrb(const LikelihoodModel& model, std::size_t n,
                 const ScalarSearchConfig& search) {
  require_n(n);
  const auto positive = optimize::log_grid_minimize(
      [&](double h) { return chrb_objective(model, n, h); }, search.h_min, search.h_max,
      search.grid_points, search.rel_tol);
  optimize::ScalarMinimum best = positive;
  double sign = 1.0;
  if (!model.constrained()) {
    const auto negative = optimize::log_grid_minimize(
        [&](double h) { return chrb_objective(model, n, -h); }, search.h_min, search.h_max,
        search.grid_points, search.rel_tol);
    if (negative.value < positive.value) {
      best = negative;
      sign = -1.0;
    }
  }
  if (!(best.value > 0.0)) {
    throw SearchError("CHRB infimum is not positive; search interval too wide?");
  }

  BoundReport report;
  report.kind = BoundKind::kChrb;
  report.per_param_bound = 1.0 / best.value;
  report.theta_mse_bound = mse_bound_theta(report.per_param_bound, report.per_param_bound);
  SearchDiagnostics diag;
  diag.argmin = {sign * best.x};
  diag.evaluations = best.evaluations;
  diag.iterations = best.evaluations;
  diag.start_objective = positive.value;
  diag.objective = best.value;
  diag.at_boundary = best.at_boundary;
  report.diagnostics = diag;
  return report;
}

BcrbTrace bcrb(std::span<const double> sigma_eta_sq_per_step, double sigma_gm) {
  if (!(sigma_gm >= 0.0) || !std::isfinite(sigma_gm)) {
    throw ConfigError("Gauss-Markov sigma must be non-negative");
  }
  const double var = sigma_gm * sigma_gm;
  BcrbTrace out;
  out.information.reserve(sigma_eta_sq_per_step.size());
  out.bound.reserve(sigma_eta_sq_per_step.size());
  double info = 0.0;  // J(0)
  for (double step_info : sigma_eta_sq_per_step) {
    if (!(step_info >= 0.0)) throw DomainError("sigma_eta^2 must be non-negative");
    const double carried = info > 0.0 ? 1.0 / (var + 1.0 / info) : 0.0;
    info = carried + step_info;
    out.information.push_back(info);
    out.bound.push_back(info > 0.0 ? 1.0 / info : kInf);
  }
  return out;
}

BcrbTrace bcrb(const LikelihoodModel& model, double sigma_gm, std::size_t k) {
  require_n(k);
  const std::vector<double> per_step(k, sigma_eta_sq(model));
  return bcrb(per_step, sigma_gm);
}

double bchrb_log_t(const LikelihoodModel& model, double sigma_gm,
                   std::span<const double> h) {
  const double precision = 1.0 / (sigma_gm * sigma_gm);
  double log_s = 0.0;
  double smooth = 0.0;
  double previous = 0.0;  // h_0
  for (double hj : h) {
    log_s += per_observation_log_ratio(model, hj);
    smooth += (hj - previous) * (hj - previous);
    previous = hj;
  }
  return log_s + precision * smooth;
}

double bchrb_objective(const LikelihoodModel& model, double sigma_gm,
                       std::span<const double> h) {
  if (h.empty()) throw DomainError("empty h-vector");
  const double last = h.back();
  return std::expm1(bchrb_log_t(model, sigma_gm, h)) / (last * last);
}

SliceMinimum bchrb_constant_slice(const LikelihoodModel& model, double sigma_gm,
                                  std::size_t k, const ScalarSearchConfig& search) {
  require_n(k);
  std::vector<double> h(k);
  const auto best = optimize::log_grid_minimize(
      [&](double c) {
        std::fill(h.begin(), h.end(), c);
        return bchrb_objective(model, sigma_gm, h);
      },
      search.h_min, search.h_max, search.grid_points, search.rel_tol);
  return {best.x, best.value};
}

BoundReport bchrb(const LikelihoodModel& model, double sigma_gm, std::size_t k,
                  const VectorSearchConfig& search) {
  require_n(k);
  if (!(sigma_gm > 0.0) || !std::isfinite(sigma_gm)) {
    throw ConfigError("BCHRB needs a positive Gauss-Markov sigma");
  }
  const auto slice = bchrb_constant_slice(model, sigma_gm, k, search.slice);

  // h = c * r with r_k = 1; the search runs over (log c, r_1..r_{k-1}).
  const double log_c_min = std::log(search.slice.h_min);
  const double log_c_max = std::log(search.slice.h_max);
  std::vector<double> h(k);
  const auto unpack = [&](std::span<const double> y) {
    const double c = std::exp(y[0]);
    for (std::size_t j = 0; j + 1 < k; ++j) {
      h[j] = c * (model.constrained() ? std::abs(y[j + 1]) : y[j + 1]);
    }
    h[k - 1] = c;
  };
  const auto log_objective = [&](std::span<const double> y) {
    if (y[0] < log_c_min || y[0] > log_c_max) return kInf;
    unpack(y);
    const double value = bchrb_objective(model, sigma_gm, h);
    return value > 0.0 ? std::log(value) : kInf;
  };

  std::vector<double> start(k, 1.0);
  start[0] = std::log(slice.c);
  SearchDiagnostics diag;
  diag.start_objective = slice.objective;
  double best = slice.objective;
  std::vector<double> best_y = start;

  if (k > 1) {
    optimize::NelderMeadOptions options;
    options.max_evaluations = search.max_evaluations;
    options.rel_tol = search.rel_tol;
    const auto result = optimize::nelder_mead(log_objective, start, options);
    diag.evaluations = result.evaluations;
    diag.iterations = result.iterations;
    diag.converged = result.converged;
    const double found = std::exp(result.value);
    if (found < best) {
      best = found;
      best_y = result.x;
    }
  }
  unpack(best_y);
  diag.argmin = h;
  diag.objective = best;
  diag.at_boundary = best_y[0] <= log_c_min + 1e-9 || best_y[0] >= log_c_max - 1e-9;
  if (!(best > 0.0) || !std::isfinite(best)) {
    throw SearchError("BCHRB search produced a non-positive or non-finite infimum");
  }

  BoundReport report;
  report.kind = BoundKind::kBchrb;
  report.per_param_bound = 1.0 / best;
  report.theta_mse_bound = mse_bound_theta(report.per_param_bound, report.per_param_bound);
  report.diagnostics = std::move(diag);
  return report;
}

double mse_bound_theta(double bound_xi, double bound_psi, const BiasPair& biases) {
  const double bias_gap = biases.b_xi - biases.b_psi;
  return 0.25 * (bound_xi + bound_psi) + 0.25 * bias_gap * bias_gap;
}

double ml_mse_oracle(const LikelihoodModel& model_u, const LikelihoodModel& model_v,
                     std::size_t n) {
  require_n(n);
  if (model_u.family() != model_v.family()) {
    throw ConfigError("ml_mse_oracle needs both directions from the same family");
  }
  const double nd = static_cast<double>(n);
  if (model_u.constrained()) {
    const double inv_u = 1.0 / model_u.parameter();
    const double inv_v = 1.0 / model_v.parameter();
    const double scale = 0.25 / (nd * nd);
    return scale * (inv_u * inv_u + inv_v * inv_v) + scale * (inv_u - inv_v) * (inv_u - inv_v);
  }
  return (model_u.delay_variance() + model_v.delay_variance()) / (4.0 * nd);
}

double ml_bias(const LikelihoodModel& model, std::size_t n) {
  require_n(n);
  if (!model.constrained()) return 0.0;
  return 1.0 / (model.parameter() * static_cast<double>(n));
}

}  // namespace clocksync
