#include "clocksync/model.hpp"

#include <cmath>

#include "clocksync/error.hpp"

namespace clocksync {

ObservationSeries derive_uv(std::span<const TimestampQuad> quads) {
  if (quads.empty()) throw DomainError("no exchanges");
  ObservationSeries out;
  out.u.reserve(quads.size());
  out.v.reserve(quads.size());
  for (const auto& q : quads) {
    const double u = q.t2 - q.t1;
    const double v = q.t4 - q.t3;
    if (!std::isfinite(u) || !std::isfinite(v)) {
      throw DomainError("non-finite timestamp in exchange");
    }
    out.u.push_back(u);
    out.v.push_back(v);
  }
  return out;
}

std::vector<TimestampQuad> synthesize_timestamps(const ObservationSeries& series,
                                                 double spacing) {
  std::vector<TimestampQuad> quads;
  quads.reserve(series.size());
  for (std::size_t j = 0; j < series.size(); ++j) {
    TimestampQuad q;
    q.t1 = spacing * static_cast<double>(j);
    q.t2 = q.t1 + series.u[j];
    // R replies a fixed turnaround after reception; t4 is back on S's clock.
    q.t3 = q.t2 + 0.25 * spacing;
    q.t4 = q.t3 + series.v[j];
    quads.push_back(q);
  }
  return quads;
}

double draw_observation(const LikelihoodModel& model, double location,
                        RandomStream& stream) {
  switch (model.family()) {
    case Family::kGaussian:
      return location + model.parameter() * stream.standard_normal();
    case Family::kLogNormal:
      return std::exp(location + model.parameter() * stream.standard_normal());
    case Family::kExponential:
      return location + stream.exponential(model.parameter());
  }
  return location;
}

namespace {

void fill_trace(GroundTruthTrace& truth) {
  const std::size_t n = truth.xi.size();
  truth.theta.resize(n);
  truth.d_implied.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    truth.theta[k] = (truth.xi[k] - truth.psi[k]) / 2.0;
    truth.d_implied[k] = (truth.xi[k] + truth.psi[k]) / 2.0;
  }
}

void check_common(const ExchangeParams& params, std::size_t n) {
  if (n == 0) throw ConfigError("number of exchanges must be at least 1");
  if (!(params.d >= 0.0) || !std::isfinite(params.d)) {
    throw ConfigError("propagation delay d must be non-negative");
  }
  if (!std::isfinite(params.theta0)) throw ConfigError("theta0 must be finite");
}

}  // namespace

SimulatedExchange simulate_static(const ExchangeParams& params,
                                  const LikelihoodModel& model_u,
                                  const LikelihoodModel& model_v, std::size_t n,
                                  TrialStreams& streams) {
  return simulate_gauss_markov(params, GaussMarkovParams{0.0}, model_u, model_v, n,
                               streams);
}

SimulatedExchange simulate_gauss_markov(const ExchangeParams& params,
                                        const GaussMarkovParams& gm,
                                        const LikelihoodModel& model_u,
                                        const LikelihoodModel& model_v,
                                        std::size_t n, TrialStreams& streams) {
  check_common(params, n);
  if (!(gm.sigma >= 0.0) || !std::isfinite(gm.sigma)) {
    throw ConfigError("Gauss-Markov sigma must be non-negative");
  }
  SimulatedExchange out;
  auto& truth = out.truth;
  truth.xi.resize(n);
  truth.psi.resize(n);
  out.series.u.resize(n);
  out.series.v.resize(n);

  double xi = params.d + params.theta0;
  double psi = params.d - params.theta0;
  for (std::size_t k = 0; k < n; ++k) {
    if (gm.sigma > 0.0) {
      xi += gm.sigma * streams.xi_process.standard_normal();
      psi += gm.sigma * streams.psi_process.standard_normal();
    }
    truth.xi[k] = xi;
    truth.psi[k] = psi;
    out.series.u[k] = draw_observation(model_u, xi, streams.u_noise);
    out.series.v[k] = draw_observation(model_v, psi, streams.v_noise);
  }
  fill_trace(truth);
  return out;
}

OffsetDelay offset_from_xi_psi(double xi, double psi) {
  return {(xi - psi) / 2.0, (xi + psi) / 2.0};
}

}  // namespace clocksync
