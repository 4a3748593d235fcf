#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "clocksync/likelihood.hpp"
#include "clocksync/random.hpp"

namespace clocksync {

/// Timestamps of one two-way exchange: S sends at t1, R receives at t2 and
/// replies at t3, S receives at t4. t1/t4 are on S's clock, t2/t3 on R's.
struct TimestampQuad {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
};

/// U_j = t2 - t1 (forward) and V_j = t4 - t3 (reverse), equal length.
struct ObservationSeries {
  std::vector<double> u;
  std::vector<double> v;

  std::size_t size() const { return u.size(); }
};

struct ExchangeParams {
  double d = 1.0;       // fixed symmetric propagation delay
  double theta0 = 0.0;  // static (or initial) clock offset
};

struct GaussMarkovParams {
  double sigma = 0.0;  // std of the random-walk increments of xi and psi
};

/// Latent states behind a simulated series. For the Gauss-Markov model the
/// entries are xi_1..xi_N (the pre-observation state xi_0 is not stored).
struct GroundTruthTrace {
  std::vector<double> xi;
  std::vector<double> psi;
  std::vector<double> theta;      // (xi - psi) / 2
  std::vector<double> d_implied;  // (xi + psi) / 2
};

struct SimulatedExchange {
  ObservationSeries series;
  GroundTruthTrace truth;
};

ObservationSeries derive_uv(std::span<const TimestampQuad> quads);

/// Builds evenly spaced exchanges that reproduce the given series exactly
/// under derive_uv (up to rounding of the additions).
std::vector<TimestampQuad> synthesize_timestamps(const ObservationSeries& series,
                                                 double spacing = 1.0);

/// Draws one observation centered at `location` from the model's delay law:
/// Gaussian -> location + sigma Z, exponential -> location + Exp(lambda),
/// log-normal -> exp(location + sigma Z).
double draw_observation(const LikelihoodModel& model, double location,
                        RandomStream& stream);

SimulatedExchange simulate_static(const ExchangeParams& params,
                                  const LikelihoodModel& model_u,
                                  const LikelihoodModel& model_v, std::size_t n,
                                  TrialStreams& streams);

SimulatedExchange simulate_gauss_markov(const ExchangeParams& params,
                                        const GaussMarkovParams& gm,
                                        const LikelihoodModel& model_u,
                                        const LikelihoodModel& model_v,
                                        std::size_t n, TrialStreams& streams);

struct OffsetDelay {
  double theta = 0.0;
  double d = 0.0;
};

/// theta = (xi - psi) / 2, d = (xi + psi) / 2.
OffsetDelay offset_from_xi_psi(double xi, double psi);

inline double theta_from_xi_psi(double xi, double psi) {
  return (xi - psi) / 2.0;
}

}  // namespace clocksync
