#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "clocksync/likelihood.hpp"
#include "clocksync/model.hpp"

namespace clocksync {

enum class Preset {
  kMlMismatchLognormal,
  kFgeLognormal,
  kMlVsBounds,
  kFgeVsBounds,
  kFgeVsSigma,
  kCustom,
};

std::string_view preset_name(Preset preset);
Preset parse_preset(std::string_view name);

enum class Estimator { kMl, kFge };
std::string_view estimator_name(Estimator estimator);

/// One simulated truth and the estimators applied to it.
struct Scenario {
  LikelihoodModel true_u;
  LikelihoodModel true_v;
  // (estimator, assumed model for U, assumed model for V)
  struct Applied {
    Estimator estimator;
    LikelihoodModel assumed_u;
    LikelihoodModel assumed_v;
  };
  std::vector<Applied> estimators;
};

struct ExperimentConfig {
  Preset preset = Preset::kCustom;
  Family distribution = Family::kGaussian;
  double sigma_xi = 0.1;
  double sigma_psi = 0.1;
  double lambda_xi = 10.0;
  double lambda_psi = 10.0;
  double d = 1.0;
  double theta0 = 0.2;
  std::vector<std::size_t> n_list{5, 10, 15, 20, 25};
  std::vector<double> sigma_gm_list{0.0};
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  std::optional<Family> assumed_distribution;
  std::optional<std::filesystem::path> output_path;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool with_bounds = true;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Preset defaults (parameters, N grid, sigma grid) with the given trial
/// count and seed.
ExperimentConfig preset_config(Preset preset);

/// Truth/estimator combinations a config expands to.
std::vector<Scenario> expand_scenarios(const ExperimentConfig& config);

struct MseRecord {
  std::string preset;
  std::string estimator;
  std::string true_model;
  std::string assumed_model;
  std::size_t n = 0;
  double sigma_gm = 0.0;
  std::size_t trials = 0;
  double mse = 0.0;
  double stderr_mse = 0.0;
  std::optional<double> bound_crb;
  std::optional<double> bound_chrb;
  std::optional<double> bound_bcrb;
  std::optional<double> bound_bchrb;
};

std::vector<MseRecord> run_trials(const ExperimentConfig& config);

inline constexpr std::string_view kCsvHeader =
    "preset,estimator,true_model,assumed_model,n,sigma_gm,trials,mse,stderr,crb,chrb,"
    "bcrb,bchrb";

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

void write_csv(const std::vector<MseRecord>& records, std::ostream& out);
void emit_csv(const std::vector<MseRecord>& records, const std::filesystem::path& path);

/// Series CSV with header row; reads columns named u and v.
ObservationSeries read_series_csv(std::istream& in);
void write_series_csv(const SimulatedExchange& data, std::ostream& out);

/// Flat key=value file; blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> read_key_value_config(std::istream& in);

}  // namespace clocksync
