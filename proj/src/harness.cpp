#include "clocksync/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

#include "clocksync/bounds.hpp"
#include "clocksync/error.hpp"
#include "clocksync/fge.hpp"
#include "clocksync/ml.hpp"

namespace clocksync {

std::string_view preset_name(Preset preset) {
  switch (preset) {
    case Preset::kMlMismatchLognormal:
      return "ml-mismatch-lognormal";
    case Preset::kFgeLognormal:
      return "fge-lognormal";
    case Preset::kMlVsBounds:
      return "ml-vs-bounds";
    case Preset::kFgeVsBounds:
      return "fge-vs-bounds";
    case Preset::kFgeVsSigma:
      return "fge-vs-sigma";
    case Preset::kCustom:
      return "custom";
  }
  return "unknown";
}

Preset parse_preset(std::string_view name) {
  for (Preset p : {Preset::kMlMismatchLognormal, Preset::kFgeLognormal, Preset::kMlVsBounds,
                   Preset::kFgeVsBounds, Preset::kFgeVsSigma, Preset::kCustom}) {
    if (preset_name(p) == name) return p;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::string_view estimator_name(Estimator estimator) {
  return estimator == Estimator::kMl ? "ml" : "fge";
}

namespace {

bool is_bayesian(Preset preset) {
  return preset == Preset::kFgeLognormal || preset == Preset::kFgeVsBounds ||
         preset == Preset::kFgeVsSigma;
}

void require_positive_finite(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(std::string(name) + " must be positive and finite");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (n_list.empty()) throw ConfigError("n list is empty");
  for (std::size_t n : n_list) {
    if (n < 1) throw ConfigError("every n must be at least 1");
  }
  if (sigma_gm_list.empty()) throw ConfigError("sigma_gm list is empty");
  for (double s : sigma_gm_list) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw ConfigError("sigma_gm values must be non-negative and finite");
    }
  }
  if (is_bayesian(preset) &&
      std::none_of(sigma_gm_list.begin(), sigma_gm_list.end(),
                   [](double s) { return s > 0.0; })) {
    throw ConfigError("preset " + std::string(preset_name(preset)) +
                      " needs a positive sigma_gm");
  }
  require_positive_finite(sigma_xi, "sigma_xi");
  require_positive_finite(sigma_psi, "sigma_psi");
  require_positive_finite(lambda_xi, "lambda_xi");
  require_positive_finite(lambda_psi, "lambda_psi");
  if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("d must be non-negative");
  if (!std::isfinite(theta0)) throw ConfigError("theta0 must be finite");
}

ExperimentConfig preset_config(Preset preset) {
  ExperimentConfig config;
  config.preset = preset;
  switch (preset) {
    case Preset::kMlMismatchLognormal:
      config.distribution = Family::kLogNormal;
      break;
    case Preset::kFgeLognormal:
      config.distribution = Family::kLogNormal;
      config.sigma_gm_list = {1e-4};
      break;
    case Preset::kMlVsBounds:
      break;
    case Preset::kFgeVsBounds:
      config.sigma_gm_list = {1e-4};
      break;
    case Preset::kFgeVsSigma:
      config.n_list = {25};
      config.sigma_gm_list = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
      break;
    case Preset::kCustom:
      break;
  }
  return config;
}

namespace {

struct ModelPair {
  LikelihoodModel u;
  LikelihoodModel v;
};

ModelPair true_models(const ExperimentConfig& config, Family family) {
  switch (family) {
    case Family::kGaussian:
      return {LikelihoodModel::gaussian(config.sigma_xi),
              LikelihoodModel::gaussian(config.sigma_psi)};
    case Family::kLogNormal:
      return {LikelihoodModel::lognormal(config.sigma_xi),
              LikelihoodModel::lognormal(config.sigma_psi)};
    case Family::kExponential:
      break;
  }
  return {LikelihoodModel::exponential(config.lambda_xi),
          LikelihoodModel::exponential(config.lambda_psi)};
}

// Model of `family` with the same delay spread as `truth`.
LikelihoodModel assumed_like(const LikelihoodModel& truth, Family family) {
  if (truth.family() == family) return truth;
  const double spread = std::sqrt(truth.delay_variance());
  switch (family) {
    case Family::kGaussian:
      return LikelihoodModel::gaussian(spread);
    case Family::kLogNormal:
      return LikelihoodModel::lognormal(spread);
    case Family::kExponential:
      break;
  }
  return LikelihoodModel::exponential(1.0 / spread);
}

Scenario matched(const ModelPair& truth, std::initializer_list<Estimator> estimators) {
  Scenario s{truth.u, truth.v, {}};
  for (Estimator e : estimators) s.estimators.push_back({e, truth.u, truth.v});
  return s;
}

Scenario mismatch_study(const ModelPair& truth, Estimator estimator) {
  Scenario s{truth.u, truth.v, {}};
  for (Family f : {Family::kLogNormal, Family::kGaussian, Family::kExponential}) {
    s.estimators.push_back({estimator, assumed_like(truth.u, f), assumed_like(truth.v, f)});
  }
  return s;
}

}  // namespace

std::vector<Scenario> expand_scenarios(const ExperimentConfig& config) {
  const auto gaussian = true_models(config, Family::kGaussian);
  const auto lognormal = true_models(config, Family::kLogNormal);
  const auto exponential = true_models(config, Family::kExponential);
  switch (config.preset) {
    case Preset::kMlMismatchLognormal:
      return {mismatch_study(lognormal, Estimator::kMl)};
    case Preset::kFgeLognormal: {
      Scenario s = mismatch_study(lognormal, Estimator::kFge);
      s.estimators.insert(s.estimators.begin(), {Estimator::kMl, lognormal.u, lognormal.v});
      return {s};
    }
    case Preset::kMlVsBounds:
      return {matched(gaussian, {Estimator::kMl}), matched(exponential, {Estimator::kMl})};
    case Preset::kFgeVsBounds:
      return {matched(gaussian, {Estimator::kMl, Estimator::kFge}),
              matched(exponential, {Estimator::kMl, Estimator::kFge})};
    case Preset::kFgeVsSigma:
      return {matched(gaussian, {Estimator::kMl, Estimator::kFge}),
              matched(lognormal, {Estimator::kMl, Estimator::kFge}),
              matched(exponential, {Estimator::kMl, Estimator::kFge})};
    case Preset::kCustom:
      break;
  }
  const auto truth = true_models(config, config.distribution);
  const Family assumed = config.assumed_distribution.value_or(config.distribution);
  const LikelihoodModel au = assumed_like(truth.u, assumed);
  const LikelihoodModel av = assumed_like(truth.v, assumed);
  return {Scenario{truth.u, truth.v, {{Estimator::kMl, au, av}, {Estimator::kFge, au, av}}}};
}

namespace {

std::string describe_pair(const LikelihoodModel& u, const LikelihoodModel& v) {
  if (u == v) return u.describe();
  return u.describe() + "/" + v.describe();
}

// Per-direction variance bounds for one truth model.
struct DirectionBounds {
  std::optional<double> crb;
  std::optional<double> chrb;
  std::optional<double> bcrb;
  std::optional<double> bchrb;
};

DirectionBounds direction_bounds(const LikelihoodModel& model, std::size_t n,
                                 double sigma_gm) {
  DirectionBounds out;
  if (sigma_gm == 0.0) {
    if (!model.constrained()) out.crb = crb(model, n);
    out.chrb = chrb(model, n).per_param_bound;
  } else {
    const double b = bcrb(model, sigma_gm, n).bound.back();
    if (std::isfinite(b)) out.bcrb = b;
    out.bchrb = bchrb(model, sigma_gm, n).per_param_bound;
  }
  return out;
}

std::optional<double> combine(const std::optional<double>& bu, const std::optional<double>& bv,
                              const BiasPair& biases) {
  if (!bu || !bv) return std::nullopt;
  return mse_bound_theta(*bu, *bv, biases);
}

class BoundCache {
 public:
  const DirectionBounds& get(const LikelihoodModel& model, std::size_t n, double sigma_gm) {
    for (const auto& entry : entries_) {
      if (entry.model == model && entry.n == n && entry.sigma_gm == sigma_gm) {
        return entry.bounds;
      }
    }
    entries_.push_back({model, n, sigma_gm, direction_bounds(model, n, sigma_gm)});
    return entries_.back().bounds;
  }

 private:
  struct Entry {
    LikelihoodModel model;
    std::size_t n;
    double sigma_gm;
    DirectionBounds bounds;
  };
  std::vector<Entry> entries_;
};

double squared_error(const Scenario::Applied& applied, const SimulatedExchange& data,
                     double sigma_gm) {
  const double truth = data.truth.theta.back();
  double estimate = 0.0;
  if (applied.estimator == Estimator::kMl) {
    estimate =
        ml_theta(data.series.u, data.series.v, applied.assumed_u, applied.assumed_v).theta_hat;
  } else {
    estimate = fge_theta(data.series.u, data.series.v, applied.assumed_u, applied.assumed_v,
                         sigma_gm)
                   .theta_hat_n;
  }
  const double err = estimate - truth;
  return err * err;
}

// Runs `count` trials over a pool of `threads` workers; body(trial) is called
// exactly once per trial index.
template <typename Body>
void parallel_trials(std::size_t count, std::size_t threads, Body body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t t = 0; t < count; ++t) body(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= count) return;
      try {
        body(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& values) {
  const double count = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= count;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (count - 1.0) / count)};
}

}  // namespace

std::vector<MseRecord> run_trials(const ExperimentConfig& config) {
  config.validate();
  const auto scenarios = expand_scenarios(config);
  std::size_t threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());

  const ExchangeParams params{config.d, config.theta0};
  BoundCache cache;
  std::vector<MseRecord> records;
  std::uint64_t cell = 0;
  for (const auto& scenario : scenarios) {
    for (double sigma_gm : config.sigma_gm_list) {
      for (std::size_t n : config.n_list) {
        std::vector<const Scenario::Applied*> active;
        for (const auto& applied : scenario.estimators) {
          if (applied.estimator == Estimator::kFge && sigma_gm == 0.0) continue;
          active.push_back(&applied);
        }
        const std::uint64_t this_cell = cell++;
        if (active.empty()) continue;

        std::vector<std::vector<double>> errors(active.size(),
                                                std::vector<double>(config.trials));
        parallel_trials(config.trials, threads, [&](std::size_t trial) {
          TrialStreams streams(config.seed, this_cell, trial);
          const auto data = simulate_gauss_markov(params, GaussMarkovParams{sigma_gm},
                                                  scenario.true_u, scenario.true_v, n,
                                                  streams);
          for (std::size_t e = 0; e < active.size(); ++e) {
            errors[e][trial] = squared_error(*active[e], data, sigma_gm);
          }
        });

        for (std::size_t e = 0; e < active.size(); ++e) {
          const auto& applied = *active[e];
          MseRecord rec;
          rec.preset = std::string(preset_name(config.preset));
          rec.estimator = std::string(estimator_name(applied.estimator));
          rec.true_model = describe_pair(scenario.true_u, scenario.true_v);
          rec.assumed_model = describe_pair(applied.assumed_u, applied.assumed_v);
          rec.n = n;
          rec.sigma_gm = sigma_gm;
          rec.trials = config.trials;
          std::tie(rec.mse, rec.stderr_mse) = mean_and_stderr(errors[e]);
          if (config.with_bounds) {
            const auto bu = cache.get(scenario.true_u, n, sigma_gm);
            const auto bv = cache.get(scenario.true_v, n, sigma_gm);
            BiasPair biases;
            const bool matched_ml = applied.estimator == Estimator::kMl &&
                                    applied.assumed_u == scenario.true_u &&
                                    applied.assumed_v == scenario.true_v;
            if (matched_ml) {
              biases = {ml_bias(scenario.true_u, n), ml_bias(scenario.true_v, n)};
            }
            rec.bound_crb = combine(bu.crb, bv.crb, biases);
            rec.bound_chrb = combine(bu.chrb, bv.chrb, biases);
            rec.bound_bcrb = combine(bu.bcrb, bv.bcrb, {});
            rec.bound_bchrb = combine(bu.bchrb, bv.bchrb, {});
          }
          records.push_back(std::move(rec));
        }
      }
    }
  }
  return records;
}

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, result.ptr);
}

namespace {

std::string optional_field(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

}  // namespace

void write_csv(const std::vector<MseRecord>& records, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.preset << ',' << r.estimator << ',' << r.true_model << ',' << r.assumed_model
        << ',' << r.n << ',' << format_double(r.sigma_gm) << ',' << r.trials << ','
        << format_double(r.mse) << ',' << format_double(r.stderr_mse) << ','
        << optional_field(r.bound_crb) << ',' << optional_field(r.bound_chrb) << ','
        << optional_field(r.bound_bcrb) << ',' << optional_field(r.bound_bchrb) << '\n';
  }
}

void emit_csv(const std::vector<MseRecord>& records, const std::filesystem::path& path) {
  if (records.empty()) throw ConfigError("no records to write");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(records, out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

double parse_number(std::string_view text, std::size_t line_no) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw ConfigError("line " + std::to_string(line_no) + ": '" + std::string(text) +
                      "' is not a finite number");
  }
  return value;
}

}  // namespace

ObservationSeries read_series_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t u_col = 0;
  std::size_t v_col = 0;
  bool have_header = false;
  ObservationSeries series;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (!have_header) {
      const auto find = [&](std::string_view name) {
        const auto it = std::find(fields.begin(), fields.end(), name);
        if (it == fields.end()) {
          throw ConfigError("series header has no '" + std::string(name) + "' column");
        }
        return static_cast<std::size_t>(it - fields.begin());
      };
      u_col = find("u");
      v_col = find("v");
      have_header = true;
      continue;
    }
    if (fields.size() <= std::max(u_col, v_col)) {
      throw ConfigError("line " + std::to_string(line_no) + ": too few fields");
    }
    series.u.push_back(parse_number(fields[u_col], line_no));
    series.v.push_back(parse_number(fields[v_col], line_no));
  }
  if (!have_header) throw ConfigError("series file is empty");
  if (series.size() == 0) throw ConfigError("series file has no data rows");
  return series;
}

void write_series_csv(const SimulatedExchange& data, std::ostream& out) {
  out << "u,v,xi,psi,theta\n";
  for (std::size_t k = 0; k < data.series.size(); ++k) {
    out << format_double(data.series.u[k]) << ',' << format_double(data.series.v[k]) << ','
        << format_double(data.truth.xi[k]) << ',' << format_double(data.truth.psi[k]) << ','
        << format_double(data.truth.theta[k]) << '\n';
  }
}

std::map<std::string, std::string> read_key_value_config(std::istream& in) {
  std::map<std::string, std::string> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(text.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    }
    values[std::string(key)] = std::string(trim(text.substr(eq + 1)));
  }
  return values;
}

}  // namespace clocksync
