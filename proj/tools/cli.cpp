#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "clocksync/bounds.hpp"
#include "clocksync/error.hpp"
#include "clocksync/fge.hpp"
#include "clocksync/harness.hpp"
#include "clocksync/ml.hpp"
#include "clocksync/model.hpp"

namespace clocksync {

namespace {

using Settings = std::map<std::string, std::string>;

// Keys accepted in config files; flags use the same names with '_' -> '-'.
const std::vector<std::string> kKeys = {
    "seed",       "trials",     "out",        "n",     "sigma_gm", "dist",
    "sigma_xi",   "sigma_psi",  "lambda_xi",  "lambda_psi",        "assumed_dist",
    "d",          "theta0",     "threads"};

std::string flag_name(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return "--" + key;
}

double parse_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), value);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(key + ": '" + text + "' is not a finite number");
  }
  return value;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), value);
  if (r.ec != std::errc() || r.ptr != text.data() + text.size()) {
    throw ConfigError(key + ": '" + text + "' is not a non-negative integer");
  }
  return value;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  for (;;) {
    const auto comma = text.find(',', start);
    items.push_back(text.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

Settings load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  Settings raw = read_key_value_config(in);
  Settings settings;
  for (auto& [key, value] : raw) {
    const std::string name = key == "distribution" ? "dist" : key;
    if (std::find(kKeys.begin(), kKeys.end(), name) == kKeys.end()) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    settings[name] = value;
  }
  return settings;
}

void apply_settings(const Settings& settings, ExperimentConfig& config) {
  for (const auto& [key, value] : settings) {
    if (key == "seed") {
      config.seed = parse_unsigned(key, value);
    } else if (key == "trials") {
      config.trials = parse_unsigned(key, value);
    } else if (key == "out") {
      config.output_path = value;
    } else if (key == "n") {
      config.n_list.clear();
      for (const auto& item : split_list(value)) {
        config.n_list.push_back(parse_unsigned(key, item));
      }
    } else if (key == "sigma_gm") {
      config.sigma_gm_list.clear();
      for (const auto& item : split_list(value)) {
        config.sigma_gm_list.push_back(parse_real(key, item));
      }
    } else if (key == "dist") {
      config.distribution = parse_family(value);
    } else if (key == "assumed_dist") {
      config.assumed_distribution = parse_family(value);
    } else if (key == "sigma_xi") {
      config.sigma_xi = parse_real(key, value);
    } else if (key == "sigma_psi") {
      config.sigma_psi = parse_real(key, value);
    } else if (key == "lambda_xi") {
      config.lambda_xi = parse_real(key, value);
    } else if (key == "lambda_psi") {
      config.lambda_psi = parse_real(key, value);
    } else if (key == "d") {
      config.d = parse_real(key, value);
    } else if (key == "theta0") {
      config.theta0 = parse_real(key, value);
    } else if (key == "threads") {
      config.threads = parse_unsigned(key, value);
    }
  }
}

// Flags shared by every subcommand. Values stay as text until merged with the
// config file so that both sources go through the same parser.
struct CommonFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "flat key=value config file");
    for (const auto& key : kKeys) {
      app.add_option_function<std::string>(
          flag_name(key), [this, key](const std::string& v) { values[key] = v; },
          key == "n" || key == "sigma_gm" ? "value or comma-separated list" : "");
    }
  }

  ExperimentConfig resolve(ExperimentConfig config) const {
    Settings merged;
    if (!config_path.empty()) merged = load_config_file(config_path);
    for (const auto& [key, value] : values) merged[key] = value;
    if (const char* env = std::getenv("CLOCKSYNC_SEED"); env != nullptr && *env != '\0') {
      merged["seed"] = env;
    }
    apply_settings(merged, config);
    config.validate();
    return config;
  }
};

struct Models {
  LikelihoodModel u;
  LikelihoodModel v;
};

Models models_for(const ExperimentConfig& config, Family family) {
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

std::size_t single_n(const ExperimentConfig& config) {
  if (config.n_list.size() != 1) throw ConfigError("--n must be a single value here");
  return config.n_list.front();
}

double single_sigma(const ExperimentConfig& config) {
  if (config.sigma_gm_list.size() != 1) {
    throw ConfigError("--sigma-gm must be a single value here");
  }
  return config.sigma_gm_list.front();
}

template <typename Writer>
void write_output(const ExperimentConfig& config, std::ostream& out, Writer writer) {
  if (!config.output_path) {
    writer(out);
    return;
  }
  std::ofstream file(*config.output_path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + config.output_path->string() + "' for writing");
  writer(file);
  file.flush();
  if (!file) throw IoError("failed writing '" + config.output_path->string() + "'");
}

ExperimentConfig command_defaults() {
  ExperimentConfig config;
  config.n_list = {25};
  config.sigma_gm_list = {0.0};
  return config;
}

void run_simulate(const CommonFlags& flags, std::ostream& out) {
  const auto config = flags.resolve(command_defaults());
  const auto models = models_for(config, config.distribution);
  TrialStreams streams(config.seed);
  const auto data = simulate_gauss_markov({config.d, config.theta0},
                                          GaussMarkovParams{single_sigma(config)}, models.u,
                                          models.v, single_n(config), streams);
  write_output(config, out, [&](std::ostream& o) { write_series_csv(data, o); });
}

void run_estimate(const CommonFlags& flags, const std::string& path, std::ostream& out) {
  const auto config = flags.resolve(command_defaults());
  ObservationSeries series;
  if (path == "-") {
    series = read_series_csv(std::cin);
  } else {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read series file '" + path + "'");
    series = read_series_csv(in);
  }
  const auto models =
      models_for(config, config.assumed_distribution.value_or(config.distribution));
  const double sigma_gm = single_sigma(config);
  write_output(config, out, [&](std::ostream& o) {
    const auto ml = ml_theta(series.u, series.v, models.u, models.v);
    o << "ml xi_hat=" << format_double(ml.xi_hat) << " psi_hat=" << format_double(ml.psi_hat)
      << " theta_hat=" << format_double(ml.theta_hat) << " d_hat=" << format_double(ml.d_hat)
      << '\n';
    if (sigma_gm > 0.0) {
      const auto fge = fge_theta(series.u, series.v, models.u, models.v, sigma_gm);
      o << "fge xi_hat_n=" << format_double(fge.xi_hat_n)
        << " psi_hat_n=" << format_double(fge.psi_hat_n)
        << " theta_hat_n=" << format_double(fge.theta_hat_n) << '\n';
    }
  });
}

void print_bound(std::ostream& o, std::string_view name, std::size_t n, double sigma_gm,
                 std::optional<double> bu, std::optional<double> bv) {
  o << name << " n=" << n << " sigma_gm=" << format_double(sigma_gm);
  if (bu && bv) {
    o << " per_param=" << format_double(*bu)
      << " theta_mse=" << format_double(mse_bound_theta(*bu, *bv)) << '\n';
  } else {
    o << " undefined\n";
  }
}

void run_bounds(const CommonFlags& flags, std::ostream& out) {
  const auto config = flags.resolve(command_defaults());
  const auto models = models_for(config, config.distribution);
  write_output(config, out, [&](std::ostream& o) {
    o << "model=" << models.u.describe();
    if (!(models.u == models.v)) o << '/' << models.v.describe();
    o << '\n';
    for (double sigma_gm : config.sigma_gm_list) {
      for (std::size_t n : config.n_list) {
        if (sigma_gm == 0.0) {
          std::optional<double> cu;
          std::optional<double> cv;
          if (!models.u.constrained()) cu = crb(models.u, n);
          if (!models.v.constrained()) cv = crb(models.v, n);
          print_bound(o, "crb", n, sigma_gm, cu, cv);
          print_bound(o, "chrb", n, sigma_gm, chrb(models.u, n).per_param_bound,
                      chrb(models.v, n).per_param_bound);
        } else {
          const auto finite = [](double b) {
            return std::isfinite(b) ? std::optional<double>(b) : std::nullopt;
          };
          print_bound(o, "bcrb", n, sigma_gm, finite(bcrb(models.u, sigma_gm, n).bound.back()),
                      finite(bcrb(models.v, sigma_gm, n).bound.back()));
          print_bound(o, "bchrb", n, sigma_gm, bchrb(models.u, sigma_gm, n).per_param_bound,
                      bchrb(models.v, sigma_gm, n).per_param_bound);
        }
      }
    }
  });
}

void run_experiment(const CommonFlags& flags, const std::string& preset_text, bool no_bounds,
                    std::ostream& out) {
  auto config = flags.resolve(preset_config(parse_preset(preset_text)));
  config.with_bounds = !no_bounds;
  const auto records = run_trials(config);
  if (config.output_path) {
    emit_csv(records, *config.output_path);
  } else {
    write_csv(records, out);
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clock-offset estimation for two-way timestamp exchanges", "clocksync"};
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "simulate one exchange series as CSV");
  CommonFlags simulate_flags;
  simulate_flags.attach(*simulate);

  auto* estimate = app.add_subcommand("estimate", "ML (and FGE with --sigma-gm) estimates");
  CommonFlags estimate_flags;
  estimate_flags.attach(*estimate);
  std::string series_path;
  estimate->add_option("series", series_path, "CSV with u and v columns ('-' for stdin)")
      ->required();

  auto* bounds_cmd = app.add_subcommand("bounds", "lower bounds for a model, N and sigma");
  CommonFlags bounds_flags;
  bounds_flags.attach(*bounds_cmd);

  auto* experiment = app.add_subcommand("experiment", "Monte-Carlo MSE experiment as CSV");
  CommonFlags experiment_flags;
  experiment_flags.attach(*experiment);
  std::string preset;
  experiment
      ->add_option("preset", preset,
                   "ml-mismatch-lognormal | fge-lognormal | ml-vs-bounds | fge-vs-bounds | "
                   "fge-vs-sigma | custom")
      ->required();
  bool no_bounds = false;
  experiment->add_flag("--no-bounds", no_bounds, "skip the bound columns");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) run_simulate(simulate_flags, out);
    if (estimate->parsed()) run_estimate(estimate_flags, series_path, out);
    if (bounds_cmd->parsed()) run_bounds(bounds_flags, out);
    if (experiment->parsed()) run_experiment(experiment_flags, preset, no_bounds, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace clocksync
