// osc-sde: command-line front end for the experiment suite.
//
// Settings are resolved as: command-line flag > --config file (flat
// key=value) > OSC_SDE_SEED (seed only) > experiment defaults.

#include "oscsde/experiments.hpp"
#include "oscsde/output.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using namespace oscsde;

constexpr int kExitConfig = 2;
constexpr int kExitBlowUp = 3;
constexpr int kExitValidate = 4;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_plain(std::string_view text) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw InvalidInput("not a number: '" + s + "'");
  }
  return v;
}

// Plain decimals, or powers written as "2^-4".
double parse_number(std::string_view text) {
  const auto caret = text.find('^');
  if (caret == std::string_view::npos) return parse_plain(text);
  return std::pow(parse_plain(text.substr(0, caret)), parse_plain(text.substr(caret + 1)));
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_number(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_unsigned(std::string_view text, std::string_view what) {
  const std::string s = trim(text);
  T v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw InvalidInput(std::string(what) + ": not a non-negative integer: '" + s + "'");
  }
  return v;
}

std::vector<Scheme> parse_schemes(std::string_view text) {
  if (trim(text) == "all") return {Scheme::euler_maruyama, Scheme::integral, Scheme::micro_macro};
  std::vector<Scheme> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_scheme(trim(text.substr(start, end - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput(path + ":" + std::to_string(number) + ": expected key=value");
    }
    out[trim(std::string_view(t).substr(0, eq))] = trim(std::string_view(t).substr(eq + 1));
  }
  return out;
}

void apply(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "experiment") {
    if (parse_experiment(value) != c.experiment) throw InvalidInput("config file names another experiment");
  } else if (key == "problem") {
    c.problem = value == "all" ? "" : value;
  } else if (key == "scheme") {
    c.schemes = parse_schemes(value);
  } else if (key == "eps") {
    c.epsilons = parse_list(value);
  } else if (key == "h") {
    c.steps = parse_list(value);
  } else if (key == "samples") {
    c.samples = parse_unsigned<std::size_t>(value, key);
  } else if (key == "final-time") {
    c.final_time = parse_number(value);
  } else if (key == "seed") {
    c.seed = parse_unsigned<std::uint64_t>(value, key);
  } else if (key == "out") {
    c.output_path = value;
  } else if (key == "format") {
    c.format = parse_format(value);
  } else if (key == "threads") {
    c.threads = parse_unsigned<unsigned>(value, key);
  } else if (key == "test-function") {
    make_test_function(value);
    c.test_function = value;
  } else if (key == "reference-refinement") {
    c.reference_refinement = parse_unsigned<std::size_t>(value, key);
  } else if (key == "noise-factor") {
    c.noise_factor = parse_number(value);
  } else if (key == "period-scale") {
    c.period_scale = parse_number(value);
  } else {
    throw InvalidInput("unknown setting '" + key + "'");
  }
}

void emit(const ExperimentConfig& config, const std::string& text) {
  if (config.output_path.empty()) {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(config.output_path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write '" + config.output_path + "'");
  out << text;
}

template <class Result>
std::string render(const Result& result, OutputFormat format) {
  return format == OutputFormat::csv ? render_csv(result) : render_json(result);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and convergence experiments for SDEs with highly oscillatory drift"};
  app.set_help_flag("--help", "print this help and exit");  // frees the name h for --h
  app.set_version_flag("--version", "osc-sde 1.0.0");

  std::string experiment_name;
  app.add_option("experiment", experiment_name, "weak-conv | strong-conv | resonance | validate | sweep")
      ->required();

  std::string config_path;
  app.add_option("--config", config_path, "flat key=value settings file");

  const std::vector<std::pair<std::string, std::string>> flags{
      {"problem", "catalog problem name (validate: 'all' or one name)"},
      {"scheme", "em | integral | micro-macro | all, or a comma list"},
      {"eps", "comma-separated epsilon list (2^-4 style accepted)"},
      {"h", "comma-separated step list (2^-4 style accepted)"},
      {"samples", "Monte Carlo sample count M (resonance: number of runs)"},
      {"final-time", "final time T"},
      {"seed", "master seed (falls back to OSC_SDE_SEED)"},
      {"out", "output path (default stdout)"},
      {"format", "csv | json"},
      {"threads", "worker threads; does not affect results"},
      {"test-function", "weak test function: x1 | sum"},
      {"reference-refinement", "fine reference grid = finest h / this factor"},
      {"noise-factor", "multiplies the catalog noise scale (0: deterministic)"},
      {"period-scale", "validate: multiply the declared period"},
  };
  std::map<std::string, std::optional<std::string>> given;
  for (const auto& [name, help] : flags) {
    app.add_option("--" + name, given[name], help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::cerr << render_error("config", e.what());
    return kExitConfig;
  }

  ExperimentConfig config;
  try {
    const ExperimentKind kind = parse_experiment(experiment_name);
    config = ExperimentConfig::defaults(kind);

    std::map<std::string, std::string> settings;
    if (!config_path.empty()) settings = read_config_file(config_path);
    if (!settings.contains("seed")) {
      if (const char* env = std::getenv("OSC_SDE_SEED"); env && *env) settings["seed"] = env;
    }
    for (const auto& [key, value] : given) {
      if (value) settings[key] = *value;
    }
    for (const auto& [key, value] : settings) apply(config, key, value);
  } catch (const std::exception& e) {
    std::cerr << render_error("config", e.what());
    return kExitConfig;
  }

  try {
    switch (config.experiment) {
      case ExperimentKind::weak_conv:
        emit(config, render(run_weak_conv(config), config.format));
        break;
      case ExperimentKind::strong_conv:
        emit(config, render(run_strong_conv(config), config.format));
        break;
      case ExperimentKind::sweep:
        emit(config, render(run_sweep(config), config.format));
        break;
      case ExperimentKind::resonance:
        emit(config, render(run_resonance(config), config.format));
        break;
      case ExperimentKind::validate: {
        const ValidationResult result = run_validate(config);
        emit(config, render(result, config.format));
        std::cerr << render_report(result);
        if (!result.passes()) return kExitValidate;
        break;
      }
    }
  } catch (const NumericalBlowUp& e) {
    std::cerr << render_error("blow-up", e.what(), &e);
    return kExitBlowUp;
  } catch (const InvalidInput& e) {
    std::cerr << render_error("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << render_error("internal", e.what());
    return 1;
  }
  return 0;
}
