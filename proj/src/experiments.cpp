#include "oscsde/experiments.hpp"

#include "oscsde/toolkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace oscsde {

namespace {

std::string shortest(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += shortest(values[i]);
  }
  return out;
}

std::vector<double> powers_of_two(int from, int to) {
  std::vector<double> out;
  for (int e = from; e >= to; --e) out.push_back(std::ldexp(1.0, e));
  return out;
}

const std::vector<double> kDefaultEpsilons{0x1p-4, 0x1p-6, 0x1p-8, 0x1p-10};

void require_common(const ExperimentConfig& config) {
  if (config.epsilons.empty()) throw InvalidInput("no epsilon values");
  for (double eps : config.epsilons) {
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("epsilon must lie in (0, 1]");
  }
  if (config.steps.empty()) throw InvalidInput("no step sizes");
  if (config.samples == 0) throw InvalidInput("need at least one sample");
  if (!(config.final_time > 0.0)) throw InvalidInput("final time must be positive");
  if (config.schemes.empty()) throw InvalidInput("no schemes");
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::weak_conv: return "weak-conv";
    case ExperimentKind::strong_conv: return "strong-conv";
    case ExperimentKind::resonance: return "resonance";
    case ExperimentKind::validate: return "validate";
    case ExperimentKind::sweep: return "sweep";
  }
  return "unknown";
}

ExperimentKind parse_experiment(std::string_view name) {
  for (auto kind : {ExperimentKind::weak_conv, ExperimentKind::strong_conv,
                    ExperimentKind::resonance, ExperimentKind::validate, ExperimentKind::sweep}) {
    if (to_string(kind) == name) return kind;
  }
  throw InvalidInput("unknown experiment '" + std::string(name) + "'");
}

std::string_view to_string(OutputFormat format) {
  return format == OutputFormat::csv ? "csv" : "json";
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw InvalidInput("unknown output format '" + std::string(name) + "'");
}

double resonant_step(double epsilon, double fraction) {
  return fraction * 2.0 * std::numbers::pi * epsilon;
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::weak_conv:
      c.problem = "henon-heiles-mult-weak";
      c.schemes = {Scheme::integral, Scheme::micro_macro};
      c.steps = powers_of_two(-1, -5);
      c.epsilons = kDefaultEpsilons;
      c.samples = 10000;
      c.final_time = 1.0;
      break;
    case ExperimentKind::strong_conv:
      c.problem = "henon-heiles-mult-strong";
      c.schemes = {Scheme::integral, Scheme::micro_macro};
      c.steps = powers_of_two(-4, -8);
      c.epsilons = kDefaultEpsilons;
      c.samples = 100;
      c.final_time = 1.0;
      break;
    case ExperimentKind::resonance:
      c.problem = "logistic";
      c.schemes = {Scheme::euler_maruyama, Scheme::micro_macro};
      c.epsilons = {0.1};
      c.steps = {resonant_step(0.1)};
      c.samples = 20;
      c.final_time = 10.0;
      c.reference_refinement = 256;
      c.format = OutputFormat::json;
      break;
    case ExperimentKind::validate:
      c.problem = "";
      c.schemes = {Scheme::euler_maruyama};
      c.epsilons = {0x1p-4};
      c.steps = powers_of_two(-3, -7);
      c.samples = 10000;
      c.final_time = 1.0;
      c.format = OutputFormat::json;
      break;
    case ExperimentKind::sweep:
      c.problem = "henon-heiles-add-weak";
      c.schemes = {Scheme::micro_macro};
      c.steps = {0x1p-8};
      c.epsilons = kDefaultEpsilons;
      c.samples = 1000;
      c.final_time = 1.0;
      break;
  }
  return c;
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::describe() const {
  std::string scheme_list;
  for (std::size_t i = 0; i < schemes.size(); ++i) {
    if (i) scheme_list += ',';
    scheme_list += to_string(schemes[i]);
  }
  // Thread count and output path are left out: they never change results.
  return {
      {"experiment", std::string(to_string(experiment))},
      {"problem", problem.empty() ? "all" : problem},
      {"scheme", scheme_list},
      {"eps", join(epsilons)},
      {"h", join(steps)},
      {"samples", std::to_string(samples)},
      {"final-time", shortest(final_time)},
      {"seed", std::to_string(seed)},
      {"format", std::string(to_string(format))},
      {"test-function", test_function},
      {"reference-refinement", std::to_string(reference_refinement)},
      {"noise-factor", shortest(noise_factor)},
      {"period-scale", shortest(period_scale)},
  };
}

const GroupFit* TableResult::fit_for(Scheme scheme, double epsilon) const {
  for (const auto& g : fits) {
    if (g.scheme == scheme && g.epsilon == epsilon) return &g;
  }
  return nullptr;
}

TestFunction make_test_function(std::string_view name) {
  if (name == "x1") return [](const StateVector& x) { return x[0]; };
  if (name == "sum") return [](const StateVector& x) { return x.sum(); };
  throw InvalidInput("unknown test function '" + std::string(name) + "'");
}

namespace {

TableResult run_convergence(const ExperimentConfig& config, ErrorKind kind) {
  require_common(config);
  const CatalogEntry probe = make_catalog_problem(config.problem, config.epsilons.front(),
                                                  config.noise_factor);

  StudyConfig study;
  study.kind = kind;
  study.schemes = config.schemes;
  study.steps = config.steps;
  study.t0 = 0.0;
  study.final_time = config.final_time;
  study.initial_state = probe.spec.initial_state;
  study.samples = config.samples;
  study.seed = config.seed;
  study.threads = config.threads;
  if (kind == ErrorKind::weak) study.test_function = make_test_function(config.test_function);

  if (config.problem == "gbm") {
    const double lambda = probe.spec.parameters.at("lambda");
    const double mu = probe.spec.parameters.at("mu");
    const double x0 = probe.spec.initial_state[0];
    if (kind == ErrorKind::weak) {
      study.reference = AnalyticMoment{x0 * std::exp(lambda * config.final_time)};
    } else {
      study.reference = ExactSolution{[=](double t, double w) {
        return StateVector::Constant(1, geometric_brownian_solution(lambda, mu, x0, t, w)).eval();
      }};
    }
  } else {
    study.reference = FineReference{config.reference_refinement};
  }

  const ProblemFactory factory = [&](double eps) {
    return make_catalog_problem(config.problem, eps, config.noise_factor).problem;
  };

  TableResult result;
  result.config = config;
  result.table = epsilon_sweep(factory, config.epsilons, study);
  for (double eps : config.epsilons) {
    for (Scheme scheme : config.schemes) {
      const auto series = result.table.series(scheme, eps);
      result.fits.push_back({scheme, eps, try_estimate_order(series)});
    }
  }
  return result;
}

}  // namespace

TableResult run_weak_conv(const ExperimentConfig& config) {
  return run_convergence(config, ErrorKind::weak);
}

TableResult run_strong_conv(const ExperimentConfig& config) {
  return run_convergence(config, ErrorKind::strong);
}

TableResult run_sweep(const ExperimentConfig& config) {
  require_common(config);
  const double h = config.steps.front();
  TableResult result;
  result.config = config;
  std::vector<std::pair<double, double>> series;
  for (std::size_t j = 0; j < config.epsilons.size(); ++j) {
    const double eps = config.epsilons[j];
    const CatalogEntry entry = make_catalog_problem(config.problem, eps, config.noise_factor);
    const double ratio = config.final_time / h;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
      throw InvalidInput("sweep: step does not divide the final time");
    }
    const TimeGrid grid(0.0, config.final_time, static_cast<std::size_t>(std::round(ratio)));
    const std::uint64_t key = derive_seed(config.seed, j);
    ErrorRow row;
    row.scheme = Scheme::micro_macro;
    row.epsilon = eps;
    row.h = h;
    row.stream_key = derive_seed(key, 0);
    row.estimate = micro_variable_magnitude(entry.problem, grid, config.samples, key,
                                            entry.spec.initial_state, config.threads);
    result.table.rows.push_back(row);
    series.emplace_back(eps, row.estimate.value);
  }
  const auto fit = try_estimate_order(series);
  for (double eps : config.epsilons) result.fits.push_back({Scheme::micro_macro, eps, fit});
  return result;
}

ResonanceResult run_resonance(const ExperimentConfig& config) {
  require_common(config);
  const double eps = config.epsilons.front();
  const double step = config.steps.front();
  if (!(step > 0.0)) throw InvalidInput("resonance: step must be positive");
  if (config.reference_refinement == 0) throw InvalidInput("resonance: refinement must be positive");
  const auto steps = static_cast<std::size_t>(std::floor(config.final_time / step + 1e-9));
  if (steps == 0) throw InvalidInput("resonance: step exceeds the final time");

  const CatalogEntry entry = make_catalog_problem(config.problem, eps, config.noise_factor);
  const OscillatoryProblem& problem = entry.problem;
  const StateVector& x0 = entry.spec.initial_state;

  ResonanceResult result;
  result.config = config;
  result.step = step;
  result.step_count = steps;
  result.final_time = static_cast<double>(steps) * step;

  const std::size_t refinement = config.reference_refinement;
  const TimeGrid coarse(0.0, result.final_time, steps);
  const TimeGrid fine(0.0, result.final_time, steps * refinement);
  const std::uint64_t key = derive_seed(config.seed, 0);

  auto times_of = [](const TimeGrid& grid) {
    std::vector<double> t(grid.step_count() + 1);
    for (std::size_t n = 0; n <= grid.step_count(); ++n) t[n] = grid.time(n);
    return t;
  };

  result.runs.resize(config.samples);
  parallel_for(config.samples, config.threads, [&](std::size_t i) {
    RngStream stream(key, i);
    const BrownianGrid brownian = BrownianGrid::sample(stream, fine.step(), fine.step_count());
    const std::vector<double> increments = brownian.coarsen(refinement);

    std::vector<StateVector> reference;
    try {
      reference = simulate_path(problem, Scheme::integral, fine, brownian.fine_increments(), x0);
    } catch (const NumericalBlowUp& e) {
      throw e.with_path(i);
    }

    ResonanceRun run;
    run.sample = i;
    auto attempt = [&](Scheme scheme, double& error, bool& diverged) {
      try {
        auto path = simulate_path(problem, scheme, coarse, increments, x0);
        error = (path.back() - reference.back()).norm();
        return path;
      } catch (const NumericalBlowUp&) {
        diverged = true;
        error = std::numeric_limits<double>::infinity();
        return std::vector<StateVector>{};
      }
    };
    auto em = attempt(Scheme::euler_maruyama, run.em_error, run.em_diverged);
    auto mm = attempt(Scheme::micro_macro, run.micro_macro_error, run.micro_macro_diverged);
    result.runs[i] = run;

    if (i == 0) {
      result.paths.push_back({"reference", i, times_of(fine), std::move(reference)});
      const auto coarse_times = times_of(coarse);
      em.empty() ? void() : result.paths.push_back({"em", i, coarse_times, std::move(em)});
      mm.empty() ? void() : result.paths.push_back({"micro-macro", i, coarse_times, std::move(mm)});
    }
  });

  std::vector<double> em_errors, mm_errors;
  for (const auto& run : result.runs) {
    em_errors.push_back(run.em_error);
    mm_errors.push_back(run.micro_macro_error);
  }
  result.median_em_error = median(em_errors);
  result.median_micro_macro_error = median(mm_errors);
  return result;
}

std::vector<StateVector> probe_points(std::size_t dimension, std::size_t count, std::uint64_t seed) {
  RngStream stream(seed, 0x70726f6265ull);  // "probe"
  std::vector<StateVector> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    StateVector x(static_cast<Eigen::Index>(dimension));
    for (auto& v : x) v = -2.0 + 4.0 * stream.next_uniform();
    out.push_back(x);
  }
  return out;
}

SelfTest gbm_self_test(std::uint64_t seed, std::size_t weak_samples, std::size_t strong_samples,
                       unsigned threads) {
  const double lambda = 1.0, mu = 0.5, x0 = 1.0;
  const OscillatoryProblem problem = geometric_brownian(lambda, mu);
  const ExactSolution exact{[=](double t, double w) {
    return StateVector::Constant(1, geometric_brownian_solution(lambda, mu, x0, t, w)).eval();
  }};

  StudyConfig study;
  study.schemes = {Scheme::euler_maruyama};
  study.final_time = 1.0;
  study.initial_state = StateVector::Constant(1, x0);
  study.reference = exact;
  study.seed = seed;
  study.threads = threads;

  study.kind = ErrorKind::weak;
  study.steps = powers_of_two(-3, -7);
  study.samples = weak_samples;
  study.test_function = [](const StateVector& x) { return x[0]; };
  const auto weak = run_study(problem, study, derive_seed(seed, 0));

  // With lambda = 1 the O(h) drift error still dominates on 2^-4..2^-8 (slope
  // near 0.64); a smaller drift puts the strong test in its asymptotic regime.
  const double strong_lambda = 0.5;
  study.kind = ErrorKind::strong;
  study.steps = powers_of_two(-4, -8);
  study.samples = strong_samples;
  study.reference = ExactSolution{[=](double t, double w) {
    return StateVector::Constant(1, geometric_brownian_solution(strong_lambda, mu, x0, t, w)).eval();
  }};
  const auto strong =
      run_study(geometric_brownian(strong_lambda, mu), study, derive_seed(seed, 1));

  return {estimate_order(weak.series(Scheme::euler_maruyama, 1.0)),
          estimate_order(strong.series(Scheme::euler_maruyama, 1.0))};
}

bool ValidationResult::passes() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.pass; });
}

ValidationResult run_validate(const ExperimentConfig& config) {
  if (config.epsilons.empty()) throw InvalidInput("validate: no epsilon value");
  if (!(config.period_scale > 0.0)) throw InvalidInput("validate: period scale must be positive");
  ValidationResult result;
  result.config = config;

  auto add = [&](const std::string& problem, const std::string& check, double value, double lower,
                 double upper) {
    result.entries.push_back({problem, check, value, lower, upper, value >= lower && value <= upper});
  };

  std::vector<std::string> names;
  if (config.problem.empty() || config.problem == "all") {
    names = catalog_names();
  } else {
    names = {config.problem};
  }

  for (const auto& name : names) {
    CatalogEntry entry = make_catalog_problem(name, config.epsilons.front(), config.noise_factor);
    OscillatoryProblem& problem = entry.problem;
    problem.period *= config.period_scale;
    const auto probes = probe_points(problem.dimension, 100, config.seed);

    const ValidationReport report = validate_problem(problem, probes);
    for (const auto& line : report.lines()) add(name, line.check, line.value, 0.0, line.tolerance);

    // |Phi_theta(x) - x| <= eps * max_theta |F_theta(x)| and Phi periodic in theta.
    double excess = 0.0;
    double phi_periodicity = 0.0;
    constexpr int kPhases = 16;
    for (const auto& x : probes) {
      double max_f = 0.0;
      std::vector<double> shifts;
      for (int k = 0; k < kPhases; ++k) {
        const double theta = problem.period * (k + 0.5) / kPhases;
        max_f = std::max(max_f, antiderivative(problem, theta, x).norm());
        const StateVector p = phi(problem, theta, x);
        shifts.push_back((p - x).norm());
        phi_periodicity =
            std::max(phi_periodicity,
                     (phi(problem, theta + problem.period, x) - p).cwiseAbs().maxCoeff());
      }
      for (double s : shifts) excess = std::max(excess, s - problem.epsilon * max_f);
    }
    add(name, "phi-near-identity-excess", excess, -std::numeric_limits<double>::infinity(), 1e-12);
    add(name, "phi-periodicity", phi_periodicity, 0.0, 1e-8);
  }

  const SelfTest self = gbm_self_test(config.seed, config.samples, 1000, config.threads);
  add("gbm", "estimator-weak-slope-em", self.weak.slope, 0.8, 1.2);
  add("gbm", "estimator-strong-slope-em", self.strong.slope, 0.4, 0.6);
  return result;
}

}  // namespace oscsde
