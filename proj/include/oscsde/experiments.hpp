#pragma once

#include "oscsde/montecarlo.hpp"
#include "oscsde/problems.hpp"
#include "oscsde/schemes.hpp"
#include "oscsde/validation.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace oscsde {

enum class ExperimentKind { weak_conv, strong_conv, resonance, validate, sweep };
enum class OutputFormat { csv, json };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment(std::string_view name);
std::string_view to_string(OutputFormat format);
OutputFormat parse_format(std::string_view name);

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::weak_conv;
  std::string problem;
  std::vector<Scheme> schemes;
  std::vector<double> steps;
  std::vector<double> epsilons;
  std::size_t samples = 0;
  double final_time = 1.0;
  std::uint64_t seed = 1;
  std::string output_path;  // empty: stdout
  OutputFormat format = OutputFormat::csv;
  unsigned threads = 1;

  /// Weak errors: "x1" (first component) or "sum" (sum of components).
  std::string test_function = "x1";
  /// Fine reference grid = finest step / refinement.
  std::size_t reference_refinement = 64;
  /// Multiplies the catalog noise scale; 0 gives the deterministic problem.
  double noise_factor = 1.0;
  /// Validate only: declared period multiplied by this factor.
  double period_scale = 1.0;

  /// Default grids, sample counts and horizons for each experiment.
  static ExperimentConfig defaults(ExperimentKind kind);

  /// Flat (key, value) listing of every field, in a fixed order.
  std::vector<std::pair<std::string, std::string>> describe() const;
};

/// Fitted order for one (scheme, epsilon) group.
struct GroupFit {
  Scheme scheme;
  double epsilon;
  std::optional<OrderFit> fit;
};

struct TableResult {
  ExperimentConfig config;
  ErrorTable table;
  std::vector<GroupFit> fits;

  const GroupFit* fit_for(Scheme scheme, double epsilon) const;
};

/// Weak convergence: per-epsilon weak errors of each scheme over the step
/// list, fine integral reference (analytic for gbm), fitted orders.
TableResult run_weak_conv(const ExperimentConfig& config);

/// Strong convergence, same layout.
TableResult run_strong_conv(const ExperimentConfig& config);

/// E|Y(T)| of the micro-macro scheme for each epsilon at the first step
/// size, with the log-log slope against epsilon.
TableResult run_sweep(const ExperimentConfig& config);

struct SampledPath {
  std::string scheme;
  std::uint64_t sample = 0;
  std::vector<double> times;
  std::vector<StateVector> states;
};

struct ResonanceRun {
  std::uint64_t sample = 0;
  double em_error = 0.0;
  double micro_macro_error = 0.0;
  bool em_diverged = false;
  bool micro_macro_diverged = false;
};

struct ResonanceResult {
  ExperimentConfig config;
  double step = 0.0;
  std::size_t step_count = 0;
  double final_time = 0.0;
  std::vector<ResonanceRun> runs;
  /// Paths of the first sample: reference, em, micro-macro.
  std::vector<SampledPath> paths;
  double median_em_error = 0.0;
  double median_micro_macro_error = 0.0;
};

/// Resonant-step demo on a single epsilon: EM and micro-macro against a fine
/// integral reference on a shared Brownian path, one run per sample. The
/// step is the first entry of `steps`; the horizon is the largest multiple
/// of it not exceeding `final_time`. A diverged scheme gets error +inf.
ResonanceResult run_resonance(const ExperimentConfig& config);

/// Resonant step fraction * 2 pi eps used by the resonance defaults.
double resonant_step(double epsilon, double fraction = 0.99);

/// One diagnostic: `value` must lie in [lower, upper].
struct ValidationEntry {
  std::string problem;
  std::string check;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool pass = false;
};

struct ValidationResult {
  ExperimentConfig config;
  std::vector<ValidationEntry> entries;
  bool passes() const;
};

/// validate_problem over the catalog (or the single problem named in the
/// config) on 100 fixed random probes in [-2, 2]^d, the near-identity bound
/// of Phi, and the GBM estimator self-tests.
ValidationResult run_validate(const ExperimentConfig& config);

/// Deterministic probe points in [-2, 2]^d.
std::vector<StateVector> probe_points(std::size_t dimension, std::size_t count, std::uint64_t seed);

/// Test function by name: "x1" or "sum".
TestFunction make_test_function(std::string_view name);

/// Result of the GBM estimator self-test.
struct SelfTest {
  OrderFit weak;
  OrderFit strong;
};

/// EM on gbm (mu = 0.5, x0 = 1, T = 1) against the exact solution: weak
/// errors (lambda = 1, common random numbers) over h = 2^-3..2^-7 and strong
/// errors (lambda = 0.5) over h = 2^-4..2^-8.
SelfTest gbm_self_test(std::uint64_t seed, std::size_t weak_samples, std::size_t strong_samples,
                       unsigned threads = 1);

}  // namespace oscsde
