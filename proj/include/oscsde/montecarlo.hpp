#pragma once

#include "oscsde/core.hpp"
#include "oscsde/rng.hpp"
#include "oscsde/schemes.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace oscsde {

/// Wiener increments on a fine uniform grid.
///
/// Sampled increments are rounded to a dyadic lattice fine enough that every
/// partial sum of the grid is exactly representable, so any coarsening is
/// the exact restriction of the same Brownian path regardless of summation
/// order. The rounding is below 2^-40 for the grids used here.
class BrownianGrid {
 public:
  BrownianGrid(double fine_step, std::vector<double> increments);

  /// `count` increments sqrt(fine_step) * xi drawn from `stream`.
  static BrownianGrid sample(RngStream& stream, double fine_step, std::size_t count);

  double fine_step() const noexcept { return fine_step_; }
  std::size_t size() const noexcept { return increments_.size(); }
  std::span<const double> fine_increments() const noexcept { return increments_; }

  /// Increments of the grid with `ratio` times the step: entry j is the
  /// (compensated) sum of fine increments j*ratio .. j*ratio + ratio - 1.
  std::vector<double> coarsen(std::size_t ratio) const;

  /// W(T) - W(t0).
  double total() const;

 private:
  double fine_step_;
  std::vector<double> increments_;
};

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

/// Monte Carlo error with a 95% confidence half-width.
struct ErrorEstimate {
  double value = 0.0;
  double half_width = 0.0;
  std::size_t sample_count = 0;

  /// False when the interval reaches below zero, i.e. the estimate cannot be
  /// told apart from Monte Carlo noise.
  bool significant() const noexcept { return half_width < value; }
};

using TestFunction = std::function<double(const StateVector&)>;

/// Integral scheme on a grid `refinement` times finer than the finest tested
/// step, driven by the same Brownian path.
struct FineReference {
  std::size_t refinement = 64;
};
/// Known value of E phi(X(T)); weak errors only.
struct AnalyticMoment {
  double value = 0.0;
};
/// Exact pathwise solution X(T) as a function of (T, W(T)).
struct ExactSolution {
  std::function<StateVector(double t, double w)> solve;
};
using Reference = std::variant<FineReference, AnalyticMoment, ExactSolution>;

enum class ErrorKind { weak, strong };

struct StudyConfig {
  ErrorKind kind = ErrorKind::weak;
  std::vector<Scheme> schemes;
  /// Tested step sizes. Each must divide [t0, T] and be a power-of-two
  /// multiple of the smallest one.
  std::vector<double> steps;
  double t0 = 0.0;
  double final_time = 1.0;
  StateVector initial_state;
  std::size_t samples = 1000;
  /// Weak errors only.
  TestFunction test_function;
  Reference reference = FineReference{};
  std::uint64_t seed = 0;
  /// Worker threads; results do not depend on it.
  unsigned threads = 1;
};

struct ErrorRow {
  Scheme scheme = Scheme::euler_maruyama;
  double epsilon = 1.0;
  double h = 0.0;
  ErrorEstimate estimate;
  /// Key of the Gaussian streams that drove this row.
  std::uint64_t stream_key = 0;
};

struct ErrorTable {
  std::vector<ErrorRow> rows;

  /// (h, error) pairs of one (scheme, epsilon) group, in row order.
  std::vector<std::pair<double, double>> series(Scheme scheme, double epsilon) const;
};

/// Runs every (scheme, h) pair of `config` on one problem. Sample i uses
/// RngStream(stream_key, i) for its fine Brownian grid; every scheme, step
/// size and the reference consume that same path.
ErrorTable run_study(const OscillatoryProblem& problem, const StudyConfig& config,
                     std::uint64_t stream_key);

/// |mean phi(X_N^scheme) - mean phi(X_N^ref)| with common random numbers.
/// Fine references need a refinement that is a power of two >= 16.
ErrorEstimate weak_error(const OscillatoryProblem& problem, Scheme scheme,
                         const TestFunction& test_function, const TimeGrid& grid,
                         std::size_t samples, const Reference& reference, std::uint64_t seed,
                         const StateVector& x0, unsigned threads = 1);

/// sqrt(mean |X_N^scheme - X_N^ref|^2) against the integral scheme on the
/// grid refined by `reference_refinement` (a power of two), same Brownian path.
ErrorEstimate strong_error(const OscillatoryProblem& problem, Scheme scheme, const TimeGrid& grid,
                           std::size_t samples, std::size_t reference_refinement,
                           std::uint64_t seed, const StateVector& x0, unsigned threads = 1);

/// Strong error against an arbitrary reference (fine-step or exact).
ErrorEstimate strong_error(const OscillatoryProblem& problem, Scheme scheme, const TimeGrid& grid,
                           std::size_t samples, const Reference& reference, std::uint64_t seed,
                           const StateVector& x0, unsigned threads = 1);

enum class SeedPolicy {
  /// Stream key derive_seed(seed, j) for the j-th epsilon.
  independent_per_epsilon,
  /// Every epsilon reuses derive_seed(seed, 0), i.e. identical Brownian paths.
  shared_across_epsilon,
};

using ProblemFactory = std::function<OscillatoryProblem(double epsilon)>;

/// run_study for every epsilon; rows are appended in epsilon order.
ErrorTable epsilon_sweep(const ProblemFactory& factory, std::span<const double> epsilons,
                         const StudyConfig& config,
                         SeedPolicy policy = SeedPolicy::independent_per_epsilon);

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Largest |log(error) - fitted line| over the points.
  double max_residual = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log(error) against log(h). Needs at least three
/// points with positive errors and at least two distinct step sizes.
OrderFit estimate_order(std::span<const std::pair<double, double>> points);

/// Fit for one group, or nothing when the group cannot be fitted (fewer than
/// three points or a zero error).
std::optional<OrderFit> try_estimate_order(std::span<const std::pair<double, double>> points);

/// Mean of |Y_N| (Euclidean norm of the micro variable) for the micro-macro
/// scheme, with a 95% half-width.
ErrorEstimate micro_variable_magnitude(const OscillatoryProblem& problem, const TimeGrid& grid,
                                       std::size_t samples, std::uint64_t seed,
                                       const StateVector& x0, unsigned threads = 1);

/// Calls body(i) for i in [0, count) on up to `threads` workers. Exceptions
/// are collected and the one from the lowest index is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace oscsde
