#include "oscsde/montecarlo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace oscsde {

// ---------------------------------------------------------------------------
// Brownian grid

BrownianGrid::BrownianGrid(double fine_step, std::vector<double> increments)
    : fine_step_(fine_step), increments_(std::move(increments)) {
  if (!(fine_step > 0.0) || !std::isfinite(fine_step)) {
    throw InvalidInput("BrownianGrid: fine step must be positive");
  }
}

BrownianGrid BrownianGrid::sample(RngStream& stream, double fine_step, std::size_t count) {
  if (!(fine_step > 0.0) || !std::isfinite(fine_step)) {
    throw InvalidInput("BrownianGrid: fine step must be positive");
  }
  if (count == 0) throw InvalidInput("BrownianGrid: need at least one increment");

  // Box-Muller output is bounded by sqrt(-2 ln 2^-54) < 9. Choose the lattice
  // 2^-q so that count * bound * 2^q < 2^53: then all partial sums are exact.
  const double scale = std::sqrt(fine_step);
  const int magnitude_bits = static_cast<int>(std::ceil(std::log2(scale * 9.0)));
  const int count_bits = static_cast<int>(std::bit_width(count - 1));
  const int q = 52 - magnitude_bits - count_bits;

  std::vector<double> increments(count);
  for (double& dw : increments) {
    dw = std::ldexp(std::nearbyint(std::ldexp(scale * stream.next_gaussian(), q)), -q);
  }
  return BrownianGrid(fine_step, std::move(increments));
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

std::vector<double> BrownianGrid::coarsen(std::size_t ratio) const {
  if (ratio == 0 || increments_.size() % ratio != 0) {
    throw InvalidInput("coarsen: ratio " + std::to_string(ratio) + " does not divide " +
                       std::to_string(increments_.size()) + " increments");
  }
  if (ratio == 1) return increments_;
  std::vector<double> coarse(increments_.size() / ratio);
  const std::span<const double> fine(increments_);
  for (std::size_t j = 0; j < coarse.size(); ++j) {
    coarse[j] = compensated_sum(fine.subspan(j * ratio, ratio));
  }
  return coarse;
}

double BrownianGrid::total() const { return compensated_sum(increments_); }

// ---------------------------------------------------------------------------
// Parallel driver

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(threads == 0 ? 1 : threads, count));
  std::vector<std::exception_ptr> errors(count);
  auto run = [&](std::size_t worker) {
    for (std::size_t i = worker; i < count; i += workers) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// ---------------------------------------------------------------------------
// Estimators

namespace {

constexpr double kZ95 = 1.96;

struct Moments {
  double mean;
  double stddev;
};

Moments moments(std::span<const double> values) {
  const double n = static_cast<double>(values.size());
  const double mean = compensated_sum(values) / n;
  if (values.size() < 2) return {mean, 0.0};
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(),
                 [mean](double v) { return (v - mean) * (v - mean); });
  return {mean, std::sqrt(compensated_sum(sq) / (n - 1.0))};
}

ErrorEstimate weak_estimate(std::span<const double> differences) {
  const auto m = moments(differences);
  return {std::abs(m.mean), kZ95 * m.stddev / std::sqrt(static_cast<double>(differences.size())),
          differences.size()};
}

ErrorEstimate strong_estimate(std::span<const double> squared) {
  const auto m = moments(squared);
  const double hw = kZ95 * m.stddev / std::sqrt(static_cast<double>(squared.size()));
  const double upper = std::sqrt(m.mean + hw);
  const double lower = std::sqrt(std::max(0.0, m.mean - hw));
  return {std::sqrt(m.mean), 0.5 * (upper - lower), squared.size()};
}

std::size_t steps_for(double span, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("step sizes must be positive");
  const double ratio = span / h;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidInput("step " + std::to_string(h) + " does not divide the time interval");
  }
  return static_cast<std::size_t>(rounded);
}

bool is_power_of_two(std::size_t n) { return n > 0 && std::has_single_bit(n); }

}  // namespace

std::vector<std::pair<double, double>> ErrorTable::series(Scheme scheme, double epsilon) const {
  std::vector<std::pair<double, double>> out;
  for (const auto& row : rows) {
    if (row.scheme == scheme && row.epsilon == epsilon) out.emplace_back(row.h, row.estimate.value);
  }
  return out;
}

ErrorTable run_study(const OscillatoryProblem& problem, const StudyConfig& config,
                     std::uint64_t stream_key) {
  problem.check();
  problem.check_dimension(config.initial_state);
  if (config.schemes.empty()) throw InvalidInput("study: no schemes");
  if (config.steps.empty()) throw InvalidInput("study: no step sizes");
  if (config.samples == 0) throw InvalidInput("study: need at least one sample");
  if (config.kind == ErrorKind::weak && !config.test_function) {
    throw InvalidInput("study: weak errors need a test function");
  }
  if (config.kind == ErrorKind::strong && std::holds_alternative<AnalyticMoment>(config.reference)) {
    throw InvalidInput("study: strong errors need a pathwise reference");
  }

  const double span = config.final_time - config.t0;
  const TimeGrid outer(config.t0, config.final_time, 1);  // validates the interval
  (void)outer;

  std::vector<std::size_t> coarse_steps;
  for (double h : config.steps) coarse_steps.push_back(steps_for(span, h));
  const std::size_t finest = *std::max_element(coarse_steps.begin(), coarse_steps.end());

  std::size_t refinement = 1;
  const auto* fine_ref = std::get_if<FineReference>(&config.reference);
  if (fine_ref) {
    if (!is_power_of_two(fine_ref->refinement)) {
      throw InvalidInput("reference refinement must be a power of two");
    }
    refinement = fine_ref->refinement;
  }
  const std::size_t fine_steps = finest * refinement;
  for (std::size_t n : coarse_steps) {
    if (fine_steps % n != 0 || !is_power_of_two(fine_steps / n)) {
      throw InvalidInput("step sizes must be power-of-two multiples of the smallest step");
    }
  }
  const TimeGrid fine_grid(config.t0, config.final_time, fine_steps);

  const std::size_t rows = config.steps.size() * config.schemes.size();
  const std::size_t samples = config.samples;
  std::vector<std::vector<double>> values(rows, std::vector<double>(samples));

  auto measure = [&](const StateVector& x, const StateVector& reference_state,
                     std::optional<double> reference_value) {
    if (config.kind == ErrorKind::strong) return (x - reference_state).squaredNorm();
    const double ref = reference_value ? *reference_value : config.test_function(reference_state);
    return config.test_function(x) - ref;
  };

  parallel_for(samples, config.threads, [&](std::size_t i) {
    try {
      RngStream stream(stream_key, i);
      const BrownianGrid brownian = BrownianGrid::sample(stream, fine_grid.step(), fine_steps);

      StateVector reference_state;
      std::optional<double> reference_value;
      if (fine_ref) {
        reference_state = simulate_endpoint(problem, Scheme::integral, fine_grid,
                                            brownian.fine_increments(), config.initial_state);
      } else if (const auto* exact = std::get_if<ExactSolution>(&config.reference)) {
        reference_state = exact->solve(config.final_time, brownian.total());
      } else {
        reference_value = std::get<AnalyticMoment>(config.reference).value;
      }

      std::size_t row = 0;
      for (std::size_t k = 0; k < coarse_steps.size(); ++k) {
        const std::vector<double> increments = brownian.coarsen(fine_steps / coarse_steps[k]);
        const TimeGrid grid(config.t0, config.final_time, coarse_steps[k]);
        for (Scheme scheme : config.schemes) {
          const StateVector x =
              simulate_endpoint(problem, scheme, grid, increments, config.initial_state);
          values[row++][i] = measure(x, reference_state, reference_value);
        }
      }
    } catch (const NumericalBlowUp& e) {
      throw e.with_path(i);
    }
  });

  ErrorTable table;
  std::size_t row = 0;
  for (double h : config.steps) {
    for (Scheme scheme : config.schemes) {
      ErrorRow out;
      out.scheme = scheme;
      out.epsilon = problem.epsilon;
      out.h = h;
      out.stream_key = stream_key;
      out.estimate = config.kind == ErrorKind::weak ? weak_estimate(values[row])
                                                    : strong_estimate(values[row]);
      table.rows.push_back(out);
      ++row;
    }
  }
  return table;
}

ErrorEstimate weak_error(const OscillatoryProblem& problem, Scheme scheme,
                         const TestFunction& test_function, const TimeGrid& grid,
                         std::size_t samples, const Reference& reference, std::uint64_t seed,
                         const StateVector& x0, unsigned threads) {
  if (const auto* fine = std::get_if<FineReference>(&reference)) {
    if (fine->refinement < 16 || !is_power_of_two(fine->refinement)) {
      throw InvalidInput("weak_error: reference refinement must be a power of two >= 16");
    }
  }
  StudyConfig config;
  config.kind = ErrorKind::weak;
  config.schemes = {scheme};
  config.steps = {grid.step()};
  config.t0 = grid.t0();
  config.final_time = grid.final_time();
  config.initial_state = x0;
  config.samples = samples;
  config.test_function = test_function;
  config.reference = reference;
  config.seed = seed;
  config.threads = threads;
  return run_study(problem, config, derive_seed(seed, 0)).rows.front().estimate;
}

ErrorEstimate strong_error(const OscillatoryProblem& problem, Scheme scheme, const TimeGrid& grid,
                           std::size_t samples, const Reference& reference, std::uint64_t seed,
                           const StateVector& x0, unsigned threads) {
  StudyConfig config;
  config.kind = ErrorKind::strong;
  config.schemes = {scheme};
  config.steps = {grid.step()};
  config.t0 = grid.t0();
  config.final_time = grid.final_time();
  config.initial_state = x0;
  config.samples = samples;
  config.reference = reference;
  config.seed = seed;
  config.threads = threads;
  return run_study(problem, config, derive_seed(seed, 0)).rows.front().estimate;
}

ErrorEstimate strong_error(const OscillatoryProblem& problem, Scheme scheme, const TimeGrid& grid,
                           std::size_t samples, std::size_t reference_refinement,
                           std::uint64_t seed, const StateVector& x0, unsigned threads) {
  return strong_error(problem, scheme, grid, samples, Reference{FineReference{reference_refinement}},
                      seed, x0, threads);
}

ErrorTable epsilon_sweep(const ProblemFactory& factory, std::span<const double> epsilons,
                         const StudyConfig& config, SeedPolicy policy) {
  if (epsilons.empty()) throw InvalidInput("epsilon_sweep: no epsilon values");
  ErrorTable table;
  for (std::size_t j = 0; j < epsilons.size(); ++j) {
    const double eps = epsilons[j];
    if (!(eps > 0.0 && eps <= 1.0)) throw InvalidInput("epsilon_sweep: epsilon must lie in (0, 1]");
    const std::uint64_t key =
        derive_seed(config.seed, policy == SeedPolicy::independent_per_epsilon ? j : 0);
    OscillatoryProblem problem = factory(eps);
    ErrorTable part = run_study(problem, config, key);
    for (auto& row : part.rows) {
      // Catalog problems that ignore epsilon still report the swept value.
      row.epsilon = eps;
      table.rows.push_back(row);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Order fits

OrderFit estimate_order(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) throw InvalidInput("estimate_order: need at least three points");
  std::vector<double> lx, ly;
  for (const auto& [h, err] : points) {
    if (!(h > 0.0)) throw InvalidInput("estimate_order: step sizes must be positive");
    if (!(err > 0.0) || !std::isfinite(err)) {
      throw InvalidInput("estimate_order: errors must be positive and finite");
    }
    lx.push_back(std::log(h));
    ly.push_back(std::log(err));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = compensated_sum(lx) / n;
  const double my = compensated_sum(ly) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx == 0.0) throw InvalidInput("estimate_order: need at least two distinct step sizes");

  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = points.size();
  for (std::size_t k = 0; k < lx.size(); ++k) {
    fit.max_residual =
        std::max(fit.max_residual, std::abs(ly[k] - (fit.intercept + fit.slope * lx[k])));
  }
  return fit;
}

std::optional<OrderFit> try_estimate_order(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) return std::nullopt;
  for (const auto& p : points) {
    if (!(p.second > 0.0) || !std::isfinite(p.second)) return std::nullopt;
  }
  return estimate_order(points);
}

// ---------------------------------------------------------------------------
// Micro variable

ErrorEstimate micro_variable_magnitude(const OscillatoryProblem& problem, const TimeGrid& grid,
                                       std::size_t samples, std::uint64_t seed,
                                       const StateVector& x0, unsigned threads) {
  if (samples == 0) throw InvalidInput("micro_variable_magnitude: need at least one sample");
  problem.check();
  problem.check_dimension(x0);
  const std::uint64_t key = derive_seed(seed, 0);
  std::vector<double> norms(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    try {
      RngStream stream(key, i);
      const BrownianGrid brownian = BrownianGrid::sample(stream, grid.step(), grid.step_count());
      norms[i] = simulate_micro_macro(problem, grid, brownian.fine_increments(), x0).micro.norm();
    } catch (const NumericalBlowUp& e) {
      throw e.with_path(i);
    }
  });
  const auto m = moments(norms);
  return {m.mean, kZ95 * m.stddev / std::sqrt(static_cast<double>(samples)), samples};
}

}  // namespace oscsde
