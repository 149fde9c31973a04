#include "oscsde/schemes.hpp"

#include "oscsde/toolkit.hpp"

#include <cmath>

namespace oscsde {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::euler_maruyama: return "em";
    case Scheme::integral: return "integral";
    case Scheme::micro_macro: return "micro-macro";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "em") return Scheme::euler_maruyama;
  if (name == "integral") return Scheme::integral;
  if (name == "micro-macro") return Scheme::micro_macro;
  throw InvalidInput("unknown scheme '" + std::string(name) + "'");
}

TimeGrid::TimeGrid(double t0, double final_time, std::size_t step_count)
    : t0_(t0), final_time_(final_time), step_count_(step_count) {
  if (!std::isfinite(t0) || !std::isfinite(final_time)) {
    throw InvalidInput("TimeGrid: need finite t0 and T");
  }
  // The only grid without steps is the single point t0 = T.
  if (step_count == 0) {
    if (final_time != t0) throw InvalidInput("TimeGrid: step count must be positive");
    step_ = 0.0;
    return;
  }
  if (!(final_time > t0)) throw InvalidInput("TimeGrid: need t0 < T");
  step_ = (final_time - t0) / static_cast<double>(step_count);
}

double TimeGrid::time(std::size_t n) const noexcept {
  if (n >= step_count_) return final_time_;
  return t0_ + static_cast<double>(n) * step_;
}

TimeGrid TimeGrid::refined(std::size_t ratio) const {
  return TimeGrid(t0_, final_time_, step_count_ * ratio);
}

namespace {

void check_step(double h, double noise) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("step size must be positive");
  if (!std::isfinite(noise)) throw InvalidInput("Brownian increment must be finite");
}

// A single step does not know its index; simulate_path adds it.
void check_state(const StateVector& x, double t) {
  if (is_admissible(x)) return;
  throw NumericalBlowUp("state " + to_string(x) + " at t=" + std::to_string(t), 0, t);
}

}  // namespace

StateVector step_euler_maruyama(const OscillatoryProblem& problem, const StateVector& x, double t_n,
                                double h, double dW) {
  check_step(h, dW);
  problem.check_dimension(x);
  StateVector next = x + h * problem.drift(t_n / problem.epsilon, x) + problem.diffusion(x) * dW;
  check_state(next, t_n + h);
  return next;
}

StateVector step_integral(const OscillatoryProblem& problem, const StateVector& x, double t_n,
                          double h, double dW) {
  check_step(h, dW);
  problem.check_dimension(x);
  const double eps = problem.epsilon;
  const double theta_n = t_n / eps;
  const double theta_next = (t_n + h) / eps;
  StateVector next =
      x + h * averaged_drift(problem, x) +
      eps * (antiderivative(problem, theta_next, x) - antiderivative(problem, theta_n, x)) +
      problem.diffusion(x) * dW;
  check_state(next, t_n + h);
  return next;
}

MicroMacroState step_micro_macro_increment(const OscillatoryProblem& problem,
                                           const MicroMacroState& state, double t_n, double h,
                                           double dW) {
  check_step(h, dW);
  problem.check_dimension(state.macro);
  problem.check_dimension(state.micro);

  const double eps = problem.epsilon;
  const double theta = t_n / eps;
  const StateVector& macro = state.macro;
  const StateVector& micro = state.micro;

  const StateVector avg = averaged_drift(problem, macro);
  const StateVector sigma = problem.diffusion(macro);
  const Matrix jac = antiderivative_jacobian(problem, theta, macro);
  const StateVector shifted = macro + eps * antiderivative(problem, theta, macro) + micro;

  MicroMacroState next;
  next.macro = macro + h * avg + sigma * dW;

  const StateVector drift_defect = problem.drift(theta, shifted) - problem.drift(theta, macro);
  const StateVector correction =
      jac * avg + 0.5 * contract(antiderivative_hessian(problem, theta, macro), sigma, sigma);
  const StateVector noise_defect = problem.diffusion(shifted) - sigma - eps * (jac * sigma);
  next.micro = micro + h * drift_defect - eps * h * correction + noise_defect * dW;
  check_state(next.macro, t_n + h);
  check_state(next.micro, t_n + h);
  return next;
}

MicroMacroState step_micro_macro(const OscillatoryProblem& problem, const MicroMacroState& state,
                                 double t_n, double h, double xi) {
  return step_micro_macro_increment(problem, state, t_n, h, std::sqrt(h) * xi);
}

StateVector recombine(const OscillatoryProblem& problem, const MicroMacroState& state, double t_n) {
  return phi(problem, t_n / problem.epsilon, state.macro) + state.micro;
}

namespace {

void check_path_inputs(const OscillatoryProblem& problem, const TimeGrid& grid,
                       std::span<const double> increments, const StateVector& x0) {
  problem.check();
  problem.check_dimension(x0);
  if (increments.size() != grid.step_count()) {
    throw InvalidInput("simulate: expected " + std::to_string(grid.step_count()) +
                       " increments, got " + std::to_string(increments.size()));
  }
}

// Steps report blow-ups without knowing their index.
template <class Step>
auto indexed(std::size_t n, double t, Step&& step) {
  try {
    return step();
  } catch (const NumericalBlowUp& e) {
    throw NumericalBlowUp("numerical blow-up at step " + std::to_string(n) + ": " + e.what(), n, t);
  }
}

// Visits X_0..X_N; `visit(n, x)`.
template <class Visitor>
void integrate(const OscillatoryProblem& problem, Scheme scheme, const TimeGrid& grid,
               std::span<const double> increments, const StateVector& x0, Visitor&& visit) {
  check_path_inputs(problem, grid, increments, x0);
  const double h = grid.step();
  const std::size_t steps = grid.step_count();
  visit(std::size_t{0}, x0);

  if (scheme == Scheme::micro_macro) {
    MicroMacroState state = MicroMacroState::initial(x0);
    for (std::size_t n = 0; n < steps; ++n) {
      state = indexed(n + 1, grid.time(n + 1), [&] {
        return step_micro_macro_increment(problem, state, grid.time(n), h, increments[n]);
      });
      visit(n + 1, recombine(problem, state, grid.time(n + 1)));
    }
    return;
  }

  StateVector x = x0;
  for (std::size_t n = 0; n < steps; ++n) {
    x = indexed(n + 1, grid.time(n + 1), [&] {
      return scheme == Scheme::integral
                 ? step_integral(problem, x, grid.time(n), h, increments[n])
                 : step_euler_maruyama(problem, x, grid.time(n), h, increments[n]);
    });
    visit(n + 1, x);
  }
}

}  // namespace

std::vector<StateVector> simulate_path(const OscillatoryProblem& problem, Scheme scheme,
                                       const TimeGrid& grid, std::span<const double> increments,
                                       const StateVector& x0) {
  std::vector<StateVector> path;
  path.reserve(grid.step_count() + 1);
  integrate(problem, scheme, grid, increments, x0,
            [&](std::size_t, const StateVector& x) { path.push_back(x); });
  return path;
}

StateVector simulate_endpoint(const OscillatoryProblem& problem, Scheme scheme,
                              const TimeGrid& grid, std::span<const double> increments,
                              const StateVector& x0) {
  if (scheme == Scheme::micro_macro) {
    return recombine(problem, simulate_micro_macro(problem, grid, increments, x0),
                     grid.final_time());
  }
  StateVector last;
  integrate(problem, scheme, grid, increments, x0,
            [&](std::size_t n, const StateVector& x) {
              if (n == grid.step_count()) last = x;
            });
  return last;
}

MicroMacroState simulate_micro_macro(const OscillatoryProblem& problem, const TimeGrid& grid,
                                     std::span<const double> increments, const StateVector& x0) {
  check_path_inputs(problem, grid, increments, x0);
  const double h = grid.step();
  MicroMacroState state = MicroMacroState::initial(x0);
  for (std::size_t n = 0; n < grid.step_count(); ++n) {
    state = indexed(n + 1, grid.time(n + 1), [&] {
      return step_micro_macro_increment(problem, state, grid.time(n), h, increments[n]);
    });
  }
  return state;
}

}  // namespace oscsde
