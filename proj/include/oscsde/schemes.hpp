#pragma once

#include "oscsde/core.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oscsde {

enum class Scheme { euler_maruyama, integral, micro_macro };

std::string_view to_string(Scheme scheme);
/// Accepts "em", "integral", "micro-macro".
Scheme parse_scheme(std::string_view name);

/// Uniform grid t_n = t0 + n h, h = (T - t0) / N, with t_N = T exactly. N = 0
/// is allowed only for the single-point grid t0 = T.
class TimeGrid {
 public:
  TimeGrid(double t0, double final_time, std::size_t step_count);

  double t0() const noexcept { return t0_; }
  double final_time() const noexcept { return final_time_; }
  std::size_t step_count() const noexcept { return step_count_; }
  double step() const noexcept { return step_; }
  double time(std::size_t n) const noexcept;

  /// Same interval with N * ratio steps.
  TimeGrid refined(std::size_t ratio) const;

 private:
  double t0_;
  double final_time_;
  std::size_t step_count_;
  double step_;
};

/// x + h f_{t_n/eps}(x) + sigma(x) dW.
StateVector step_euler_maruyama(const OscillatoryProblem& problem, const StateVector& x, double t_n,
                                double h, double dW);

/// x + h <f>(x) + eps (F_{t_{n+1}/eps}(x) - F_{t_n/eps}(x)) + sigma(x) dW.
StateVector step_integral(const OscillatoryProblem& problem, const StateVector& x, double t_n,
                          double h, double dW);

/// Euler-Maruyama step of the micro-macro system driven by xi ~ N(0, 1).
/// All coefficients are evaluated at the old (macro, micro) and at
/// theta_n = t_n / eps.
MicroMacroState step_micro_macro(const OscillatoryProblem& problem, const MicroMacroState& state,
                                 double t_n, double h, double xi);

/// Same step with the Brownian increment dW = sqrt(h) xi supplied directly.
MicroMacroState step_micro_macro_increment(const OscillatoryProblem& problem,
                                           const MicroMacroState& state, double t_n, double h,
                                           double dW);

/// Phi_{t_n/eps}(macro) + micro.
StateVector recombine(const OscillatoryProblem& problem, const MicroMacroState& state, double t_n);

/// Runs `scheme` over `grid` with Brownian increments dW_n (length N) and
/// returns the N + 1 states X_0..X_N; micro-macro output is recombined at
/// every node. A blow-up is reported with the failing step index.
std::vector<StateVector> simulate_path(const OscillatoryProblem& problem, Scheme scheme,
                                       const TimeGrid& grid, std::span<const double> increments,
                                       const StateVector& x0);

/// X_N only, without storing the path.
StateVector simulate_endpoint(const OscillatoryProblem& problem, Scheme scheme,
                              const TimeGrid& grid, std::span<const double> increments,
                              const StateVector& x0);

/// Final (macro, micro) pair of the micro-macro scheme, not recombined.
MicroMacroState simulate_micro_macro(const OscillatoryProblem& problem, const TimeGrid& grid,
                                     std::span<const double> increments, const StateVector& x0);

}  // namespace oscsde
