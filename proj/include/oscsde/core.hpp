#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace oscsde {

/// A point in R^d.
using StateVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Second-derivative tensor of a map R^d -> R^d: entry i is the d x d Hessian
/// of output component i.
using Tensor3 = std::vector<Matrix>;

using DriftFn = std::function<StateVector(double theta, const StateVector& x)>;
using StateFn = std::function<StateVector(const StateVector& x)>;
using JacobianFn = std::function<Matrix(double theta, const StateVector& x)>;
using HessianFn = std::function<Tensor3(double theta, const StateVector& x)>;

/// Rejected input: dimension mismatch, bad grid, bad configuration.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A state left the finite range during time stepping.
class NumericalBlowUp : public std::runtime_error {
 public:
  NumericalBlowUp(const std::string& what, std::size_t step, double time,
                  std::size_t path = kNoPath);

  static constexpr std::size_t kNoPath = static_cast<std::size_t>(-1);

  std::size_t step() const noexcept { return step_; }
  double time() const noexcept { return time_; }
  std::size_t path() const noexcept { return path_; }

  NumericalBlowUp with_path(std::size_t path) const;

 private:
  std::size_t step_;
  double time_;
  std::size_t path_;
};

/// Components with magnitude above this abort a path.
inline constexpr double kBlowUpThreshold = 1e12;

/// Integration rule used by the numerical fallbacks for the averaged drift
/// and the antiderivative. The node count must be a power of two, at least 8.
class QuadratureRule {
 public:
  enum class Kind { trapezoid_periodic };

  QuadratureRule() = default;
  explicit QuadratureRule(std::size_t node_count);

  std::size_t node_count() const noexcept { return node_count_; }
  Kind kind() const noexcept { return Kind::trapezoid_periodic; }

 private:
  std::size_t node_count_ = 1024;
};

/// Description of dX = f_{t/eps}(X) dt + sigma(X) dW with a single Wiener
/// process and a drift that is `period`-periodic in theta.
///
/// `drift` and `diffusion` are mandatory. The analytic members
/// (`averaged_drift`, `antiderivative`, `antiderivative_jacobian`,
/// `antiderivative_hessian`) may be left empty, in which case the toolkit
/// falls back to quadrature and finite differences. `drift_theta_derivative`
/// is only read by diagnostics.
struct OscillatoryProblem {
  std::string name;
  std::size_t dimension = 1;
  double epsilon = 1.0;
  double period = 1.0;

  DriftFn drift;
  DriftFn drift_theta_derivative;
  StateFn diffusion;

  StateFn averaged_drift;
  DriftFn antiderivative;
  JacobianFn antiderivative_jacobian;
  HessianFn antiderivative_hessian;

  QuadratureRule quadrature;

  /// Throws InvalidInput unless the fields describe a usable problem.
  void check() const;
  /// Throws InvalidInput when x does not have the problem dimension.
  void check_dimension(const StateVector& x) const;
};

/// The pair evolved by the micro-macro scheme: macro is the averaged
/// variable, micro the defect with respect to the change of variable.
struct MicroMacroState {
  StateVector macro;
  StateVector micro;

  /// Initial condition: macro = x0, micro = 0.
  static MicroMacroState initial(const StateVector& x0);
};

/// True when every component is finite and below kBlowUpThreshold.
bool is_admissible(const StateVector& x) noexcept;

/// Throws NumericalBlowUp when x is not admissible.
void require_admissible(const StateVector& x, std::size_t step, double time);

/// Builds a StateVector from a brace list; convenience for callers and tests.
StateVector make_state(std::initializer_list<double> values);

std::string to_string(const StateVector& x);

}  // namespace oscsde
