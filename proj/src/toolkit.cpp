#include "oscsde/toolkit.hpp"

#include <cmath>
#include <limits>

namespace oscsde {

namespace {

StateVector checked_drift(const OscillatoryProblem& problem, double theta, const StateVector& x) {
  StateVector v = problem.drift(theta, x);
  if (!v.allFinite()) {
    throw NumericalBlowUp("non-finite drift evaluation at theta=" + std::to_string(theta) +
                              ", x=" + to_string(x),
                          0, theta);
  }
  return v;
}

StateVector resolved_antiderivative(const OscillatoryProblem& problem, double theta,
                                    const StateVector& x, const QuadratureRule& rule) {
  if (problem.antiderivative) return problem.antiderivative(theta, x);
  return antiderivative_fallback(problem, theta, x, rule);
}

}  // namespace

double reduce_phase(double theta, double period) {
  double r = std::fmod(theta, period);
  if (r < 0.0) r += period;
  // fmod of a negative value can round up to exactly `period`.
  if (r >= period) r = 0.0;
  return r;
}

// Mean of f(theta, x) - f(0, x) over one period. Working relative to f(0, x)
// keeps theta-independent drifts exactly at zero.
static StateVector mean_deviation(const OscillatoryProblem& problem, const StateVector& x,
                                  const StateVector& base, const QuadratureRule& rule) {
  const std::size_t n = rule.node_count();
  StateVector sum = StateVector::Zero(x.size());
  for (std::size_t k = 1; k < n; ++k) {
    const double theta = problem.period * static_cast<double>(k) / static_cast<double>(n);
    sum += checked_drift(problem, theta, x) - base;
  }
  return sum / static_cast<double>(n);
}

StateVector averaged_drift_fallback(const OscillatoryProblem& problem, const StateVector& x,
                                    const QuadratureRule& rule) {
  problem.check_dimension(x);
  const StateVector base = checked_drift(problem, 0.0, x);
  return base + mean_deviation(problem, x, base, rule);
}

StateVector antiderivative_fallback(const OscillatoryProblem& problem, double theta,
                                    const StateVector& x, const QuadratureRule& rule) {
  problem.check_dimension(x);
  if (!std::isfinite(theta)) throw InvalidInput("antiderivative: theta must be finite");
  const double r = reduce_phase(theta, problem.period);
  if (r == 0.0) return StateVector::Zero(x.size());

  const std::size_t n = rule.node_count();
  const StateVector base = checked_drift(problem, 0.0, x);
  std::vector<StateVector> values;
  values.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    values.push_back(
        checked_drift(problem, r * static_cast<double>(k) / static_cast<double>(n), x) - base);
  }

  // Romberg table; row j uses 2^j panels.
  int levels = 0;
  while ((std::size_t{1} << levels) < n) ++levels;
  std::vector<StateVector> previous;
  std::vector<StateVector> current;
  for (int j = 0; j <= levels; ++j) {
    const std::size_t panels = std::size_t{1} << j;
    const std::size_t stride = n / panels;
    StateVector trap = 0.5 * (values.front() + values.back());
    for (std::size_t k = stride; k < n; k += stride) trap += values[k];
    trap *= r / static_cast<double>(panels);

    current.assign(1, trap);
    double factor = 1.0;
    for (int m = 1; m <= j; ++m) {
      factor *= 4.0;
      current.push_back(current[m - 1] + (current[m - 1] - previous[m - 1]) / (factor - 1.0));
    }
    previous.swap(current);
  }
  return previous.back() - r * mean_deviation(problem, x, base, rule);
}

Matrix antiderivative_jacobian_fallback(const OscillatoryProblem& problem, double theta,
                                        const StateVector& x, const QuadratureRule& rule) {
  problem.check_dimension(x);
  const auto d = x.size();
  const double scale = std::cbrt(std::numeric_limits<double>::epsilon());
  Matrix jac(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double delta = scale * (1.0 + std::abs(x[j]));
    StateVector plus = x;
    StateVector minus = x;
    plus[j] += delta;
    minus[j] -= delta;
    // Use the actually representable step.
    const double step = plus[j] - minus[j];
    jac.col(j) = (resolved_antiderivative(problem, theta, plus, rule) -
                  resolved_antiderivative(problem, theta, minus, rule)) /
                 step;
  }
  return jac;
}

Tensor3 antiderivative_hessian_fallback(const OscillatoryProblem& problem, double theta,
                                        const StateVector& x, const QuadratureRule& rule) {
  problem.check_dimension(x);
  const auto d = x.size();
  const double scale = std::sqrt(std::sqrt(std::numeric_limits<double>::epsilon()));
  std::vector<double> delta(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) delta[j] = scale * (1.0 + std::abs(x[j]));

  auto at = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    StateVector y = x;
    y[i] += si * delta[i];
    y[j] += sj * delta[j];
    return resolved_antiderivative(problem, theta, y, rule);
  };

  Tensor3 hess(static_cast<std::size_t>(d), Matrix::Zero(d, d));
  const StateVector center = resolved_antiderivative(problem, theta, x, rule);
  for (Eigen::Index i = 0; i < d; ++i) {
    const StateVector second =
        (at(i, 1.0, i, 0.0) - 2.0 * center + at(i, -1.0, i, 0.0)) / (delta[i] * delta[i]);
    for (Eigen::Index c = 0; c < d; ++c) hess[c](i, i) = second[c];
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const StateVector mixed =
          (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) + at(i, -1.0, j, -1.0)) /
          (4.0 * delta[i] * delta[j]);
      for (Eigen::Index c = 0; c < d; ++c) {
        hess[c](i, j) = mixed[c];
        hess[c](j, i) = mixed[c];
      }
    }
  }
  return hess;
}

StateVector averaged_drift(const OscillatoryProblem& problem, const StateVector& x) {
  problem.check_dimension(x);
  if (problem.averaged_drift) return problem.averaged_drift(x);
  return averaged_drift_fallback(problem, x, problem.quadrature);
}

StateVector antiderivative(const OscillatoryProblem& problem, double theta, const StateVector& x) {
  problem.check_dimension(x);
  return resolved_antiderivative(problem, theta, x, problem.quadrature);
}

Matrix antiderivative_jacobian(const OscillatoryProblem& problem, double theta,
                               const StateVector& x) {
  problem.check_dimension(x);
  if (problem.antiderivative_jacobian) return problem.antiderivative_jacobian(theta, x);
  return antiderivative_jacobian_fallback(problem, theta, x, problem.quadrature);
}

Tensor3 antiderivative_hessian(const OscillatoryProblem& problem, double theta,
                               const StateVector& x) {
  problem.check_dimension(x);
  if (problem.antiderivative_hessian) return problem.antiderivative_hessian(theta, x);
  return antiderivative_hessian_fallback(problem, theta, x, problem.quadrature);
}

StateVector phi(const OscillatoryProblem& problem, double theta, const StateVector& x) {
  return x + problem.epsilon * antiderivative(problem, theta, x);
}

StateVector contract(const Tensor3& hessian, const StateVector& u, const StateVector& v) {
  StateVector out(static_cast<Eigen::Index>(hessian.size()));
  for (std::size_t i = 0; i < hessian.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = u.dot(hessian[i] * v);
  }
  return out;
}

}  // namespace oscsde
