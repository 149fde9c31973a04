#include "oscsde/validation.hpp"

#include "oscsde/toolkit.hpp"

#include <algorithm>

namespace oscsde {

namespace {

constexpr int kPeriodicityPhases = 16;
constexpr int kConsistencyPhases = 8;

double max_abs(const StateVector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double max_abs(const Tensor3& a, const Tensor3& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, (a[i] - b[i]).cwiseAbs().maxCoeff());
  }
  return worst;
}

void raise(std::optional<double>& slot, double value) {
  slot = std::max(slot.value_or(0.0), value);
}

}  // namespace

ValidationReport validate_problem(const OscillatoryProblem& problem,
                                  const std::vector<StateVector>& probe_points) {
  problem.check();
  if (probe_points.empty()) throw InvalidInput("validate_problem: no probe points");
  for (const auto& x : probe_points) problem.check_dimension(x);

  const QuadratureRule& rule = problem.quadrature;
  const double period = problem.period;
  ValidationReport report;

  for (const auto& x : probe_points) {
    for (int k = 0; k < kPeriodicityPhases; ++k) {
      const double theta = period * k / kPeriodicityPhases;
      report.periodicity = std::max(
          report.periodicity, max_abs(problem.drift(theta + period, x) - problem.drift(theta, x)));
    }
    report.antiderivative_origin =
        std::max(report.antiderivative_origin, max_abs(antiderivative(problem, 0.0, x)));
    report.antiderivative_closure =
        std::max(report.antiderivative_closure, max_abs(antiderivative(problem, period, x)));

    if (problem.averaged_drift) {
      raise(report.averaged_drift_mismatch,
            max_abs(problem.averaged_drift(x) - averaged_drift_fallback(problem, x, rule)));
    }
    for (int k = 1; k <= kConsistencyPhases; ++k) {
      // Offset phases so the checks never sit on a node of the rule.
      const double theta = period * (k - 0.37) / kConsistencyPhases;
      if (problem.antiderivative) {
        raise(report.antiderivative_mismatch,
              max_abs(problem.antiderivative(theta, x) -
                      antiderivative_fallback(problem, theta, x, rule)));
      }
      if (problem.antiderivative_jacobian) {
        raise(report.jacobian_mismatch,
              (problem.antiderivative_jacobian(theta, x) -
               antiderivative_jacobian_fallback(problem, theta, x, rule))
                  .cwiseAbs()
                  .maxCoeff());
      }
      if (problem.antiderivative_hessian) {
        raise(report.hessian_mismatch,
              max_abs(problem.antiderivative_hessian(theta, x),
                      antiderivative_hessian_fallback(problem, theta, x, rule)));
      }
    }
  }
  return report;
}

std::vector<ValidationReport::Line> ValidationReport::lines(const ValidationTolerances& tol) const {
  std::vector<Line> out;
  auto add = [&](const std::string& name, double value, double tolerance) {
    out.push_back({name, value, tolerance, value <= tolerance});
  };
  add("drift-periodicity", periodicity, tol.periodicity);
  add("antiderivative-origin", antiderivative_origin, tol.antiderivative_origin);
  add("antiderivative-closure", antiderivative_closure, tol.antiderivative_closure);
  if (averaged_drift_mismatch) add("averaged-drift-vs-fallback", *averaged_drift_mismatch, tol.averaged_drift);
  if (antiderivative_mismatch) add("antiderivative-vs-fallback", *antiderivative_mismatch, tol.antiderivative);
  if (jacobian_mismatch) add("jacobian-vs-fallback", *jacobian_mismatch, tol.jacobian);
  if (hessian_mismatch) add("hessian-vs-fallback", *hessian_mismatch, tol.hessian);
  return out;
}

bool ValidationReport::passes(const ValidationTolerances& tol) const {
  const auto all = lines(tol);
  return std::all_of(all.begin(), all.end(), [](const Line& l) { return l.pass; });
}

}  // namespace oscsde
