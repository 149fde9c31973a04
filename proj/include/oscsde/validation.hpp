#pragma once

#include "oscsde/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace oscsde {

struct ValidationTolerances {
  double periodicity = 1e-12;
  double antiderivative_origin = 0.0;
  double antiderivative_closure = 1e-8;
  double averaged_drift = 1e-9;
  double antiderivative = 1e-9;
  double jacobian = 1e-6;
  double hessian = 1e-5;
};

/// Measured violations of the testable consequences of the problem's
/// assumptions, maximized over the probe points. Consistency entries are
/// empty when the corresponding analytic member is not supplied.
struct ValidationReport {
  double periodicity = 0.0;
  double antiderivative_origin = 0.0;
  double antiderivative_closure = 0.0;
  std::optional<double> averaged_drift_mismatch;
  std::optional<double> antiderivative_mismatch;
  std::optional<double> jacobian_mismatch;
  std::optional<double> hessian_mismatch;

  struct Line {
    std::string check;
    double value;
    double tolerance;
    bool pass;
  };
  std::vector<Line> lines(const ValidationTolerances& tol = {}) const;
  bool passes(const ValidationTolerances& tol = {}) const;
};

/// Checks the problem at each probe point: drift periodicity on 16 phases
/// per period, F_0 = 0, F_P = 0, and analytic-vs-fallback agreement for
/// <f>, F, F' and F'' on 8 phases per period.
ValidationReport validate_problem(const OscillatoryProblem& problem,
                                  const std::vector<StateVector>& probe_points);

}  // namespace oscsde
