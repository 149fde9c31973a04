#pragma once

#include "oscsde/core.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace oscsde {

/// Shape of sigma for the Henon-Heiles problem, scaled by `noise_scale`.
enum class NoiseKind {
  none,
  multiplicative,  ///< scale * (0, 0, X1, X2)
  proportional,    ///< scale * X
  additive,        ///< scale * (0, 0, 1, 1)
};

std::string_view to_string(NoiseKind kind);

/// Henon-Heiles drift in the filtered variables, period 2 pi, with
/// closed-form <f>, F, F' and F''.
OscillatoryProblem henon_heiles(double epsilon, NoiseKind noise_kind, double noise_scale);

/// dX = (X(1 - X) + sin(t/eps)) dt + 0.2 X dW, period 2 pi.
OscillatoryProblem logistic(double epsilon, double noise_scale = 0.2);

/// dX = lambda X dt + mu X dW; theta-independent, so F = 0.
OscillatoryProblem geometric_brownian(double lambda, double mu);

/// Exact pathwise GBM solution x0 exp((lambda - mu^2/2) t + mu W(t)).
double geometric_brownian_solution(double lambda, double mu, double x0, double t, double w);

/// f_theta(x) = sin(2 pi theta), period 1, sigma = 0.
OscillatoryProblem pure_oscillation(double epsilon);

/// Exact solution of the pure oscillation problem from x0 = 0 at time t:
/// eps (1 - cos(2 pi t / eps)) / (2 pi).
double pure_oscillation_solution(double epsilon, double t);

/// Catalog metadata.
struct ProblemSpec {
  std::string name;
  std::size_t dimension = 1;
  double epsilon = 1.0;
  double period = 1.0;
  StateVector initial_state;
  NoiseKind noise_kind = NoiseKind::none;
  std::map<std::string, double> parameters;
};

struct CatalogEntry {
  ProblemSpec spec;
  OscillatoryProblem problem;
};

/// Names accepted by make_catalog_problem.
const std::vector<std::string>& catalog_names();

/// Builds a named catalog problem:
///   henon-heiles-mult-weak    sigma = 0.2 (0,0,X1,X2), X0 = 0.7 * 1
///   henon-heiles-add-weak     sigma = (0,0,0.2,0.2),   X0 = 0.7 * 1
///   henon-heiles-mult-strong  sigma = 0.5 X,            X0 = 0.12 * 1
///   henon-heiles-add-strong   sigma = (0,0,0.5,0.5),   X0 = 0.12 * 1
///   logistic                  X0 = 2
///   gbm                       lambda = 1, mu = 0.5, X0 = 1 (epsilon unused)
///   pure-osc                  X0 = 0
/// `noise_factor` multiplies the catalog noise scale.
CatalogEntry make_catalog_problem(std::string_view name, double epsilon, double noise_factor = 1.0);

}  // namespace oscsde
