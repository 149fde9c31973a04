#include "oscsde/problems.hpp"

#include <cmath>
#include <numbers>

namespace oscsde {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Matrix zero_jacobian(std::size_t d) { return Matrix::Zero(d, d); }
Tensor3 zero_hessian(std::size_t d) { return Tensor3(d, Matrix::Zero(d, d)); }

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw InvalidInput("epsilon must lie in (0, 1]");
}

}  // namespace

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::multiplicative: return "multiplicative";
    case NoiseKind::proportional: return "proportional";
    case NoiseKind::additive: return "additive";
  }
  return "unknown";
}

// With c = cos(theta), s = sin(theta), u = X1 c + X3 s:
//   f1 = 2 s u X2, f2 = X4, f3 = -2 c u X2, f4 = -2 u^2 + X2^2 - X2.
// Expanding in sin(2 theta), cos(2 theta) and integrating the mean-free part
// with a = sin^2(theta), b = sin(theta) cos(theta):
//   F1 = X2 (X1 a - X3 b), F2 = 0, F3 = -X2 (X1 b + X3 a),
//   F4 = -(X1^2 - X3^2) b - 2 X1 X3 a.
OscillatoryProblem henon_heiles(double epsilon, NoiseKind noise_kind, double noise_scale) {
  require_epsilon(epsilon);
  if (noise_kind != NoiseKind::none && !(noise_scale > 0.0)) {
    throw InvalidInput("henon_heiles: noise_scale must be positive");
  }

  OscillatoryProblem p;
  p.name = "henon-heiles";
  p.dimension = 4;
  p.epsilon = epsilon;
  p.period = kTwoPi;

  p.drift = [](double theta, const StateVector& x) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const double u = x[0] * c + x[2] * s;
    StateVector f(4);
    f << 2.0 * s * u * x[1], x[3], -2.0 * c * u * x[1], -2.0 * u * u + x[1] * x[1] - x[1];
    return f;
  };
  p.drift_theta_derivative = [](double theta, const StateVector& x) {
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    StateVector df(4);
    df << 2.0 * x[1] * (x[0] * c2 + x[2] * s2), 0.0, 2.0 * x[1] * (x[0] * s2 - x[2] * c2),
        2.0 * (x[0] * x[0] - x[2] * x[2]) * s2 - 4.0 * x[0] * x[2] * c2;
    return df;
  };
  p.averaged_drift = [](const StateVector& x) {
    StateVector f(4);
    f << x[2] * x[1], x[3], -x[0] * x[1], -(x[0] * x[0] + x[2] * x[2]) + x[1] * x[1] - x[1];
    return f;
  };
  p.antiderivative = [](double theta, const StateVector& x) {
    const double s = std::sin(theta);
    const double a = s * s;
    const double b = s * std::cos(theta);
    StateVector F(4);
    F << x[1] * (x[0] * a - x[2] * b), 0.0, -x[1] * (x[0] * b + x[2] * a),
        -(x[0] * x[0] - x[2] * x[2]) * b - 2.0 * x[0] * x[2] * a;
    return F;
  };
  p.antiderivative_jacobian = [](double theta, const StateVector& x) {
    const double s = std::sin(theta);
    const double a = s * s;
    const double b = s * std::cos(theta);
    Matrix J = Matrix::Zero(4, 4);
    J.row(0) << x[1] * a, x[0] * a - x[2] * b, -x[1] * b, 0.0;
    J.row(2) << -x[1] * b, -(x[0] * b + x[2] * a), -x[1] * a, 0.0;
    J.row(3) << -2.0 * x[0] * b - 2.0 * x[2] * a, 0.0, 2.0 * x[2] * b - 2.0 * x[0] * a, 0.0;
    return J;
  };
  p.antiderivative_hessian = [](double theta, const StateVector&) {
    const double s = std::sin(theta);
    const double a = s * s;
    const double b = s * std::cos(theta);
    Tensor3 H(4, Matrix::Zero(4, 4));
    H[0](0, 1) = H[0](1, 0) = a;
    H[0](1, 2) = H[0](2, 1) = -b;
    H[2](0, 1) = H[2](1, 0) = -b;
    H[2](1, 2) = H[2](2, 1) = -a;
    H[3](0, 0) = -2.0 * b;
    H[3](2, 2) = 2.0 * b;
    H[3](0, 2) = H[3](2, 0) = -2.0 * a;
    return H;
  };

  switch (noise_kind) {
    case NoiseKind::none:
      p.diffusion = [](const StateVector& x) { return StateVector::Zero(x.size()).eval(); };
      break;
    case NoiseKind::multiplicative:
      p.diffusion = [noise_scale](const StateVector& x) {
        StateVector s(4);
        s << 0.0, 0.0, noise_scale * x[0], noise_scale * x[1];
        return s;
      };
      break;
    case NoiseKind::proportional:
      p.diffusion = [noise_scale](const StateVector& x) { return (noise_scale * x).eval(); };
      break;
    case NoiseKind::additive:
      p.diffusion = [noise_scale](const StateVector&) {
        StateVector s(4);
        s << 0.0, 0.0, noise_scale, noise_scale;
        return s;
      };
      break;
  }
  return p;
}

OscillatoryProblem logistic(double epsilon, double noise_scale) {
  require_epsilon(epsilon);
  OscillatoryProblem p;
  p.name = "logistic";
  p.dimension = 1;
  p.epsilon = epsilon;
  p.period = kTwoPi;
  p.drift = [](double theta, const StateVector& x) {
    return StateVector::Constant(1, x[0] * (1.0 - x[0]) + std::sin(theta)).eval();
  };
  p.drift_theta_derivative = [](double theta, const StateVector&) {
    return StateVector::Constant(1, std::cos(theta)).eval();
  };
  p.diffusion = [noise_scale](const StateVector& x) { return (noise_scale * x).eval(); };
  p.averaged_drift = [](const StateVector& x) {
    return StateVector::Constant(1, x[0] * (1.0 - x[0])).eval();
  };
  // 1 - cos(theta), written as 2 sin^2(theta/2) so that F_0 = 0 exactly.
  p.antiderivative = [](double theta, const StateVector&) {
    const double s = std::sin(0.5 * theta);
    return StateVector::Constant(1, 2.0 * s * s).eval();
  };
  p.antiderivative_jacobian = [](double, const StateVector&) { return zero_jacobian(1); };
  p.antiderivative_hessian = [](double, const StateVector&) { return zero_hessian(1); };
  return p;
}

OscillatoryProblem geometric_brownian(double lambda, double mu) {
  OscillatoryProblem p;
  p.name = "gbm";
  p.dimension = 1;
  p.epsilon = 1.0;
  p.period = 1.0;
  p.drift = [lambda](double, const StateVector& x) { return (lambda * x).eval(); };
  p.drift_theta_derivative = [](double, const StateVector& x) {
    return StateVector::Zero(x.size()).eval();
  };
  p.diffusion = [mu](const StateVector& x) { return (mu * x).eval(); };
  p.averaged_drift = [lambda](const StateVector& x) { return (lambda * x).eval(); };
  p.antiderivative = [](double, const StateVector& x) { return StateVector::Zero(x.size()).eval(); };
  p.antiderivative_jacobian = [](double, const StateVector&) { return zero_jacobian(1); };
  p.antiderivative_hessian = [](double, const StateVector&) { return zero_hessian(1); };
  return p;
}

double geometric_brownian_solution(double lambda, double mu, double x0, double t, double w) {
  return x0 * std::exp((lambda - 0.5 * mu * mu) * t + mu * w);
}

OscillatoryProblem pure_oscillation(double epsilon) {
  require_epsilon(epsilon);
  OscillatoryProblem p;
  p.name = "pure-osc";
  p.dimension = 1;
  p.epsilon = epsilon;
  p.period = 1.0;
  p.drift = [](double theta, const StateVector&) {
    return StateVector::Constant(1, std::sin(kTwoPi * theta)).eval();
  };
  p.drift_theta_derivative = [](double theta, const StateVector&) {
    return StateVector::Constant(1, kTwoPi * std::cos(kTwoPi * theta)).eval();
  };
  p.diffusion = [](const StateVector&) { return StateVector::Zero(1).eval(); };
  p.averaged_drift = [](const StateVector&) { return StateVector::Zero(1).eval(); };
  // (1 - cos(2 pi theta)) / (2 pi) = sin^2(pi theta) / pi.
  p.antiderivative = [](double theta, const StateVector&) {
    const double s = std::sin(std::numbers::pi * theta);
    return StateVector::Constant(1, s * s / std::numbers::pi).eval();
  };
  p.antiderivative_jacobian = [](double, const StateVector&) { return zero_jacobian(1); };
  p.antiderivative_hessian = [](double, const StateVector&) { return zero_hessian(1); };
  return p;
}

double pure_oscillation_solution(double epsilon, double t) {
  const double s = std::sin(std::numbers::pi * t / epsilon);
  return epsilon * s * s / std::numbers::pi;
}

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{
      "henon-heiles-mult-weak", "henon-heiles-add-weak", "henon-heiles-mult-strong",
      "henon-heiles-add-strong", "logistic", "gbm", "pure-osc"};
  return names;
}

CatalogEntry make_catalog_problem(std::string_view name, double epsilon, double noise_factor) {
  if (!(noise_factor >= 0.0) || !std::isfinite(noise_factor)) {
    throw InvalidInput("noise factor must be finite and nonnegative");
  }
  CatalogEntry entry;
  ProblemSpec& spec = entry.spec;
  spec.name = std::string(name);
  spec.epsilon = epsilon;

  auto hh = [&](NoiseKind kind, double scale, double x0) {
    spec.dimension = 4;
    spec.period = kTwoPi;
    spec.initial_state = StateVector::Constant(4, x0);
    spec.noise_kind = noise_factor == 0.0 ? NoiseKind::none : kind;
    spec.parameters["noise_scale"] = scale * noise_factor;
    entry.problem = henon_heiles(epsilon, spec.noise_kind, scale * noise_factor);
  };

  if (name == "henon-heiles-mult-weak") {
    hh(NoiseKind::multiplicative, 0.2, 0.7);
  } else if (name == "henon-heiles-add-weak") {
    hh(NoiseKind::additive, 0.2, 0.7);
  } else if (name == "henon-heiles-mult-strong") {
    hh(NoiseKind::proportional, 0.5, 0.12);
  } else if (name == "henon-heiles-add-strong") {
    hh(NoiseKind::additive, 0.5, 0.12);
  } else if (name == "logistic") {
    spec.period = kTwoPi;
    spec.initial_state = StateVector::Constant(1, 2.0);
    spec.noise_kind = noise_factor == 0.0 ? NoiseKind::none : NoiseKind::proportional;
    spec.parameters["noise_scale"] = 0.2 * noise_factor;
    entry.problem = logistic(epsilon, 0.2 * noise_factor);
  } else if (name == "gbm") {
    const double lambda = 1.0;
    const double mu = 0.5 * noise_factor;
    spec.period = 1.0;
    spec.initial_state = StateVector::Constant(1, 1.0);
    spec.noise_kind = mu == 0.0 ? NoiseKind::none : NoiseKind::proportional;
    spec.parameters["lambda"] = lambda;
    spec.parameters["mu"] = mu;
    entry.problem = geometric_brownian(lambda, mu);
    // epsilon is carried for reporting only; the dynamics ignore it.
    require_epsilon(epsilon);
    entry.problem.epsilon = epsilon;
  } else if (name == "pure-osc") {
    spec.period = 1.0;
    spec.initial_state = StateVector::Zero(1);
    spec.noise_kind = NoiseKind::none;
    entry.problem = pure_oscillation(epsilon);
  } else {
    throw InvalidInput("unknown problem '" + std::string(name) + "'");
  }
  entry.problem.name = spec.name;
  spec.dimension = entry.problem.dimension;
  return entry;
}

}  // namespace oscsde
