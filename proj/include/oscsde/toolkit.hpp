#pragma once

#include "oscsde/core.hpp"

namespace oscsde {

// Resolved accessors: the analytic member of the problem when supplied,
// otherwise the numerical fallback below with the problem's quadrature rule.

StateVector averaged_drift(const OscillatoryProblem& problem, const StateVector& x);
StateVector antiderivative(const OscillatoryProblem& problem, double theta, const StateVector& x);
Matrix antiderivative_jacobian(const OscillatoryProblem& problem, double theta, const StateVector& x);
Tensor3 antiderivative_hessian(const OscillatoryProblem& problem, double theta, const StateVector& x);

/// Change of variable x + eps * F_theta(x).
StateVector phi(const OscillatoryProblem& problem, double theta, const StateVector& x);

/// (1/P) * integral of f_theta(x) over one period, periodic trapezoid rule.
StateVector averaged_drift_fallback(const OscillatoryProblem& problem, const StateVector& x,
                                    const QuadratureRule& rule);

/// Integral of f_tau(x) - <f>(x) for tau in [0, theta].
///
/// Whole periods contribute exactly zero, so only theta mod P is integrated:
/// trapezoid sums on node_count, node_count/2, ... panels of [0, theta mod P]
/// combined by Romberg extrapolation. <f> comes from averaged_drift_fallback,
/// never from an analytic member.
StateVector antiderivative_fallback(const OscillatoryProblem& problem, double theta,
                                    const StateVector& x, const QuadratureRule& rule);

/// Central differences of the resolved antiderivative, step
/// cbrt(machine eps) * (1 + |x_j|) in direction j.
Matrix antiderivative_jacobian_fallback(const OscillatoryProblem& problem, double theta,
                                        const StateVector& x, const QuadratureRule& rule);

/// Second-order central differences of the resolved antiderivative, step
/// (machine eps)^(1/4) * (1 + |x_j|) in direction j.
Tensor3 antiderivative_hessian_fallback(const OscillatoryProblem& problem, double theta,
                                        const StateVector& x, const QuadratureRule& rule);

/// Bilinear form H(u, v): component i is u^T H_i v.
StateVector contract(const Tensor3& hessian, const StateVector& u, const StateVector& v);

/// theta reduced to [0, period).
double reduce_phase(double theta, double period);

}  // namespace oscsde
