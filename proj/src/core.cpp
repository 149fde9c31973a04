#include "oscsde/core.hpp"

#include <bit>
#include <cmath>
#include <sstream>

namespace oscsde {

NumericalBlowUp::NumericalBlowUp(const std::string& what, std::size_t step, double time,
                                 std::size_t path)
    : std::runtime_error(what), step_(step), time_(time), path_(path) {}

NumericalBlowUp NumericalBlowUp::with_path(std::size_t path) const {
  std::ostringstream msg;
  msg << what() << " (path " << path << ")";
  return NumericalBlowUp(msg.str(), step_, time_, path);
}

QuadratureRule::QuadratureRule(std::size_t node_count) : node_count_(node_count) {
  if (node_count < 8 || !std::has_single_bit(node_count)) {
    throw InvalidInput("QuadratureRule: node_count must be a power of two >= 8");
  }
}

void OscillatoryProblem::check() const {
  if (dimension == 0) throw InvalidInput("problem '" + name + "': dimension must be positive");
  if (!(epsilon > 0.0 && epsilon <= 1.0)) {
    throw InvalidInput("problem '" + name + "': epsilon must lie in (0, 1]");
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw InvalidInput("problem '" + name + "': period must be positive");
  }
  if (!drift) throw InvalidInput("problem '" + name + "': drift is required");
  if (!diffusion) throw InvalidInput("problem '" + name + "': diffusion is required");
}

void OscillatoryProblem::check_dimension(const StateVector& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension) {
    std::ostringstream msg;
    msg << "problem '" << name << "': expected dimension " << dimension << ", got " << x.size();
    throw InvalidInput(msg.str());
  }
}

MicroMacroState MicroMacroState::initial(const StateVector& x0) {
  return {x0, StateVector::Zero(x0.size())};
}

bool is_admissible(const StateVector& x) noexcept {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // Also false for NaN.
    if (!(std::abs(x[i]) <= kBlowUpThreshold)) return false;
  }
  return true;
}

void require_admissible(const StateVector& x, std::size_t step, double time) {
  if (is_admissible(x)) return;
  std::ostringstream msg;
  msg << "numerical blow-up at step " << step << " (t=" << time << "): " << to_string(x);
  throw NumericalBlowUp(msg.str(), step, time);
}

StateVector make_state(std::initializer_list<double> values) {
  StateVector x(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) x[i++] = v;
  return x;
}

std::string to_string(const StateVector& x) {
  std::ostringstream out;
  out << '(';
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) out << ", ";
    out << x[i];
  }
  out << ')';
  return out.str();
}

}  // namespace oscsde
