// Acceptance suite: one PASS/FAIL line per criterion, measured values in the
// detail lines. Exit status is nonzero when any criterion fails.

#include "oscsde/experiments.hpp"
#include "oscsde/output.hpp"
#include "oscsde/problems.hpp"
#include "oscsde/toolkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace oscsde;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string num(double v) { return format_number(v); }

std::string slope_text(const GroupFit& g) {
  std::ostringstream s;
  s << to_string(g.scheme) << " eps=" << num(g.epsilon) << " slope="
    << (g.fit ? num(g.fit->slope) : "none");
  return s.str();
}

bool in_band(const GroupFit& g, double lo, double hi) {
  return g.fit && g.fit->slope >= lo && g.fit->slope <= hi;
}

// Results reused by the determinism criterion.
std::map<ExperimentKind, std::string> g_rendered;

Outcome weak_order() {
  const auto c = ExperimentConfig::defaults(ExperimentKind::weak_conv);
  const auto r = run_weak_conv(c);
  g_rendered[ExperimentKind::weak_conv] = render_csv(r);
  Outcome o;
  for (const auto& g : r.fits) o.check(in_band(g, 0.8, 1.2), slope_text(g) + " in [0.8, 1.2]");
  for (Scheme scheme : c.schemes) {
    for (double h : c.steps) {
      double lo = INFINITY, hi = 0.0;
      for (const auto& row : r.table.rows) {
        if (row.scheme != scheme || row.h != h) continue;
        lo = std::min(lo, row.estimate.value);
        hi = std::max(hi, row.estimate.value);
      }
      o.check(hi / lo <= 4.0, std::string(to_string(scheme)) + " h=" + num(h) +
                                  " max/min over eps=" + num(hi / lo) + " <= 4");
    }
  }
  return o;
}

Outcome strong_order_multiplicative() {
  const auto c = ExperimentConfig::defaults(ExperimentKind::strong_conv);
  const auto r = run_strong_conv(c);
  g_rendered[ExperimentKind::strong_conv] = render_csv(r);
  Outcome o;
  for (const auto& g : r.fits) o.check(in_band(g, 0.4, 0.6), slope_text(g) + " in [0.4, 0.6]");
  return o;
}

Outcome strong_order_additive() {
  auto c = ExperimentConfig::defaults(ExperimentKind::strong_conv);
  c.problem = "henon-heiles-add-strong";
  c.schemes = {Scheme::micro_macro};
  const auto r = run_strong_conv(c);
  Outcome o;
  for (const auto& g : r.fits) o.check(in_band(g, 0.85, 1.15), slope_text(g) + " in [0.85, 1.15]");
  return o;
}

Outcome micro_variable_bound() {
  const auto c = ExperimentConfig::defaults(ExperimentKind::sweep);
  const auto r = run_sweep(c);
  g_rendered[ExperimentKind::sweep] = render_csv(r);
  Outcome o;
  for (const auto& row : r.table.rows) {
    o.details.push_back("     eps=" + num(row.epsilon) + " E|Y(T)|=" + num(row.estimate.value) +
                        " +- " + num(row.estimate.half_width));
  }
  const auto& g = r.fits.front();
  o.check(g.fit && g.fit->slope >= 0.8 && g.fit->slope <= 1.2,
          "slope of E|Y(T)| against eps=" + (g.fit ? num(g.fit->slope) : "none") + " in [0.8, 1.2]");
  return o;
}

Outcome resonance() {
  const auto c = ExperimentConfig::defaults(ExperimentKind::resonance);
  const auto r = run_resonance(c);
  g_rendered[ExperimentKind::resonance] = render_json(r);
  Outcome o;
  std::size_t diverged = 0;
  for (const auto& run : r.runs) diverged += run.em_diverged;
  o.details.push_back("     steps=" + std::to_string(r.step_count) + " T_eff=" + num(r.final_time) +
                      " EM diverged in " + std::to_string(diverged) + "/" +
                      std::to_string(r.runs.size()) + " runs");
  o.check(r.median_micro_macro_error <= 0.2 * r.median_em_error,
          "median micro-macro error " + num(r.median_micro_macro_error) + " <= 0.2 x median EM error " +
              num(r.median_em_error));
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;

  // (a) integral scheme exact on the pure oscillation.
  double worst = 0.0;
  for (double eps : {1.0, 0.1, 0.01}) {
    const auto p = pure_oscillation(eps);
    for (std::size_t n : {1u, 10u, 100u}) {
      const TimeGrid g(0.0, 1.0, n);
      const auto path = simulate_path(p, Scheme::integral, g, std::vector<double>(n, 0.0), make_state({0.0}));
      for (std::size_t k = 0; k <= n; ++k) {
        worst = std::max(worst, std::abs(path[k][0] - pure_oscillation_solution(eps, g.time(k))));
      }
    }
  }
  o.check(worst <= 1e-10, "(a) integral scheme vs exact pure oscillation, max error " + num(worst));

  // (b) estimator self-tests on GBM.
  const SelfTest self = gbm_self_test(1, 10000, 1000);
  o.check(self.weak.slope >= 0.8 && self.weak.slope <= 1.2,
          "(b) GBM EM weak slope " + num(self.weak.slope) + " in [0.8, 1.2]");
  o.check(self.strong.slope >= 0.4 && self.strong.slope <= 0.6,
          "(b) GBM EM strong slope " + num(self.strong.slope) + " in [0.4, 0.6]");

  // (c) theta-independent drift: all three schemes coincide step by step.
  OscillatoryProblem flat;
  flat.name = "theta-independent";
  flat.dimension = 4;
  flat.epsilon = 0.01;
  flat.period = 2.0 * 3.141592653589793;
  const auto hh = henon_heiles(1.0, NoiseKind::none, 0.0);
  flat.drift = [hh](double, const StateVector& x) { return hh.drift(0.3, x); };
  flat.diffusion = [](const StateVector& x) { return (0.3 * x).eval(); };
  const TimeGrid grid(0.0, 1.0, 128);
  RngStream stream(7, 0);
  auto dw = gaussian_increments(stream, 128);
  for (auto& v : dw) v *= std::sqrt(grid.step());
  const StateVector x0 = StateVector::Constant(4, 0.5);
  const auto em = simulate_path(flat, Scheme::euler_maruyama, grid, dw, x0);
  const auto in = simulate_path(flat, Scheme::integral, grid, dw, x0);
  const auto mm = simulate_path(flat, Scheme::micro_macro, grid, dw, x0);
  double gap = 0.0;
  for (std::size_t n = 0; n < em.size(); ++n) {
    gap = std::max({gap, (em[n] - in[n]).cwiseAbs().maxCoeff(), (em[n] - mm[n]).cwiseAbs().maxCoeff()});
  }
  o.check(gap <= 1e-12, "(c) theta-independent drift, max pathwise gap between schemes " + num(gap));

  // (d) analytic vs fallback on 100 probes for every catalog problem.
  for (const auto& name : catalog_names()) {
    const auto e = make_catalog_problem(name, 0.0625);
    const auto rep = validate_problem(e.problem, probe_points(e.problem.dimension, 100, 1));
    std::ostringstream s;
    s << "(d) " << name << ": <f> " << num(rep.averaged_drift_mismatch.value_or(0.0)) << ", F "
      << num(rep.antiderivative_mismatch.value_or(0.0)) << ", F' "
      << num(rep.jacobian_mismatch.value_or(0.0)) << ", F'' "
      << num(rep.hessian_mismatch.value_or(0.0)) << " (tol 1e-9/1e-9/1e-6/1e-5)";
    o.check(rep.passes(), s.str());
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto check = [&](ExperimentKind kind, const std::function<std::string(const ExperimentConfig&)>& run) {
    auto c = ExperimentConfig::defaults(kind);
    c.threads = 3;
    const std::string again = run(c);
    o.check(again == g_rendered.at(kind),
            std::string(to_string(kind)) + " defaults, threads 1 vs 3: byte-identical output");
  };
  check(ExperimentKind::weak_conv, [](const auto& c) { return render_csv(run_weak_conv(c)); });
  check(ExperimentKind::strong_conv, [](const auto& c) { return render_csv(run_strong_conv(c)); });
  check(ExperimentKind::sweep, [](const auto& c) { return render_csv(run_sweep(c)); });
  check(ExperimentKind::resonance, [](const auto& c) { return render_json(run_resonance(c)); });

  auto v = ExperimentConfig::defaults(ExperimentKind::validate);
  const std::string first = render_json(run_validate(v));
  v.threads = 3;
  o.check(render_json(run_validate(v)) == first, "validate defaults, threads 1 vs 3: byte-identical output");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {1, "uniform weak order one (Henon-Heiles, multiplicative noise)", weak_order},
      {2, "uniform strong order one half (multiplicative noise)", strong_order_multiplicative},
      {3, "strong order one for micro-macro with additive noise", strong_order_additive},
      {4, "micro variable E|Y(T)| = O(eps)", micro_variable_bound},
      {5, "resonant step: EM fails, micro-macro does not", resonance},
      {6, "oracle equivalence", oracle_equivalence},
      {7, "determinism across thread counts", determinism},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::printf("%s criterion %d: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, seconds);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of 7 criteria passed\n", 7 - failures);
  return failures == 0 ? 0 : 1;
}
