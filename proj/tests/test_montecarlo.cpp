#include "oscsde/montecarlo.hpp"
#include "oscsde/problems.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace oscsde;

namespace {

OscillatoryProblem deterministic_hh(double eps) { return henon_heiles(eps, NoiseKind::none, 0.0); }

StateVector hh_x0() { return StateVector::Constant(4, 0.7); }

double first(const StateVector& x) { return x[0]; }

}  // namespace

TEST(BrownianGrid, CoarsenByDefinition) {
  const BrownianGrid g(0.25, {0.5, -0.25, 1.0, 0.125});
  EXPECT_EQ(g.coarsen(2), (std::vector<double>{0.25, 1.125}));
  EXPECT_EQ(g.coarsen(1), (std::vector<double>{0.5, -0.25, 1.0, 0.125}));
  EXPECT_EQ(g.coarsen(4), (std::vector<double>{1.375}));
  EXPECT_THROW(g.coarsen(3), InvalidInput);
  EXPECT_THROW(g.coarsen(0), InvalidInput);
}

TEST(BrownianGrid, CoarseSumsEqualFineSumsExactly) {
  for (std::uint64_t trial = 0; trial < 1000; ++trial) {
    RngStream s(123, trial);
    const auto g = BrownianGrid::sample(s, 1.0 / 1024.0, 1024);
    const double total = g.total();
    for (std::size_t ratio : {2u, 8u, 64u, 1024u}) {
      const auto c = g.coarsen(ratio);
      ASSERT_EQ(compensated_sum(c), total);
      ASSERT_EQ(std::accumulate(c.begin(), c.end(), 0.0, [](double a, double b) { return a + b; }),
                std::accumulate(c.rbegin(), c.rend(), 0.0))
          << "summation order changed a coarse total";
    }
    // Coarsening twice is coarsening once.
    const BrownianGrid half(2.0 / 1024.0, g.coarsen(2));
    ASSERT_EQ(half.coarsen(4), g.coarsen(8));
  }
}

TEST(BrownianGrid, IncrementsHaveBrownianVariance) {
  RngStream s(5, 0);
  const double h = 1.0 / 256.0;
  const auto g = BrownianGrid::sample(s, h, 200000);
  double sq = 0.0;
  for (double v : g.fine_increments()) sq += v * v;
  EXPECT_NEAR(sq / 200000.0 / h, 1.0, 0.01);
}

TEST(CompensatedSum, RecoversCancelledLowBits) {
  const std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  EXPECT_EQ(compensated_sum(v), 2.0);
}

TEST(ErrorEstimate, Significance) {
  EXPECT_TRUE((ErrorEstimate{0.1, 0.01, 10}).significant());
  EXPECT_FALSE((ErrorEstimate{0.01, 0.1, 10}).significant());
}

TEST(WeakError, DeterministicProblemSingleSample) {
  const auto p = deterministic_hh(0.0625);
  const TimeGrid g(0.0, 1.0, 8);
  const auto e = weak_error(p, Scheme::micro_macro, first, g, 1, FineReference{64}, 3, hh_x0());
  const std::vector<double> zeros8(8, 0.0), zeros512(512, 0.0);
  const double direct =
      simulate_endpoint(p, Scheme::micro_macro, g, zeros8, hh_x0())[0] -
      simulate_endpoint(p, Scheme::integral, TimeGrid(0.0, 1.0, 512), zeros512, hh_x0())[0];
  EXPECT_DOUBLE_EQ(e.value, std::abs(direct));
  EXPECT_EQ(e.half_width, 0.0);
  EXPECT_EQ(e.sample_count, 1u);
}

TEST(WeakError, ExactSchemeOnPureOscillation) {
  const auto p = pure_oscillation(0.07);
  for (std::size_t n : {3u, 10u}) {
    const auto e = weak_error(p, Scheme::integral, first, TimeGrid(0.0, 1.0, n), 4, FineReference{16},
                              1, make_state({0.0}));
    EXPECT_LE(e.value, 1e-10);
  }
}

TEST(WeakError, GbmMatchesAnalyticMoment) {
  const auto p = geometric_brownian(1.0, 0.5);
  const auto e = weak_error(p, Scheme::euler_maruyama, first, TimeGrid(0.0, 1.0, 256), 10000,
                            AnalyticMoment{std::exp(1.0)}, 17, make_state({1.0}));
  EXPECT_LE(e.value, e.half_width);
}

TEST(WeakError, RejectsCoarseReference) {
  const auto p = deterministic_hh(0.1);
  EXPECT_THROW(weak_error(p, Scheme::integral, first, TimeGrid(0.0, 1.0, 4), 10, FineReference{8}, 1,
                          hh_x0()),
               InvalidInput);
  EXPECT_THROW(weak_error(p, Scheme::integral, first, TimeGrid(0.0, 1.0, 4), 10, FineReference{48}, 1,
                          hh_x0()),
               InvalidInput);
}

TEST(StrongError, SchemeEqualToReferenceGivesZero) {
  const auto p = henon_heiles(0.1, NoiseKind::proportional, 0.5);
  const auto e = strong_error(p, Scheme::integral, TimeGrid(0.0, 1.0, 16), 50, 1, 9, hh_x0());
  EXPECT_EQ(e.value, 0.0);
}

TEST(StrongError, DeterministicProblemIgnoresSampleCount) {
  const auto p = deterministic_hh(0.0625);
  const TimeGrid g(0.0, 1.0, 16);
  const auto a = strong_error(p, Scheme::integral, g, 1, 64, 1, hh_x0());
  const auto b = strong_error(p, Scheme::integral, g, 7, 64, 2, hh_x0());
  EXPECT_DOUBLE_EQ(a.value, b.value);
  const std::vector<double> z16(16, 0.0), z1024(1024, 0.0);
  const double direct = (simulate_endpoint(p, Scheme::integral, g, z16, hh_x0()) -
                         simulate_endpoint(p, Scheme::integral, TimeGrid(0.0, 1.0, 1024), z1024, hh_x0()))
                            .norm();
  EXPECT_NEAR(a.value, direct, 1e-15);
}

TEST(StrongError, GbmExactSolutionSlope) {
  const double lambda = 0.5, mu = 0.5;
  const auto p = geometric_brownian(lambda, mu);
  StudyConfig c;
  c.kind = ErrorKind::strong;
  c.schemes = {Scheme::euler_maruyama};
  c.steps = {0x1p-4, 0x1p-5, 0x1p-6, 0x1p-7, 0x1p-8};
  c.initial_state = make_state({1.0});
  c.samples = 1000;
  c.reference = ExactSolution{[=](double t, double w) {
    return make_state({geometric_brownian_solution(lambda, mu, 1.0, t, w)});
  }};
  const auto table = run_study(p, c, derive_seed(3, 0));
  const auto fit = estimate_order(table.series(Scheme::euler_maruyama, 1.0));
  EXPECT_GE(fit.slope, 0.4);
  EXPECT_LE(fit.slope, 0.6);
}

TEST(Study, RowsAreIndependentOfThreadCount) {
  const auto p = henon_heiles(0.05, NoiseKind::multiplicative, 0.2);
  StudyConfig c;
  c.kind = ErrorKind::weak;
  c.schemes = {Scheme::integral, Scheme::micro_macro, Scheme::euler_maruyama};
  c.steps = {0.25, 0.125};
  c.initial_state = hh_x0();
  c.samples = 203;
  c.test_function = first;
  c.reference = FineReference{16};
  auto one = run_study(p, c, 99);
  c.threads = 3;
  auto three = run_study(p, c, 99);
  ASSERT_EQ(one.rows.size(), 6u);
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    EXPECT_EQ(one.rows[i].estimate.value, three.rows[i].estimate.value);
    EXPECT_EQ(one.rows[i].estimate.half_width, three.rows[i].estimate.half_width);
  }
}

TEST(Study, RejectsInconsistentSteps) {
  const auto p = deterministic_hh(0.1);
  StudyConfig c;
  c.schemes = {Scheme::integral};
  c.initial_state = hh_x0();
  c.test_function = first;
  c.steps = {0.3};
  EXPECT_THROW(run_study(p, c, 1), InvalidInput);
  c.steps = {0.5, 1.0 / 3.0};
  EXPECT_THROW(run_study(p, c, 1), InvalidInput);
  c.steps = {0.5};
  c.test_function = nullptr;
  EXPECT_THROW(run_study(p, c, 1), InvalidInput);
}

TEST(Study, BlowUpReportsPathIndex) {
  OscillatoryProblem p;
  p.name = "explosive";
  p.dimension = 1;
  p.epsilon = 1.0;
  p.drift = [](double, const StateVector& x) { return (x.array() * x.array()).matrix().eval(); };
  p.diffusion = [](const StateVector& x) { return StateVector::Ones(x.size()).eval(); };
  StudyConfig c;
  c.kind = ErrorKind::strong;
  c.schemes = {Scheme::euler_maruyama};
  c.steps = {0.5};
  c.final_time = 4.0;
  c.initial_state = make_state({3.0});
  c.samples = 5;
  c.reference = FineReference{1};
  try {
    run_study(p, c, 1);
    FAIL() << "expected a blow-up";
  } catch (const NumericalBlowUp& e) {
    EXPECT_EQ(e.path(), 0u);
  }
}

TEST(ParallelFor, LowestFailingIndexWins) {
  std::atomic<int> visited{0};
  try {
    parallel_for(100, 4, [&](std::size_t i) {
      ++visited;
      if (i == 17 || i == 63) throw std::runtime_error("index " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "index 17");
  }
  EXPECT_EQ(visited.load(), 100);
}

TEST(OrderFit, ExactPowerLaws) {
  std::vector<std::pair<double, double>> quad, lin;
  for (double h : {0.5, 0.25, 0.125, 0.0625}) {
    quad.emplace_back(h, 3.0 * h * h);
    lin.emplace_back(h, 0.7 * h);
  }
  const auto q = estimate_order(quad);
  EXPECT_NEAR(q.slope, 2.0, 1e-12);
  EXPECT_NEAR(q.max_residual, 0.0, 1e-12);
  EXPECT_NEAR(q.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(estimate_order(lin).slope, 1.0, 1e-12);
  EXPECT_EQ(q.points, 4u);
}

TEST(OrderFit, RejectsDegenerateInput) {
  const std::vector<std::pair<double, double>> two{{0.5, 1.0}, {0.25, 0.5}};
  EXPECT_THROW(estimate_order(two), InvalidInput);
  const std::vector<std::pair<double, double>> zero{{0.5, 1.0}, {0.25, 0.0}, {0.125, 0.1}};
  EXPECT_THROW(estimate_order(zero), InvalidInput);
  EXPECT_FALSE(try_estimate_order(zero));
  const std::vector<std::pair<double, double>> same{{0.5, 1.0}, {0.5, 0.9}, {0.5, 0.8}};
  EXPECT_THROW(estimate_order(same), InvalidInput);
}

TEST(EpsilonSweep, SingleEntryEqualsDirectCall) {
  StudyConfig c;
  c.kind = ErrorKind::weak;
  c.schemes = {Scheme::micro_macro};
  c.steps = {0.125};
  c.initial_state = hh_x0();
  c.samples = 100;
  c.test_function = first;
  c.reference = FineReference{16};
  c.seed = 4;
  const std::vector<double> eps{0.0625};
  const auto table = epsilon_sweep(
      [](double e) { return henon_heiles(e, NoiseKind::multiplicative, 0.2); }, eps, c);
  ASSERT_EQ(table.rows.size(), 1u);
  const auto direct = weak_error(henon_heiles(0.0625, NoiseKind::multiplicative, 0.2),
                                 Scheme::micro_macro, first, TimeGrid(0.0, 1.0, 8), 100,
                                 FineReference{16}, 4, hh_x0());
  EXPECT_EQ(table.rows[0].estimate.value, direct.value);
  EXPECT_EQ(table.rows[0].estimate.half_width, direct.half_width);
}

TEST(EpsilonSweep, EpsilonFreeProblemGivesIdenticalRowsWithSharedSeed) {
  StudyConfig c;
  c.kind = ErrorKind::weak;
  c.schemes = {Scheme::euler_maruyama};
  c.steps = {0.25, 0.125};
  c.initial_state = make_state({1.0});
  c.samples = 200;
  c.test_function = first;
  c.reference = AnalyticMoment{std::exp(1.0)};
  const std::vector<double> eps{1.0, 0.25, 0.01};
  const auto table = epsilon_sweep([](double) { return geometric_brownian(1.0, 0.5); }, eps, c,
                                   SeedPolicy::shared_across_epsilon);
  ASSERT_EQ(table.rows.size(), 6u);
  for (std::size_t i = 2; i < 6; ++i) {
    EXPECT_EQ(table.rows[i].estimate.value, table.rows[i % 2].estimate.value);
    EXPECT_EQ(table.rows[i].h, table.rows[i % 2].h);
  }
  EXPECT_EQ(table.rows[4].epsilon, 0.01);
  EXPECT_THROW(epsilon_sweep([](double) { return geometric_brownian(1.0, 0.5); },
                             std::vector<double>{1.5}, c),
               InvalidInput);
}

TEST(MicroVariable, ShrinksWithEpsilon) {
  const TimeGrid g(0.0, 1.0, 64);
  const auto big = micro_variable_magnitude(henon_heiles(0x1p-4, NoiseKind::additive, 0.2), g, 200,
                                            1, hh_x0());
  const auto small = micro_variable_magnitude(henon_heiles(0x1p-6, NoiseKind::additive, 0.2), g, 200,
                                              1, hh_x0());
  EXPECT_GT(big.value, 0.0);
  EXPECT_NEAR(big.value / small.value, 4.0, 1.0);
}
