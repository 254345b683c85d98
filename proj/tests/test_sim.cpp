#include <gtest/gtest.h>

#include <omp.h>

#include <cmath>
#include <random>

#include "mobius_flock/config.hpp"
#include "mobius_flock/errors.hpp"
#include "mobius_flock/kernels.hpp"
#include "mobius_flock/sim.hpp"

using namespace mobius_flock;

namespace {

SimConfig paper_sync(double t_final) {
  SimConfig c = load_config(bundled_config_path("paper_sync")).sim;
  c.t_final = t_final;
  return c;
}

std::vector<double> flat_states(const MobiusContext& ctx, const std::vector<AgentStateOriginal>& xs,
                                bool transformed) {
  std::vector<double> x;
  for (const auto& o : xs) {
    if (transformed) {
      const auto y = to_transformed(ctx, o);
      x.insert(x.end(), {y.rho.real(), y.rho.imag(), y.s, y.gamma});
    } else {
      x.insert(x.end(), {o.r.real(), o.r.imag(), o.v, o.theta});
    }
  }
  return x;
}

TEST(Kernels, OpenMPMatchesSerialBitForBit) {
  const auto ctx = MobiusContext::make(0.5, std::sqrt(2.5));
  ControllerGains g;
  for (int n : {5, 64, 301}) {
    const auto graph = n == 5 ? cycle_graph(5) : complete_graph(n);
    const auto xs = random_feasible_states(ctx, g, n, 17 + n);
    const auto p = kernels::LawParams::from(ctx, g);
    const auto adj = kernels::Adjacency::from(graph);
    for (bool tr : {true, false}) {
      const auto x = flat_states(ctx, xs, tr);
      std::vector<double> a(x.size()), b(x.size());
      kernels::Scratch s1, s2;
      const int saved = omp_get_max_threads();
      omp_set_num_threads(4);
      const bool ok_a = tr ? kernels::rhs_transformed_serial(p, adj, x.data(), a.data(), s1)
                           : kernels::rhs_original_serial(p, adj, x.data(), a.data(), s1);
      const bool ok_b = tr ? kernels::rhs_transformed_omp(p, adj, x.data(), b.data(), s2)
                           : kernels::rhs_original_omp(p, adj, x.data(), b.data(), s2);
      omp_set_num_threads(saved);
      EXPECT_EQ(ok_a, ok_b);
      EXPECT_TRUE(ok_a);
      for (std::size_t i = 0; i < x.size(); ++i) ASSERT_EQ(a[i], b[i]) << "n=" << n << " i=" << i;
    }
  }
}

TEST(Kernels, MatchScalarControllers) {
  const auto ctx = MobiusContext::make(0.5, std::sqrt(2.5));
  ControllerGains g;
  const auto graph = cycle_graph(5);
  const auto xs = random_feasible_states(ctx, g, 5, 4);
  const auto p = kernels::LawParams::from(ctx, g);
  const auto adj = kernels::Adjacency::from(graph);
  const auto x = flat_states(ctx, xs, false);
  std::vector<double> dx(x.size());
  kernels::Scratch sc;
  ASSERT_TRUE(kernels::rhs_original_serial(p, adj, x.data(), dx.data(), sc));
  for (int k = 0; k < 5; ++k) {
    const auto c = original_control(ctx, g, neighborhood(graph, std::span(xs), k));
    EXPECT_NEAR(dx[4 * k + 2], c.u, 1e-12);
    EXPECT_NEAR(dx[4 * k + 3], c.omega, 1e-12);
  }
}

TEST(Kernels, ReportBarrierExit) {
  const auto ctx = MobiusContext::make(0.5, std::sqrt(2.5));
  ControllerGains g;
  const auto p = kernels::LawParams::from(ctx, g);
  const auto adj = kernels::Adjacency::from(cycle_graph(3));
  std::vector<double> x{0.9, 0.0, 0.06, 0.0, 0.0, -0.5, 0.06, 0.0, -0.5, 0.0, 0.06, 0.0};
  std::vector<double> dx(12);
  kernels::Scratch sc;
  EXPECT_FALSE(kernels::rhs_transformed_serial(p, adj, x.data(), dx.data(), sc));
}

TEST(Run, ShortSyncRunPassesMonitors) {
  const auto res = run(paper_sync(5.0));
  EXPECT_TRUE(res.report.ok()) << res.report.failure;
  EXPECT_EQ(res.report.macro_steps, 5000);
  EXPECT_EQ(res.log.samples.size(), 501u);
  EXPECT_DOUBLE_EQ(res.log.samples.back().t, 5.0);
  EXPECT_LE(res.report.max_lyapunov_increment, res.report.lyapunov_tolerance);
}

TEST(Run, Deterministic) {
  const auto a = run(paper_sync(2.0));
  const auto b = run(paper_sync(2.0));
  ASSERT_EQ(a.log.samples.size(), b.log.samples.size());
  for (std::size_t i = 0; i < a.log.samples.size(); ++i) {
    for (std::size_t k = 0; k < 5; ++k) {
      ASSERT_EQ(a.log.samples[i].agents[k].r, b.log.samples[i].agents[k].r);
      ASSERT_EQ(a.log.samples[i].agents[k].theta, b.log.samples[i].agents[k].theta);
    }
  }
}

TEST(Run, KernelChoiceDoesNotChangeTrajectory) {
  auto c = paper_sync(1.0);
  c.kernel = KernelChoice::Serial;
  const auto a = run(c);
  c.kernel = KernelChoice::OpenMP;
  const auto b = run(c);
  EXPECT_EQ(a.log.samples.back().agents[2].r, b.log.samples.back().agents[2].r);
  EXPECT_EQ(a.log.samples.back().agents[2].v, b.log.samples.back().agents[2].v);
}

TEST(Run, PlanesAgreeOverShortHorizon) {
  auto c = paper_sync(3.0);
  const auto a = run(c);
  c.plane = Plane::Transformed;
  const auto b = run(c);
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_LT(std::abs(a.log.samples.back().agents[k].r - b.log.samples.back().agents[k].r),
              1e-9);
  }
  EXPECT_LT(cross_check(c), 1e-9);
}

TEST(Run, CrossCheckPlaneRecordsDivergence) {
  auto c = paper_sync(1.0);
  c.plane = Plane::CrossCheck;
  const auto r = run(c);
  ASSERT_TRUE(r.report.max_cross_divergence.has_value());
  EXPECT_LT(*r.report.max_cross_divergence, 1e-9);
}

TEST(Run, ExtendedPrecisionLowersCrossCheckFloor) {
  auto c = paper_sync(10.0);
  const double d = cross_check(c);
  c.extended_precision = true;
  const double e = cross_check(c);
  EXPECT_LT(e, 1e-14);
  EXPECT_LT(e, d);
  c.t_final = 1.0;
  c.plane = Plane::Transformed;
  const auto r = run(c);
  EXPECT_TRUE(r.report.ok());
}

TEST(Kernels, MapToTransformedMatchesScalarMap) {
  auto c = paper_sync(1.0);
  const auto p = kernels::LawParams::from(c.ctx, c.gains);
  const auto xo = flat_states(c.ctx, c.initial_states, false);
  const auto ref = flat_states(c.ctx, c.initial_states, true);
  std::vector<double> xt(xo.size());
  kernels::original_to_transformed(p, xo.data(), xt.data(), 5);
  for (std::size_t i = 0; i < xt.size(); ++i) {
    const double d = i % 4 == 3 ? wrap_angle(xt[i] - ref[i]) : xt[i] - ref[i];
    EXPECT_NEAR(d, 0.0, 1e-13) << i;
  }
}

TEST(Run, InfeasibleInitialConditions) {
  auto c = paper_sync(1.0);
  c.initial_states[0].r = {2.5, 0.0};
  EXPECT_THROW(run(c), InfeasibleInitialConditions);
}

TEST(Run, RejectsCoarseDtAndBadSizes) {
  auto c = paper_sync(1.0);
  c.dt = 0.05;
  EXPECT_THROW(run(c), InvalidConfig);
  c = paper_sync(1.0);
  c.initial_states.pop_back();
  EXPECT_THROW(run(c), InvalidConfig);
  c = paper_sync(1.0);
  c.gains.K = 0.04;
  EXPECT_THROW(run(c), WrongGainSign);
}

TEST(Run, DepthFloorSurfacesBarrierViolation) {
  // With no refinement allowed, the coarse step cannot follow the barrier.
  auto c = paper_sync(60.0);
  c.max_refine_depth = 0;
  c.dt = 0.01;
  EXPECT_THROW(run(c), BarrierViolation);
  const auto partial = run_monitored(c);
  EXPECT_FALSE(partial.report.ok());
  EXPECT_FALSE(partial.report.failure.empty());
  EXPECT_FALSE(partial.log.samples.empty());
}

TEST(Run, BalanceOnPathWarnsButRuns) {
  auto c = paper_sync(1.0);
  c.pattern = Pattern::Balance;
  c.gains.K = 0.04;
  c.graph = path_graph(5);
  const auto r = run(c);
  EXPECT_TRUE(r.report.ok());
}

TEST(Step, SingleMacroStepBothPlanes) {
  auto c = paper_sync(1.0);
  const auto x1 = step(c, c.initial_states);
  std::vector<AgentStateTransformed> ys;
  for (const auto& o : c.initial_states) ys.push_back(to_transformed(c.ctx, o));
  const auto y1 = step(c, ys);
  for (int k = 0; k < 5; ++k) {
    EXPECT_LT(std::abs(to_original(c.ctx, y1[k]).r - x1[k].r), 1e-12);
  }
}

TEST(RandomStates, Feasible) {
  const auto ctx = MobiusContext::make(0.5, std::sqrt(2.5));
  ControllerGains g;
  const auto xs = random_feasible_states(ctx, g, 50, 99);
  EXPECT_EQ(xs.size(), 50u);
  EXPECT_TRUE(feasibility_check(ctx, g, xs).ok);
  EXPECT_EQ(random_feasible_states(ctx, g, 3, 1)[2].r, random_feasible_states(ctx, g, 3, 1)[2].r);
}

}  // namespace
