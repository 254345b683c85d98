#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mobius_flock/control.hpp"
#include "mobius_flock/sim.hpp"

using namespace mobius_flock;

namespace {

constexpr int kCases = 200;

struct Rng {
  std::mt19937_64 gen{12345};
  double uni(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
};

MobiusContext random_ctx(Rng& r) {
  const double lam = r.uni(0.05, 2.0) * (r.uni(0, 1) < 0.5 ? -1.0 : 1.0);
  const double mu = 1.0 + std::abs(lam) + r.uni(0.01, 3.0);
  return MobiusContext::make(lam, mu, r.uni(0, 1) < 0.5 ? RootKind::Smaller : RootKind::Larger);
}

Complex point_between(Rng& r, const MobiusContext& ctx) {
  for (;;) {
    const Complex z = ctx.pair.lambda() + std::polar(ctx.pair.mu() * std::sqrt(r.uni(0, 1)),
                                                    r.uni(0, 2 * std::numbers::pi));
    if (std::abs(z) > 1.0 && std::abs(1.0 + ctx.alpha * z) > 1e-3) return z;
  }
}

TEST(Property, RootsAreReciprocal) {
  Rng r;
  for (int i = 0; i < kCases; ++i) {
    const auto ctx = random_ctx(r);
    const auto roots = solve_alpha(ctx.pair);
    EXPECT_NEAR(roots.alpha_s * roots.alpha_l, 1.0, 1e-12);
    EXPECT_LT(std::abs(roots.alpha_s), 1.0);
  }
}

TEST(Property, RegionBetweenCirclesMapsIntoAnnulus) {
  Rng r;
  for (int i = 0; i < kCases; ++i) {
    const auto ctx = random_ctx(r);
    const Complex z = point_between(r, ctx);
    const double a = std::abs(forward_map(ctx, z));
    const double lo = std::min(ctx.radius_inner, ctx.radius_outer);
    const double hi = std::max(ctx.radius_inner, ctx.radius_outer);
    EXPECT_GT(a, lo - 1e-12);
    EXPECT_LT(a, hi + 1e-12);
    EXPECT_LT(std::abs(inverse_map(ctx, forward_map(ctx, z)) - z), 1e-12 * std::max(1.0, std::abs(z)));
    EXPECT_NEAR(wrap_angle(chi(ctx, z) + zeta(ctx, forward_map(ctx, z))), 0.0, 1e-12);
  }
}

TEST(Property, PotentialInvariantUnderCommonShift) {
  Rng r;
  const auto g = cycle_graph(6);
  for (int i = 0; i < kCases; ++i) {
    std::vector<double> a(6), b(6);
    const double shift = r.uni(-10, 10);
    for (int k = 0; k < 6; ++k) {
      a[k] = r.uni(-4, 4);
      b[k] = a[k] + shift;
    }
    EXPECT_NEAR(potential_U(g, a), potential_U(g, b), 1e-12);
    EXPECT_GE(potential_U(g, a), -1e-15);
    EXPECT_LE(potential_U(g, a), 6 * g.lambda_max() / 2 + 1e-12);
  }
}

TEST(Property, LyapunovRateNonPositive) {
  Rng r;
  const auto ctx = MobiusContext::make(0.5, std::sqrt(2.5));
  const auto g = cycle_graph(5);
  for (int i = 0; i < kCases; ++i) {
    ControllerGains gains;
    gains.kappa1 = r.uni(0.001, 0.1);
    gains.kappa2 = r.uni(0.1, 20);
    const bool bal = i % 2 == 1;
    gains.K = (bal ? 1.0 : -1.0) * r.uni(0.001, 0.2);
    const auto xs = random_feasible_states(ctx, gains, 5, r.gen());
    std::vector<AgentStateTransformed> ys;
    for (const auto& x : xs) ys.push_back(to_transformed(ctx, x));
    EXPECT_LE(lyapunov_rate(g, ctx, gains, ys), 1e-15);
    const Pattern pat = bal ? Pattern::Balance : Pattern::Sync;
    EXPECT_GE(lyapunov(pat, g, ctx, gains, ys), 0.0);
  }
}

TEST(Property, ShortRunsStayFeasible) {
  Rng r;
  const auto ctx = MobiusContext::make(0.5, std::sqrt(2.5));
  for (int i = 0; i < 100; ++i) {
    SimConfig c;
    c.ctx = ctx;
    c.pattern = i % 2 ? Pattern::Balance : Pattern::Sync;
    c.gains.K = i % 2 ? 0.04 : -0.04;
    c.gains.kappa1 = r.uni(0.002, 0.05);
    c.graph = cycle_graph(4);
    c.initial_states = random_feasible_states(ctx, c.gains, 4, r.gen());
    c.dt = 1e-2;
    c.t_final = 0.5;
    const auto res = run(c);
    EXPECT_TRUE(res.report.ok()) << res.report.failure;
  }
}

TEST(Property, OrderParameterUnitBound) {
  Rng r;
  for (int i = 0; i < kCases; ++i) {
    std::vector<double> a(7);
    for (auto& x : a) x = r.uni(-20, 20);
    const double m = order_of_angles(a).magnitude;
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0 + 1e-15);
  }
}

}  // namespace
