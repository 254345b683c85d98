#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mobius_flock/errors.hpp"
#include "mobius_flock/geometry.hpp"

using namespace mobius_flock;

namespace {

const double kMu1 = std::sqrt(2.5);

TEST(SolveAlpha, ExampleOneRoots) {
  const auto r = solve_alpha(CanonicalCirclePair(0.5, kMu1));
  EXPECT_NEAR(r.alpha_s, 0.5, 1e-15);
  EXPECT_NEAR(r.alpha_l, 2.0, 1e-14);
  EXPECT_LT(std::abs(alpha_residual(0.5, kMu1, r.alpha_s)), 1e-12);
  EXPECT_LT(std::abs(alpha_residual(0.5, kMu1, r.alpha_l)), 1e-12);
}

TEST(SolveAlpha, NegativeLambdaGivesNegativeRoots) {
  const auto r = solve_alpha(CanonicalCirclePair(-0.5, kMu1));
  EXPECT_NEAR(r.alpha_s, -0.5, 1e-15);
  EXPECT_NEAR(r.alpha_l, -2.0, 1e-14);
}

TEST(SolveAlpha, StableNearTouching) {
  // One ulp-scale margin above touching still yields a reciprocal pair.
  const double lam = 0.3, mu = 1.3 + 1e-6;
  const auto r = solve_alpha(lam, mu);
  EXPECT_NEAR(r.alpha_s * r.alpha_l, 1.0, 1e-12);
}

TEST(SolveAlpha, RawIntersectingCircles) {
  EXPECT_THROW(solve_alpha(0.5, 1.5), IntersectingCircles);
  EXPECT_THROW(solve_alpha(0.5, 1.2), IntersectingCircles);
}

TEST(CirclePair, Rejections) {
  EXPECT_THROW(CanonicalCirclePair(0.0, 2.0), ConcentricCircles);
  EXPECT_THROW(CanonicalCirclePair(0.5, 1.5), GeometryViolation);
  EXPECT_THROW(CanonicalCirclePair(0.5, 1.2), GeometryViolation);
  try {
    CanonicalCirclePair(0.5, 1.5);
    FAIL();
  } catch (const GeometryViolation& e) {
    EXPECT_NE(std::string(e.what()).find("non-touching"), std::string::npos);
  }
}

TEST(MobiusContext, ExampleOneRadii) {
  const auto s = MobiusContext::make(0.5, kMu1, RootKind::Smaller);
  EXPECT_NEAR(s.radius_inner, 0.5, 1e-15);
  EXPECT_NEAR(s.radius_outer, std::sqrt(0.4), 1e-15);
  EXPECT_NEAR(s.delta_T, 0.13246, 1e-4);
  EXPECT_NEAR(s.sigma, 0.5, 1e-15);
  EXPECT_NEAR(s.beta, 2.0, 1e-14);

  const auto l = MobiusContext::make(0.5, kMu1, RootKind::Larger);
  EXPECT_NEAR(l.sigma, -2.0, 1e-14);
  EXPECT_GT(l.delta_T, 0.0);
  EXPECT_NEAR(l.delta_T, 2.0 - std::abs((0.5 + 2.0) / kMu1), 1e-14);
}

TEST(Map, CirclesBecomeConcentric) {
  const auto ctx = MobiusContext::make(0.5, kMu1);
  for (int i = 0; i < 32; ++i) {
    const double t = 2 * std::numbers::pi * i / 32;
    EXPECT_NEAR(std::abs(forward_map(ctx, std::polar(1.0, t))), ctx.radius_inner, 1e-14);
    const Complex b = 0.5 + std::polar(kMu1, t);
    EXPECT_NEAR(std::abs(forward_map(ctx, b)), ctx.radius_outer, 1e-14);
  }
}

TEST(Map, DerivativesAgainstFiniteDifferences) {
  const auto ctx = MobiusContext::make(0.5, kMu1);
  const Complex z{1.1, -0.3};
  const double h = 1e-6;
  const Complex fd = (forward_map(ctx, z + h) - forward_map(ctx, z - h)) / (2 * h);
  EXPECT_LT(std::abs(fd - forward_derivative(ctx, z)), 1e-9);
  const Complex w = forward_map(ctx, z);
  const Complex fd2 = (inverse_map(ctx, w + h) - inverse_map(ctx, w - h)) / (2 * h);
  EXPECT_LT(std::abs(fd2 - inverse_derivative(ctx, w)), 1e-8);
}

TEST(Map, SingularPoints) {
  const auto ctx = MobiusContext::make(0.5, kMu1);
  EXPECT_THROW(forward_map(ctx, Complex{-2.0, 0.0}), Singularity);
  EXPECT_THROW(inverse_map(ctx, Complex{1.0, 0.0}), Singularity);
}

// The arctangent forms only fix the angle modulo pi.
double mod_pi(double a) { return std::remainder(a, std::numbers::pi); }

TEST(PhaseShift, ClosedFormsAgree) {
  for (auto kind : {RootKind::Smaller, RootKind::Larger}) {
    const auto ctx = MobiusContext::make(0.5, kMu1, kind);
    for (const Complex z : {Complex{1.2, 0.3}, Complex{-0.4, 1.1}, Complex{0.9, -1.0}}) {
      EXPECT_NEAR(mod_pi(chi(ctx, z) - chi_closed_form(ctx, z)), 0.0, 1e-12);
      const Complex w = forward_map(ctx, z);
      EXPECT_NEAR(mod_pi(zeta(ctx, w) - zeta_closed_form(ctx, w)), 0.0, 1e-12);
    }
  }
}

TEST(PhaseShift, ZetaDotSignForLargerRoot) {
  // alpha / (1 - alpha^2) < 0 here; compare against a finite difference.
  const auto ctx = MobiusContext::make(0.5, kMu1, RootKind::Larger);
  const Complex rho = forward_map(ctx, Complex{1.1, 0.4});
  const double s = 0.05, g = 0.7, h = 1e-6;
  const Complex d = s * std::polar(1.0, g);
  const double fd = (zeta(ctx, rho + h * d) - zeta(ctx, rho - h * d)) / (2 * h);
  EXPECT_NEAR(zeta_dot(ctx, rho, s, g), fd, 1e-7);
}

TEST(Frame, NormalizeCircles) {
  // Desired circle radius 2 at (1, 1); boundary radius 2 sqrt(2.5) at (2, 1).
  auto [pair, frame] = normalize_circles({1, 1}, 2.0, {2, 1}, 2.0 * kMu1);
  EXPECT_NEAR(pair.lambda(), 0.5, 1e-14);
  EXPECT_NEAR(pair.mu(), kMu1, 1e-14);
  const Complex z{3.0, 1.0};
  EXPECT_NEAR(std::abs(frame.to_canonical(z)), 1.0, 1e-14);
  EXPECT_LT(std::abs(frame.from_canonical(frame.to_canonical(z)) - z), 1e-14);
  EXPECT_DOUBLE_EQ(frame.speed_to_canonical(1.0), 0.5);
}

TEST(Frame, RotatedBoundaryMapsToPositiveLambda) {
  auto [pair, frame] = normalize_circles({0, 0}, 1.0, {0, -0.5}, kMu1);
  EXPECT_NEAR(pair.lambda(), 0.5, 1e-14);
  EXPECT_NEAR(std::abs(frame.to_canonical({0, -0.5}) - 0.5), 0.0, 1e-14);
  const double th = 0.3;
  EXPECT_NEAR(frame.heading_from_canonical(frame.heading_to_canonical(th)), th, 1e-14);
}

TEST(WrapAngle, Range) {
  EXPECT_NEAR(wrap_angle(3 * std::numbers::pi), std::numbers::pi, 1e-12);
  EXPECT_NEAR(wrap_angle(-0.5), -0.5, 0);
  EXPECT_NEAR(wrap_angle(7.0), 7.0 - 2 * std::numbers::pi, 1e-15);
}

}  // namespace
