#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mobius_flock/dynamics.hpp"

using namespace mobius_flock;

namespace {

const MobiusContext& ctx() {
  static const MobiusContext c = MobiusContext::make(0.5, std::sqrt(2.5));
  return c;
}

TEST(Unicycle, Derivatives) {
  const AgentStateOriginal x{{1.0, 0.2}, 0.3, std::numbers::pi / 2};
  const auto d = original_derivatives(x, 0.1, -0.2);
  EXPECT_NEAR(d.r_dot.real(), 0.0, 1e-16);
  EXPECT_NEAR(d.r_dot.imag(), 0.3, 1e-16);
  EXPECT_DOUBLE_EQ(d.v_dot, 0.1);
  EXPECT_DOUBLE_EQ(d.theta_dot, -0.2);
}

TEST(PlaneMap, RoundTrip) {
  for (int k = 0; k < 10; ++k) {
    const AgentStateOriginal x{std::polar(1.1 + 0.02 * k, 0.6 * k), 0.05 + 0.01 * k, 0.3 * k};
    const auto y = to_transformed(ctx(), x);
    const auto z = to_original(ctx(), y);
    EXPECT_LT(std::abs(z.r - x.r), 1e-14);
    EXPECT_NEAR(z.v, x.v, 1e-15);
    EXPECT_NEAR(wrap_angle(z.theta - x.theta), 0.0, 1e-14);
  }
}

TEST(PlaneMap, VelocityIsPushedForward) {
  const AgentStateOriginal x{{1.2, -0.4}, 0.1, 0.8};
  const auto y = to_transformed(ctx(), x);
  const Complex rdot = x.v * std::polar(1.0, x.theta);
  const Complex rhodot = forward_derivative(ctx(), x.r) * rdot;
  EXPECT_NEAR(std::abs(rhodot), y.s, 1e-15);
  EXPECT_NEAR(wrap_angle(std::arg(rhodot) - y.gamma), 0.0, 1e-14);
  EXPECT_NEAR(wrap_angle(y.gamma - x.theta - chi(ctx(), x.r)), 0.0, 1e-14);
}

TEST(Error, ZeroOnDesiredOrbit) {
  // Anticlockwise on the unit circle: r = e^{i phi}, theta = phi + pi / 2.
  const double phi = 0.9;
  const AgentStateOriginal x{std::polar(1.0, phi), 0.06, phi + std::numbers::pi / 2};
  EXPECT_LT(std::abs(error_original(x)), 1e-15);
  EXPECT_GT(std::abs(error_original(x, Direction::Clockwise)), 1.9);
  // The image of the orbit is the inner circle of the annulus, traversed with
  // heading gamma such that rho = -i sigma e^{i gamma}.
  const auto y = to_transformed(ctx(), x);
  EXPECT_LT(std::abs(error_transformed(ctx(), y)), 1e-14);
}

TEST(Order, Magnitudes) {
  const std::vector<double> same{0.3, 0.3, 0.3};
  EXPECT_NEAR(order_of_angles(same).magnitude, 1.0, 1e-15);
  std::vector<double> splay(6);
  for (int k = 0; k < 6; ++k) splay[k] = 2.0 * std::numbers::pi * k / 6.0;
  EXPECT_NEAR(order_of_angles(splay).magnitude, 0.0, 1e-15);
  EXPECT_NEAR(order_of_angles(std::vector<double>{0.0, std::numbers::pi / 2}).resultant_angle,
              std::numbers::pi / 4, 1e-15);
}

TEST(Order, PhaseShiftedMatchesTransformed) {
  std::vector<AgentStateOriginal> xs;
  std::vector<AgentStateTransformed> ys;
  for (int k = 0; k < 5; ++k) {
    xs.push_back({std::polar(1.15, 1.2 * k), 0.07, 0.4 * k - 1.0});
    ys.push_back(to_transformed(ctx(), xs.back()));
  }
  const auto a = order_parameter(ctx(), xs);
  const auto b = order_parameter_transformed(ys);
  EXPECT_LT(std::abs(a.q - b.q), 1e-14);
}

}  // namespace
