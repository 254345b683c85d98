#include "mobius_flock/dynamics.hpp"

#include <cmath>

#include "mobius_flock/errors.hpp"

namespace mobius_flock {

namespace {
constexpr Complex kI{0.0, 1.0};
}

OriginalDerivative original_derivatives(const AgentStateOriginal& x, double u,
                                        double omega) {
  return {x.v * std::polar(1.0, x.theta), u, omega};
}

TransformedDerivative transformed_derivatives(const AgentStateTransformed& x,
                                              double nu, double Omega) {
  return {x.s * std::polar(1.0, x.gamma), nu, Omega};
}

AgentStateTransformed to_transformed(const MobiusContext& ctx,
                                     const AgentStateOriginal& x) {
  const Complex df = forward_derivative(ctx, x.r);
  return {forward_map(ctx, x.r), std::abs(df) * x.v, x.theta + std::arg(df)};
}

AgentStateOriginal to_original(const MobiusContext& ctx,
                               const AgentStateTransformed& y) {
  const Complex dg = inverse_derivative(ctx, y.rho);
  return {inverse_map(ctx, y.rho), std::abs(dg) * y.s, y.gamma + std::arg(dg)};
}

Complex error_original(const AgentStateOriginal& x, Direction dir) {
  const double sgn = dir == Direction::Anticlockwise ? 1.0 : -1.0;
  return x.r + sgn * kI * std::polar(1.0, x.theta);
}

Complex error_transformed(const MobiusContext& ctx, const AgentStateTransformed& y,
                          Direction dir) {
  const double sgn = dir == Direction::Anticlockwise ? 1.0 : -1.0;
  return y.rho + sgn * kI * ctx.sigma * std::polar(1.0, y.gamma);
}

PhaseOrder order_of_angles(std::span<const double> angles) {
  PhaseOrder p;
  if (angles.empty()) return p;
  for (double a : angles) p.q += std::polar(1.0, a);
  p.q /= static_cast<double>(angles.size());
  p.magnitude = std::abs(p.q);
  p.resultant_angle = std::arg(p.q);
  return p;
}

PhaseOrder order_parameter(const MobiusContext& ctx,
                           std::span<const AgentStateOriginal> states) {
  std::vector<double> big_theta;
  big_theta.reserve(states.size());
  for (const auto& x : states) big_theta.push_back(x.theta + chi(ctx, x.r));
  return order_of_angles(big_theta);
}

PhaseOrder order_parameter_transformed(std::span<const AgentStateTransformed> states) {
  std::vector<double> g;
  g.reserve(states.size());
  for (const auto& y : states) g.push_back(y.gamma);
  return order_of_angles(g);
}

}  // namespace mobius_flock
