#pragma once

#include <span>
#include <vector>

#include "mobius_flock/geometry.hpp"

namespace mobius_flock {

struct AgentStateOriginal {
  Complex r{0.0, 0.0};
  double v = 0.0;
  double theta = 0.0;  // unwrapped
};

struct AgentStateTransformed {
  Complex rho{0.0, 0.0};
  double s = 0.0;
  double gamma = 0.0;  // unwrapped
};

struct OriginalDerivative {
  Complex r_dot;
  double v_dot;
  double theta_dot;
};

struct TransformedDerivative {
  Complex rho_dot;
  double s_dot;
  double gamma_dot;
};

struct PhaseOrder {
  Complex q{0.0, 0.0};
  double magnitude = 0.0;
  double resultant_angle = 0.0;
};

enum class Direction { Anticlockwise, Clockwise };

OriginalDerivative original_derivatives(const AgentStateOriginal& x, double u,
                                        double omega);
TransformedDerivative transformed_derivatives(const AgentStateTransformed& x,
                                              double nu, double Omega);

AgentStateTransformed to_transformed(const MobiusContext& ctx,
                                     const AgentStateOriginal& x);
AgentStateOriginal to_original(const MobiusContext& ctx,
                               const AgentStateTransformed& y);

// e = r + i e^{i theta} for anticlockwise motion, r - i e^{i theta} otherwise.
Complex error_original(const AgentStateOriginal& x,
                       Direction dir = Direction::Anticlockwise);
// E = rho + i sigma e^{i gamma} (sign of the i term flips for clockwise).
Complex error_transformed(const MobiusContext& ctx, const AgentStateTransformed& y,
                          Direction dir = Direction::Anticlockwise);

PhaseOrder order_parameter(const MobiusContext& ctx,
                           std::span<const AgentStateOriginal> states);
PhaseOrder order_parameter_transformed(std::span<const AgentStateTransformed> states);
// Plain (1/N) sum e^{i angle}.
PhaseOrder order_of_angles(std::span<const double> angles);

}  // namespace mobius_flock
