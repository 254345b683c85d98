#include "mobius_flock/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mobius_flock/errors.hpp"

namespace mobius_flock {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt_pair(double lambda, double mu) {
  return "lambda=" + std::to_string(lambda) + ", mu=" + std::to_string(mu);
}

}  // namespace

CanonicalCirclePair::CanonicalCirclePair(double lambda, double mu)
    : lambda_(lambda), mu_(mu) {
  if (!std::isfinite(lambda) || !std::isfinite(mu)) {
    throw GeometryViolation("non-finite circle data");
  }
  if (lambda == 0.0) {
    throw ConcentricCircles(
        "boundary and desired circles share a center; use the concentric "
        "formulation instead");
  }
  if (!(mu > 0.0)) throw GeometryViolation("boundary radius must be positive");
  const double touch = 1.0 + std::abs(lambda);
  if (std::abs(mu - touch) <= kSingularityTol * touch) {
    throw GeometryViolation(
        "circles touch (mu = 1 + |lambda|); Assumption 1 requires "
        "non-touching, non-intersecting circles (" +
        fmt_pair(lambda, mu) + ")");
  }
  if (mu < touch) {
    throw GeometryViolation(
        "boundary circle does not enclose the desired circle; Assumption 1 "
        "requires non-touching, non-intersecting circles (" +
        fmt_pair(lambda, mu) + ")");
  }
}

Complex FrameTransform::to_canonical(Complex z) const {
  return (z - translation) * std::conj(rotation) * scale;
}

Complex FrameTransform::from_canonical(Complex zc) const {
  return zc / scale * rotation + translation;
}

double FrameTransform::heading_to_canonical(double theta) const {
  return theta - std::arg(rotation);
}

double FrameTransform::heading_from_canonical(double theta_c) const {
  return theta_c + std::arg(rotation);
}

std::pair<CanonicalCirclePair, FrameTransform> normalize_circles(
    Complex desired_center, double desired_radius, Complex boundary_center,
    double boundary_radius) {
  if (!(desired_radius > 0.0) || !(boundary_radius > 0.0)) {
    throw GeometryViolation("circle radii must be positive");
  }
  const Complex offset = boundary_center - desired_center;
  const double dist = std::abs(offset);
  if (dist <= kSingularityTol * desired_radius) {
    throw ConcentricCircles("desired and boundary circles are concentric");
  }
  FrameTransform frame;
  frame.translation = desired_center;
  frame.rotation = offset / dist;
  frame.scale = 1.0 / desired_radius;
  // Snap exact axis-aligned offsets so the identity case stays bitwise exact.
  if (offset.imag() == 0.0 && offset.real() > 0.0) frame.rotation = 1.0;

  CanonicalCirclePair pair(dist / desired_radius,
                           boundary_radius / desired_radius);
  return {pair, frame};
}

double alpha_residual(double lambda, double mu, double alpha) {
  return lambda * alpha * alpha + (lambda * lambda - mu * mu + 1.0) * alpha +
         lambda;
}

AlphaRoots solve_alpha(double lambda, double mu) {
  if (lambda == 0.0) {
    throw ConcentricCircles("lambda = 0 gives a degenerate quadratic");
  }
  const double b = lambda * lambda - mu * mu + 1.0;
  // (b^2 - 4 lambda^2) factored to avoid cancellation near touching circles.
  const double disc = (b - 2.0 * lambda) * (b + 2.0 * lambda);
  if (disc <= kSingularityTol) {
    throw IntersectingCircles("discriminant " + std::to_string(disc) +
                              " <= 0 for " + fmt_pair(lambda, mu));
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  double r1 = q / lambda;
  double r2 = lambda / q;
  if (std::abs(r1) > std::abs(r2)) std::swap(r1, r2);
  for (double r : {r1, r2}) {
    if (std::abs(r - 1.0) < kSingularityTol ||
        std::abs(r + 1.0) < kSingularityTol) {
      throw DegenerateRoot("root " + std::to_string(r) + " is +-1");
    }
  }
  return {r1, r2};
}

AlphaRoots solve_alpha(const CanonicalCirclePair& pair) {
  return solve_alpha(pair.lambda(), pair.mu());
}

MobiusContext MobiusContext::make(const CanonicalCirclePair& pair,
                                  RootKind kind) {
  const AlphaRoots roots = solve_alpha(pair);
  MobiusContext ctx;
  ctx.pair = pair;
  ctx.root_kind = kind;
  ctx.alpha = kind == RootKind::Smaller ? roots.alpha_s : roots.alpha_l;
  ctx.beta = 1.0 / ctx.alpha;
  ctx.sigma = kind == RootKind::Smaller ? std::abs(ctx.alpha)
                                        : -std::abs(ctx.alpha);
  ctx.radius_inner = std::abs(ctx.alpha);
  ctx.radius_outer = std::abs((pair.lambda() + ctx.alpha) / pair.mu());
  ctx.delta_T = mobius_flock::delta_T(ctx);
  if (!(ctx.delta_T > 0.0)) {
    throw GeometryViolation("annulus width is not positive");
  }
  return ctx;
}

Complex forward_map(const MobiusContext& ctx, Complex z) {
  const double a = ctx.alpha;
  const Complex den = 1.0 + a * z;
  if (std::abs(den) <= kSingularityTol) {
    throw Singularity("forward map evaluated at z = -1/alpha");
  }
  return a * (z + a) / den;
}

Complex inverse_map(const MobiusContext& ctx, Complex w) {
  const double a = ctx.alpha;
  const Complex wm1 = w - 1.0;
  if (std::abs(wm1) <= kSingularityTol) {
    throw Singularity("inverse map evaluated at w = 1");
  }
  return (a * a - w) / (a * wm1);
}

Complex forward_derivative(const MobiusContext& ctx, Complex z) {
  const double a = ctx.alpha;
  const Complex den = 1.0 + a * z;
  if (std::abs(den) <= kSingularityTol) {
    throw Singularity("forward derivative evaluated at z = -1/alpha");
  }
  return a * (1.0 - a * a) / (den * den);
}

Complex inverse_derivative(const MobiusContext& ctx, Complex w) {
  const double a = ctx.alpha;
  const Complex wm1 = w - 1.0;
  if (std::abs(wm1) <= kSingularityTol) {
    throw Singularity("inverse derivative evaluated at w = 1");
  }
  return (1.0 - a * a) / (a * wm1 * wm1);
}

double chi(const MobiusContext& ctx, Complex r) {
  return std::arg(forward_derivative(ctx, r));
}

double zeta(const MobiusContext& ctx, Complex rho) {
  return std::arg(inverse_derivative(ctx, rho));
}

double chi_closed_form(const MobiusContext& ctx, Complex r) {
  const double a = ctx.alpha;
  const double m = std::abs(r);
  const double phi = std::arg(r);
  const double num = 2 * a * m * std::sin(phi) + a * a * m * m * std::sin(2 * phi);
  const double den =
      1 + 2 * a * m * std::cos(phi) + a * a * m * m * std::cos(2 * phi);
  return -std::atan(num / den);
}

double zeta_closed_form(const MobiusContext& /*ctx*/, Complex rho) {
  const double m = std::abs(rho);
  const double psi = std::arg(rho);
  const double num = -2 * m * std::sin(psi) + m * m * std::sin(2 * psi);
  const double den = 1 - 2 * m * std::cos(psi) + m * m * std::cos(2 * psi);
  return -std::atan(num / den);
}

double chi_dot(const MobiusContext& ctx, Complex r, double v, double theta) {
  const double a = ctx.alpha;
  const Complex den = 1.0 + a * r;
  const double d2 = std::norm(den);
  if (std::sqrt(d2) <= kSingularityTol) {
    throw Singularity("chi_dot evaluated at z = -1/alpha");
  }
  const double m = std::abs(r);
  const double phi = std::arg(r);
  return -2.0 * a * v * (std::sin(theta) + a * m * std::sin(theta - phi)) / d2;
}

// d/dt arg(1/(rho-1)^2) = -2 Im(rho_dot / (rho - 1)).  Written with s this is
// exact for either sign of alpha/(1 - alpha^2).
double zeta_dot(const MobiusContext& /*ctx*/, Complex rho, double s,
                double gamma) {
  const Complex wm1 = rho - 1.0;
  const double d2 = std::norm(wm1);
  if (std::sqrt(d2) <= kSingularityTol) {
    throw Singularity("zeta_dot evaluated at w = 1");
  }
  const double m = std::abs(rho);
  const double psi = std::arg(rho);
  return -2.0 * s * (m * std::sin(gamma - psi) - std::sin(gamma)) / d2;
}

double delta_T(const MobiusContext& ctx) {
  const double inner = std::abs(ctx.alpha);
  const double outer = std::abs((ctx.pair.lambda() + ctx.alpha) / ctx.pair.mu());
  return ctx.root_kind == RootKind::Smaller ? outer - inner : inner - outer;
}

double wrap_angle(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -std::numbers::pi) w += kTwoPi;
  return w;
}

}  // namespace mobius_flock
