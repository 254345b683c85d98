#pragma once

#include <complex>
#include <utility>

namespace mobius_flock {

using Complex = std::complex<double>;

// Guard used for |1 + alpha z| and |w - 1|.
inline constexpr double kSingularityTol = 1e-12;

// Desired circle is the unit circle at the origin; the boundary circle has
// radius mu and center lambda on the real axis.
class CanonicalCirclePair {
 public:
  CanonicalCirclePair(double lambda, double mu);

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }

 private:
  double lambda_;
  double mu_;
};

// Affine map from user coordinates into the canonical frame:
//   z_c = (z - translation) * conj(rotation) * scale
struct FrameTransform {
  Complex translation{0.0, 0.0};
  Complex rotation{1.0, 0.0};  // unit modulus
  double scale = 1.0;

  Complex to_canonical(Complex z) const;
  Complex from_canonical(Complex zc) const;
  double speed_to_canonical(double v) const { return v * scale; }
  double speed_from_canonical(double vc) const { return vc / scale; }
  double heading_to_canonical(double theta) const;
  double heading_from_canonical(double theta_c) const;
};

std::pair<CanonicalCirclePair, FrameTransform> normalize_circles(
    Complex desired_center, double desired_radius, Complex boundary_center,
    double boundary_radius);

struct AlphaRoots {
  double alpha_s;  // smaller modulus
  double alpha_l;  // larger modulus
};

AlphaRoots solve_alpha(const CanonicalCirclePair& pair);
// Unvalidated variant used for diagnostics on raw circle data.
AlphaRoots solve_alpha(double lambda, double mu);

// lambda alpha^2 + (lambda^2 - mu^2 + 1) alpha + lambda
double alpha_residual(double lambda, double mu, double alpha);

enum class RootKind { Smaller, Larger };

struct MobiusContext {
  CanonicalCirclePair pair{0.5, 2.0};
  double alpha = 0.0;
  double beta = 0.0;
  RootKind root_kind = RootKind::Smaller;
  double sigma = 0.0;
  double radius_inner = 0.0;  // |alpha|, image of the desired circle
  double radius_outer = 0.0;  // |(lambda + alpha)/mu|, image of the boundary
  double delta_T = 0.0;

  static MobiusContext make(const CanonicalCirclePair& pair,
                            RootKind kind = RootKind::Smaller);
  static MobiusContext make(double lambda, double mu,
                            RootKind kind = RootKind::Smaller) {
    return make(CanonicalCirclePair(lambda, mu), kind);
  }
};

Complex forward_map(const MobiusContext& ctx, Complex z);
Complex inverse_map(const MobiusContext& ctx, Complex w);
Complex forward_derivative(const MobiusContext& ctx, Complex z);
Complex inverse_derivative(const MobiusContext& ctx, Complex w);

// Phase shifts: arguments of the conformal derivatives.
double chi(const MobiusContext& ctx, Complex r);
double zeta(const MobiusContext& ctx, Complex rho);

// Single-argument arctan closed forms.  They agree with chi/zeta modulo pi;
// modulo 2*pi only while the arctan denominator stays positive and
// alpha(1 - alpha^2) > 0.
double chi_closed_form(const MobiusContext& ctx, Complex r);
double zeta_closed_form(const MobiusContext& ctx, Complex rho);

double chi_dot(const MobiusContext& ctx, Complex r, double v, double theta);
double zeta_dot(const MobiusContext& ctx, Complex rho, double s, double gamma);

double delta_T(const MobiusContext& ctx);

// Wrap into (-pi, pi].
double wrap_angle(double a);

}  // namespace mobius_flock
