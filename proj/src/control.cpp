#include "mobius_flock/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mobius_flock/errors.hpp"

namespace mobius_flock {

namespace {

constexpr Complex kI{0.0, 1.0};

double inner(Complex a, Complex b) { return std::real(std::conj(a) * b); }

double coupling(double gamma_k, std::span<const double> neighbor_gamma) {
  double acc = 0.0;
  for (double gj : neighbor_gamma) acc += std::sin(gj - gamma_k);
  return -acc;
}

[[noreturn]] void barrier_fail(const detail::LawTerms& t) {
  std::ostringstream os;
  os << "barrier saturated (delta_T^2-|E|^2=" << t.gap_T
     << ", delta_S^2-s_tilde^2=" << t.gap_S
     << "); the step is likely too coarse, try halving dt";
  throw BarrierViolation(os.str());
}

detail::LawTerms law_for(const MobiusContext& ctx, const ControllerGains& gains,
                         const AgentStateTransformed& y, double G) {
  const Complex eg = std::polar(1.0, y.gamma);
  const Complex E = y.rho + kI * ctx.sigma * eg;
  return detail::transformed_law(ctx.delta_T, ctx.sigma, gains, inner(y.rho, eg),
                                 std::norm(E), y.s - gains.s_d, G);
}

}  // namespace

void ControllerGains::validate() const {
  if (!(kappa1 > 0.0)) {
    throw WrongGainSign("kappa1 must be positive, got " + std::to_string(kappa1));
  }
  if (!(kappa2 > 0.0)) {
    throw WrongGainSign("kappa2 must be positive, got " + std::to_string(kappa2));
  }
  if (K == 0.0 || !std::isfinite(K)) throw InvalidGains("coupling gain K must be nonzero");
  if (!(delta_S > 0.0)) throw InvalidGains("delta_S must be positive");
  if (!(s_d >= delta_S)) {
    throw InvalidGains("s_d must be >= delta_S to keep speeds positive");
  }
}

void ControllerGains::validate(Pattern pattern) const {
  validate();
  if (pattern == Pattern::Sync && !(K < 0.0)) {
    throw WrongGainSign("synchronization requires K < 0, got " + std::to_string(K));
  }
  if (pattern == Pattern::Balance && !(K > 0.0)) {
    throw WrongGainSign("balancing requires K > 0, got " + std::to_string(K));
  }
}

NeighborhoodT neighborhood(const InteractionGraph& g,
                           std::span<const AgentStateTransformed> states, int k) {
  NeighborhoodT nb{states[k], {}};
  for (int j : g.neighbors(k)) nb.neighbor_gamma.push_back(states[j].gamma);
  return nb;
}

NeighborhoodO neighborhood(const InteractionGraph& g,
                           std::span<const AgentStateOriginal> states, int k) {
  NeighborhoodO nb{states[k], {}};
  for (int j : g.neighbors(k)) nb.neighbors.push_back(states[j]);
  return nb;
}

double nu_transformed(const MobiusContext& ctx, const ControllerGains& gains,
                      const AgentStateTransformed& y) {
  const auto t = law_for(ctx, gains, y, 0.0);
  if (!t.ok) barrier_fail(t);
  return t.nu;
}

double Omega_transformed(const MobiusContext& ctx, const ControllerGains& gains,
                         const NeighborhoodT& nb) {
  const auto t = law_for(ctx, gains, nb.self, coupling(nb.self.gamma, nb.neighbor_gamma));
  if (!t.ok) barrier_fail(t);
  return t.Omega;
}

double Omega_transformed(const InteractionGraph& g, const MobiusContext& ctx,
                         const ControllerGains& gains,
                         std::span<const AgentStateTransformed> states, int k) {
  return Omega_transformed(ctx, gains, neighborhood(g, states, k));
}

double h_term(const MobiusContext& ctx, const ControllerGains& gains,
              const AgentStateOriginal& x) {
  return std::abs(forward_derivative(ctx, x.r)) * x.v - gains.s_d;
}

double m_term(const MobiusContext& ctx, const AgentStateOriginal& x) {
  return inner(forward_map(ctx, x.r), std::polar(1.0, x.theta + chi(ctx, x.r)));
}

Complex n_term(const MobiusContext& ctx, const AgentStateOriginal& x) {
  return forward_map(ctx, x.r) + kI * ctx.sigma * std::polar(1.0, x.theta + chi(ctx, x.r));
}

double tau_term(const MobiusContext& ctx, const AgentStateOriginal& self,
                std::span<const AgentStateOriginal> neighbors) {
  const double chi_k = chi(ctx, self.r);
  double acc = 0.0;
  for (const auto& xj : neighbors) {
    acc += std::sin((xj.theta - self.theta) + (chi(ctx, xj.r) - chi_k));
  }
  return -acc;
}

OriginalControl original_control(const MobiusContext& ctx,
                                 const ControllerGains& gains,
                                 const NeighborhoodO& nb) {
  const AgentStateOriginal& x = nb.self;
  const double a = ctx.alpha;
  const Complex w = 1.0 + a * x.r;
  const double w2 = std::norm(w);
  const double h = h_term(ctx, gains, x);
  const double m = m_term(ctx, x);
  const Complex n = n_term(ctx, x);
  const double tau = tau_term(ctx, x, nb.neighbors);
  const auto t = detail::transformed_law(ctx.delta_T, ctx.sigma, gains, m,
                                         std::norm(n), h, tau);
  if (!t.ok) barrier_fail(t);
  const Complex r_dot = x.v * std::polar(1.0, x.theta);
  OriginalControl c;
  c.nu = t.nu;
  c.Omega = t.Omega;
  c.u = std::abs(w * w / (a * (1.0 - a * a))) * t.nu + 2.0 * a * x.v * inner(w, r_dot) / w2;
  c.omega = t.Omega - chi_dot(ctx, x.r, x.v, x.theta);
  return c;
}

double u_original(const MobiusContext& ctx, const ControllerGains& gains,
                  const NeighborhoodO& nb) {
  return original_control(ctx, gains, nb).u;
}

double omega_original(const MobiusContext& ctx, const ControllerGains& gains,
                      const NeighborhoodO& nb) {
  return original_control(ctx, gains, nb).omega;
}

double u_from_transformed(const MobiusContext& ctx, const AgentStateTransformed& y,
                          double nu) {
  const double a = ctx.alpha;
  const Complex d = y.rho - 1.0;
  if (std::abs(d) <= kSingularityTol) throw Singularity("rho = 1");
  const double d2 = std::norm(d);
  const Complex rho_dot = y.s * std::polar(1.0, y.gamma);
  return std::abs((1.0 - a * a) / a) * (d2 * nu - 2.0 * y.s * inner(d, rho_dot)) / (d2 * d2);
}

double omega_from_transformed(const MobiusContext& ctx,
                              const AgentStateTransformed& y, double Omega) {
  return Omega + zeta_dot(ctx, y.rho, y.s, y.gamma);
}

std::string FeasibilityReport::summary() const {
  std::ostringstream os;
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const auto& a = agents[k];
    os << "agent " << k + 1 << ": |E|=" << a.abs_E << " |s~|=" << a.abs_s_tilde
       << " |n|=" << a.abs_n << " |h|=" << a.abs_h
       << (a.inside_boundary ? "" : " OUTSIDE-BOUNDARY")
       << (a.speed_positive ? "" : " NONPOSITIVE-SPEED") << (a.ok ? " ok" : " FAIL")
       << '\n';
  }
  return os.str();
}

FeasibilityReport feasibility_check(const MobiusContext& ctx,
                                    const ControllerGains& gains,
                                    std::span<const AgentStateOriginal> initial) {
  FeasibilityReport rep;
  rep.ok = !initial.empty();
  const double lam = ctx.pair.lambda();
  const double mu = ctx.pair.mu();
  for (const auto& x : initial) {
    AgentFeasibility a;
    a.inside_boundary = std::abs(x.r - lam) < mu;
    a.speed_positive = x.v > 0.0;
    try {
      const auto y = to_transformed(ctx, x);
      a.abs_E = std::abs(error_transformed(ctx, y));
      a.abs_s_tilde = std::abs(y.s - gains.s_d);
      a.abs_n = std::abs(n_term(ctx, x));
      a.abs_h = std::abs(h_term(ctx, gains, x));
      a.ok = a.inside_boundary && a.speed_positive && a.abs_E < ctx.delta_T &&
             a.abs_s_tilde < gains.delta_S && a.abs_n < ctx.delta_T &&
             a.abs_h < gains.delta_S;
    } catch (const Singularity&) {
      a.ok = false;
    }
    rep.ok = rep.ok && a.ok;
    rep.agents.push_back(a);
  }
  return rep;
}

LyapunovParts lyapunov_parts(const InteractionGraph& g, const MobiusContext& ctx,
                             const ControllerGains& gains,
                             std::span<const AgentStateTransformed> states) {
  LyapunovParts p{0.0, 0.0, 0.0};
  const double dT2 = ctx.delta_T * ctx.delta_T;
  const double dS2 = gains.delta_S * gains.delta_S;
  std::vector<double> gamma;
  gamma.reserve(states.size());
  for (const auto& y : states) {
    const double E2 = std::norm(error_transformed(ctx, y));
    const double st = y.s - gains.s_d;
    const double gT = dT2 - E2;
    const double gS = dS2 - st * st;
    if (!(gT > 0.0) || !(gS > 0.0)) {
      throw BarrierViolation("Lyapunov function undefined outside the barrier interior");
    }
    // log1p keeps precision when the gap is close to the full width.
    p.S += -0.5 * std::log1p(-E2 / dT2);
    p.H += -0.5 * std::log1p(-st * st / dS2);
    gamma.push_back(y.gamma);
  }
  p.U = potential_U(g, gamma);
  return p;
}

double lyapunov_sync(const InteractionGraph& g, const MobiusContext& ctx,
                     const ControllerGains& gains,
                     std::span<const AgentStateTransformed> states) {
  if (!(gains.K < 0.0)) throw WrongGainSign("V_s requires K < 0");
  const auto p = lyapunov_parts(g, ctx, gains, states);
  return gains.kappa1 * p.S - gains.K * p.U + p.H;
}

double lyapunov_balance(const InteractionGraph& g, const MobiusContext& ctx,
                        const ControllerGains& gains,
                        std::span<const AgentStateTransformed> states) {
  if (!(gains.K > 0.0)) throw WrongGainSign("V_b requires K > 0");
  if (!g.circulant()) throw NotCirculant("V_b requires a circulant graph");
  const auto p = lyapunov_parts(g, ctx, gains, states);
  const double top = 0.5 * g.n() * g.lambda_max();
  return gains.kappa1 * p.S + gains.K * (top - p.U) + p.H;
}

double lyapunov(Pattern pattern, const InteractionGraph& g, const MobiusContext& ctx,
                const ControllerGains& gains,
                std::span<const AgentStateTransformed> states) {
  return pattern == Pattern::Sync ? lyapunov_sync(g, ctx, gains, states)
                                  : lyapunov_balance(g, ctx, gains, states);
}

double lyapunov_rate(const InteractionGraph& g, const MobiusContext& ctx,
                     const ControllerGains& gains,
                     std::span<const AgentStateTransformed> states) {
  std::vector<double> gamma;
  for (const auto& y : states) gamma.push_back(y.gamma);
  const auto grad = potential_gradient(g, gamma);
  const double dT2 = ctx.delta_T * ctx.delta_T;
  double acc = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& y = states[k];
    const Complex eg = std::polar(1.0, y.gamma);
    const double X = inner(y.rho, eg) / (dT2 - std::norm(error_transformed(ctx, y)));
    const double st = y.s - gains.s_d;
    const double a = gains.kappa1 * X + (gains.K / ctx.sigma) * grad[k];
    acc += a * a + gains.kappa2 * st * st;
  }
  return -acc;
}

BoundEnvelope bound_envelope(const MobiusContext& ctx, const ControllerGains& gains,
                             double V0, Pattern pattern, const InteractionGraph& g) {
  BoundEnvelope b;
  b.V0 = V0;
  // sqrt(-expm1(x)) = sqrt(1 - e^x) without cancellation for tiny V0.
  b.c = std::sqrt(-std::expm1(-2.0 * V0 / gains.kappa1));
  b.ell = std::sqrt(-std::expm1(-2.0 * V0));
  const double a = std::abs(ctx.alpha);
  const double ro = ctx.radius_outer;
  b.eta_plus = (1.0 - b.c) * a + b.c * ro;
  b.eta_minus = (1.0 + b.c) * a - b.c * ro;
  b.E_max = ctx.delta_T * b.c;
  b.rho_min = std::min(b.eta_minus, b.eta_plus);
  b.rho_max = std::max(b.eta_minus, b.eta_plus);
  b.s_min = gains.s_d - gains.delta_S * b.ell;
  b.s_max = gains.s_d + gains.delta_S * b.ell;
  const double m = static_cast<double>(g.edge_count());
  if (pattern == Pattern::Sync) {
    b.edge_sum_min = 0.0;
    b.edge_sum_max = std::min(-2.0 * V0 / gains.K, 4.0 * m);
  } else {
    const double top = g.n() * g.lambda_max();
    b.edge_sum_min = std::max(0.0, top - 2.0 * V0 / gains.K);
    b.edge_sum_max = top;
  }
  const double al = ctx.alpha;
  const double e2 = b.eta_plus * b.eta_plus;
  b.disc_center = -(al * al - e2) / (al * (1.0 - e2));
  b.disc_radius = std::abs(b.eta_plus * (1.0 - al * al) / (al * (1.0 - e2)));
  return b;
}

}  // namespace mobius_flock
