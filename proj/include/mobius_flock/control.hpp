#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mobius_flock/dynamics.hpp"
#include "mobius_flock/geometry.hpp"
#include "mobius_flock/graph.hpp"

namespace mobius_flock {

enum class Pattern { Sync, Balance };

struct ControllerGains {
  double kappa1 = 0.004;
  double kappa2 = 10.0;
  double K = -0.04;
  double s_d = 0.06;
  double delta_S = 0.06;

  // Throws WrongGainSign for non-positive kappa1/kappa2, InvalidGains otherwise.
  void validate() const;
  // Additionally requires K < 0 for Sync, K > 0 for Balance.
  void validate(Pattern pattern) const;
};

// Floor applied to barrier gaps on the diagnostic path only.
inline constexpr double kGapFloor = 1e-14;

namespace detail {

// Shared by the public controllers and the simulation kernels.  ok == false
// means a barrier is saturated; nu/Omega are then computed with floored gaps.
template <class R>
struct LawTermsT {
  R nu;
  R Omega;
  R gap_T;  // delta_T^2 - |E|^2
  R gap_S;  // delta_S^2 - s_tilde^2
  bool ok;
};
using LawTerms = LawTermsT<double>;

template <class R>
inline LawTermsT<R> transformed_law_t(R delta_T, R sigma, const ControllerGains& gains, R p,
                                      R E2, R s_tilde, R G) {
  LawTermsT<R> t;
  const R dS = gains.delta_S, s_d = gains.s_d, k1 = gains.kappa1, k2 = gains.kappa2;
  t.gap_T = delta_T * delta_T - E2;
  t.gap_S = dS * dS - s_tilde * s_tilde;
  t.ok = t.gap_T > 0 && t.gap_S > 0;
  const R floor = kGapFloor;
  const R gT = t.gap_T > floor ? t.gap_T : floor;
  const R x = k1 * p / gT;
  t.nu = -t.gap_S * (x + k2 * s_tilde);
  t.Omega = (s_d + x + (R(gains.K) / sigma) * G) / sigma;
  return t;
}

inline LawTerms transformed_law(double delta_T, double sigma,
                                const ControllerGains& gains, double p,
                                double E2, double s_tilde, double G) {
  return transformed_law_t<double>(delta_T, sigma, gains, p, E2, s_tilde, G);
}

}  // namespace detail

// What agent k may see: its own state and its neighbors' headings.
struct NeighborhoodT {
  AgentStateTransformed self;
  std::vector<double> neighbor_gamma;
};

// Own original-plane state and neighbors' (r, theta).
struct NeighborhoodO {
  AgentStateOriginal self;
  std::vector<AgentStateOriginal> neighbors;
};

NeighborhoodT neighborhood(const InteractionGraph& g,
                           std::span<const AgentStateTransformed> states, int k);
NeighborhoodO neighborhood(const InteractionGraph& g,
                           std::span<const AgentStateOriginal> states, int k);

double nu_transformed(const MobiusContext& ctx, const ControllerGains& gains,
                      const AgentStateTransformed& y);
double Omega_transformed(const MobiusContext& ctx, const ControllerGains& gains,
                         const NeighborhoodT& nb);
double Omega_transformed(const InteractionGraph& g, const MobiusContext& ctx,
                         const ControllerGains& gains,
                         std::span<const AgentStateTransformed> states, int k);

struct OriginalControl {
  double u;
  double omega;
  double nu;     // via h_k, m_k, n_k
  double Omega;  // via h_k, m_k, n_k, tau_k
};

OriginalControl original_control(const MobiusContext& ctx,
                                 const ControllerGains& gains,
                                 const NeighborhoodO& nb);
double u_original(const MobiusContext& ctx, const ControllerGains& gains,
                  const NeighborhoodO& nb);
double omega_original(const MobiusContext& ctx, const ControllerGains& gains,
                      const NeighborhoodO& nb);

double u_from_transformed(const MobiusContext& ctx, const AgentStateTransformed& y,
                          double nu);
double omega_from_transformed(const MobiusContext& ctx,
                              const AgentStateTransformed& y, double Omega);

// Original-plane helper quantities.
double h_term(const MobiusContext& ctx, const ControllerGains& gains,
              const AgentStateOriginal& x);
double m_term(const MobiusContext& ctx, const AgentStateOriginal& x);
Complex n_term(const MobiusContext& ctx, const AgentStateOriginal& x);
double tau_term(const MobiusContext& ctx, const AgentStateOriginal& self,
                std::span<const AgentStateOriginal> neighbors);

struct AgentFeasibility {
  double abs_E = 0;        // transformed plane
  double abs_s_tilde = 0;  // transformed plane
  double abs_n = 0;        // original plane
  double abs_h = 0;        // original plane
  bool inside_boundary = false;
  bool speed_positive = false;
  bool ok = false;
};

struct FeasibilityReport {
  std::vector<AgentFeasibility> agents;
  bool ok = false;
  std::string summary() const;
};

FeasibilityReport feasibility_check(const MobiusContext& ctx,
                                    const ControllerGains& gains,
                                    std::span<const AgentStateOriginal> initial);

struct LyapunovParts {
  double S;  // position barrier sum
  double H;  // speed barrier sum
  double U;
};

LyapunovParts lyapunov_parts(const InteractionGraph& g, const MobiusContext& ctx,
                             const ControllerGains& gains,
                             std::span<const AgentStateTransformed> states);
double lyapunov_sync(const InteractionGraph& g, const MobiusContext& ctx,
                     const ControllerGains& gains,
                     std::span<const AgentStateTransformed> states);
double lyapunov_balance(const InteractionGraph& g, const MobiusContext& ctx,
                        const ControllerGains& gains,
                        std::span<const AgentStateTransformed> states);
double lyapunov(Pattern pattern, const InteractionGraph& g, const MobiusContext& ctx,
                const ControllerGains& gains,
                std::span<const AgentStateTransformed> states);
// Closed-form time derivative along the closed loop.
double lyapunov_rate(const InteractionGraph& g, const MobiusContext& ctx,
                     const ControllerGains& gains,
                     std::span<const AgentStateTransformed> states);

struct BoundEnvelope {
  double V0 = 0;
  double c = 0;
  double ell = 0;
  double eta_plus = 0;
  double eta_minus = 0;
  double E_max = 0;      // delta_T c
  double rho_min = 0;    // min(eta_-, eta_+)
  double rho_max = 0;    // max(eta_-, eta_+)
  double s_min = 0;
  double s_max = 0;
  double edge_sum_min = 0;
  double edge_sum_max = 0;
  Complex disc_center;   // original-plane disc
  double disc_radius = 0;
};

BoundEnvelope bound_envelope(const MobiusContext& ctx, const ControllerGains& gains,
                             double V0, Pattern pattern, const InteractionGraph& g);

}  // namespace mobius_flock
