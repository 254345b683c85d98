#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mobius_flock/control.hpp"
#include "mobius_flock/dynamics.hpp"
#include "mobius_flock/geometry.hpp"
#include "mobius_flock/graph.hpp"
#include "mobius_flock/kernels.hpp"

namespace mobius_flock {

enum class Plane { Original, Transformed, CrossCheck };
enum class KernelChoice { Auto, Serial, OpenMP };

struct SimConfig {
  double dt = 1e-3;
  double t_final = 500.0;
  Plane plane = Plane::Original;
  Pattern pattern = Pattern::Sync;
  ControllerGains gains;
  InteractionGraph graph = cycle_graph(5);
  MobiusContext ctx = MobiusContext::make(0.5, 2.0);
  std::vector<AgentStateOriginal> initial_states;  // original plane
  int log_stride = 10;
  std::uint64_t seed = 0;
  KernelChoice kernel = KernelChoice::Auto;
  // Step-doubling tolerance per substep at dt = 1e-3; scales as dt^5.
  double refine_tol = 1e-12;
  // Smallest substep is dt * 2^-max_refine_depth.
  int max_refine_depth = 30;
  // Upper bound on RK4 substeps per run; 0 disables it.
  long max_substeps = 50'000'000;
  // Integrate in long double (x87 extended); samples and monitors stay double.
  bool extended_precision = false;
  // dt above 0.01 is refused unless this is set (monitor-sensitivity demos).
  bool allow_coarse_dt = false;

  void validate() const;
};

// Random feasible initial states (uniform in the barrier interiors).
std::vector<AgentStateOriginal> random_feasible_states(const MobiusContext& ctx,
                                                       const ControllerGains& gains,
                                                       int n, std::uint64_t seed);

struct AgentSample {
  Complex r;
  double v, theta;
  Complex rho;
  double s, gamma;
  Complex e, E;
  double u, omega, nu, Omega;
};

struct Sample {
  double t = 0;
  std::vector<AgentSample> agents;
  double V = 0;
  double abs_q = 0;
  double U = 0;
};

struct TrajectoryLog {
  std::vector<Sample> samples;
};

struct MonitorReport {
  bool boundary_ok = true;
  bool barrier_ok = true;
  bool speed_positive = true;
  bool lyapunov_monotone = true;
  double max_lyapunov_increment = 0;  // largest V(t+dt) - V(t)
  double lyapunov_tolerance = 0;
  bool envelope_ok = true;
  BoundEnvelope envelope;
  std::optional<double> converged_at;

  // Extremes over every macro step.
  double max_abs_E = 0;
  double min_rho = 1e300, max_rho = 0;
  double min_s = 1e300, max_s = 0;
  double min_v = 1e300;
  double min_edge_sum = 1e300, max_edge_sum = 0;
  double max_disc_excess = -1e300;  // |r - c| - radius, should stay < 0
  double max_boundary_ratio = 0;    // |r - lambda| / mu
  double min_gap_T = 1e300;

  // End-of-run pattern diagnostics.
  double final_abs_q = 0;
  double final_max_abs_e = 0;
  double final_gamma_spread = 0;
  double final_theta_spread = 0;
  double final_theta_sum_abs = 0;  // |sum e^{i theta}|
  double final_gamma_sum_abs = 0;  // |sum e^{i gamma}|
  double final_max_Omega_dev = 0;  // max |Omega_k - s_d/sigma|

  std::optional<double> max_cross_divergence;

  long macro_steps = 0;
  long substeps = 0;
  double min_substep = 0;
  std::string failure;  // non-empty if the run aborted

  bool ok() const {
    return boundary_ok && barrier_ok && speed_positive && lyapunov_monotone &&
           envelope_ok && failure.empty();
  }
};

struct RunResult {
  TrajectoryLog log;
  MonitorReport report;
};

// Throws BarrierViolation / NonFiniteState / StepBudgetExceeded when the run aborts.
RunResult run(const SimConfig& config);
// Same, but an aborted run returns the partial log with report.failure set.
RunResult run_monitored(const SimConfig& config);

// max over time/agents of |r_a - r_b| between the transformed-plane loop mapped
// back and the original-plane loop, integrated in lockstep.
double cross_check(const SimConfig& config);

// Single classical RK4 step of size h, no refinement (flat state layout).
struct StepStatus {
  bool ok = true;
};
StepStatus rk4_step(Plane plane, const kernels::LawParams& p,
                    const kernels::Adjacency& adj, double h, std::vector<double>& x);

// Macro step of size dt with step-doubling substeps; throws BarrierViolation when
// the substep would fall below dt * 2^-max_refine_depth.
std::vector<AgentStateOriginal> step(const SimConfig& config,
                                     const std::vector<AgentStateOriginal>& states);
std::vector<AgentStateTransformed> step(const SimConfig& config,
                                        const std::vector<AgentStateTransformed>& states);

std::string to_string(Plane p);
std::string to_string(Pattern p);

}  // namespace mobius_flock
