#include "mobius_flock/sim.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "mobius_flock/errors.hpp"

namespace mobius_flock {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kLyapunovRelTol = 1e-9;
constexpr double kEnvelopeSlack = 1e-9;
constexpr double kConvergedError = 1e-2;
constexpr double kSyncOrder = 0.99;
constexpr double kBalanceOrder = 0.01;
constexpr double kDwell = 10.0;

double angle_spread(const std::vector<double>& a) {
  double spread = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    for (std::size_t k = j + 1; k < a.size(); ++k)
      spread = std::max(spread, std::abs(wrap_angle(a[j] - a[k])));
  return spread;
}

struct Block {
  Plane plane;  // Original or Transformed
  std::size_t offset;
};

enum class StepOutcome { Ok, Floor, Budget };

template <class R>
class Integrator {
 public:
  Integrator(const SimConfig& cfg, std::vector<Block> blocks, const std::vector<double>& x0)
      : p_(kernels::LawParams::from(cfg.ctx, cfg.gains)),
        adj_(kernels::Adjacency::from(cfg.graph)),
        blocks_(std::move(blocks)),
        dt_(cfg.dt),
        h_min_(std::ldexp(cfg.dt, -cfg.max_refine_depth)),
        h_(cfg.dt),
        budget_(cfg.max_substeps),
        x_(x0.begin(), x0.end()) {
    const int n = cfg.graph.n();
    use_omp_ = cfg.kernel == KernelChoice::OpenMP ||
               (cfg.kernel == KernelChoice::Auto && n >= 64 && omp_get_max_threads() > 1);
    // Per-substep tolerance ~ dt^5 keeps accepted substeps proportional to dt.
    tol_step_ = cfg.refine_tol * std::pow(cfg.dt / 1e-3, 5);
    const std::size_t m = x_.size();
    for (auto* v : {&kx_, &tmp_, &k2_, &k3_, &k4_}) v->assign(m, 0.0);
    for (Rk* r : {&full_, &half1_, &half2_}) {
      r->y.assign(m, 0.0);
      r->ky.assign(m, 0.0);
    }
    // Lockstep runs: derive the transformed block at working precision so both
    // loops start from the same point.
    const Block* bt = nullptr;
    const Block* bo = nullptr;
    for (const auto& b : blocks_) (b.plane == Plane::Transformed ? bt : bo) = &b;
    if (bt && bo) kernels::original_to_transformed(p_, &x_[bo->offset], &x_[bt->offset], n);
    initial_ok_ = rhs(x_.data(), kx_.data());
  }

  bool initial_ok() const { return initial_ok_; }
  std::vector<double> state() const { return {x_.begin(), x_.end()}; }
  long substeps() const { return substeps_; }
  double min_substep() const { return min_h_; }

  // Advances by H (a macro step) with step-doubling RK4 substeps that land
  // exactly on H.
  StepOutcome macro_step(double H) {
    double t = 0.0;
    while (t < H) {
      if (budget_ > 0 && substeps_ >= budget_) return StepOutcome::Budget;
      const double remaining = H - t;
      double h = std::min(h_, remaining);
      const bool truncated = h < h_;
      if (remaining - h < 1e-6 * h) h = remaining;
      const double hh = 0.5 * h;
      rk4(x_.data(), kx_.data(), h, full_, false);
      rk4(x_.data(), kx_.data(), hh, half1_, true);
      rk4(half1_.y.data(), half1_.ky.data(), hh, half2_, true);
      double ratio = 0.0;  // max err / allowed
      const bool ok = full_.ok && half1_.ok && half2_.ok;
      if (ok) {
        for (std::size_t i = 0; i < x_.size(); ++i) {
          const double xi = static_cast<double>(x_[i]);
          const double allowed = tol_step_ + kRoundoff * std::max(1.0, std::abs(xi));
          const double err = static_cast<double>(full_.y[i] - half2_.y[i]);
          ratio = std::max(ratio, std::abs(err) / allowed);
        }
      }
      if (ok && ratio <= 1.0) {
        x_.swap(half2_.y);
        kx_.swap(half2_.ky);
        t = h == remaining ? H : t + h;
        substeps_ += 2;
        min_h_ = std::min(min_h_, hh);
        const double grow = ratio > 0.0 ? std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 4.0) : 4.0;
        const double next = h * grow;
        h_ = std::min(dt_, truncated ? std::max(h_, next) : next);
      } else {
        h_ = ok ? h * std::clamp(0.9 * std::pow(ratio, -0.25), 0.1, 0.5) : 0.25 * h;
        if (h_ < h_min_) return StepOutcome::Floor;
      }
    }
    return StepOutcome::Ok;
  }

  bool state_finite() const {
    return std::all_of(x_.begin(), x_.end(), [](R v) { return std::isfinite(v); });
  }

 private:
  struct Rk {
    std::vector<R> y, ky;
    bool ok = false;
  };
  static constexpr double kRoundoff = 8.0 * std::numeric_limits<R>::epsilon();

  bool rhs(const R* x, R* dx) {
    bool ok = true;
    for (const auto& b : blocks_) {
      const R* xb = x + b.offset;
      R* db = dx + b.offset;
      if (b.plane == Plane::Transformed) {
        ok = (use_omp_ ? kernels::rhs_transformed_omp(p_, adj_, xb, db, scratch_)
                       : kernels::rhs_transformed_serial(p_, adj_, xb, db, scratch_)) &&
             ok;
      } else {
        ok = (use_omp_ ? kernels::rhs_original_omp(p_, adj_, xb, db, scratch_)
                       : kernels::rhs_original_serial(p_, adj_, xb, db, scratch_)) &&
             ok;
      }
    }
    return ok;
  }

  // Classical RK4 from (x, kx = f(x)); optionally evaluates f at the result.
  void rk4(const R* x, const R* kx, double hd, Rk& out, bool eval_end) {
    const std::size_t m = x_.size();
    const R h = hd;
    bool ok = true;
    for (std::size_t i = 0; i < m; ++i) tmp_[i] = x[i] + 0.5 * h * kx[i];
    ok = rhs(tmp_.data(), k2_.data()) && ok;
    for (std::size_t i = 0; i < m; ++i) tmp_[i] = x[i] + 0.5 * h * k2_[i];
    ok = rhs(tmp_.data(), k3_.data()) && ok;
    for (std::size_t i = 0; i < m; ++i) tmp_[i] = x[i] + h * k3_[i];
    ok = rhs(tmp_.data(), k4_.data()) && ok;
    for (std::size_t i = 0; i < m; ++i) {
      out.y[i] = x[i] + h / 6 * (kx[i] + 2 * k2_[i] + 2 * k3_[i] + k4_[i]);
    }
    out.ok = ok && (!eval_end || rhs(out.y.data(), out.ky.data()));
  }

  kernels::LawParams p_;
  kernels::Adjacency adj_;
  std::vector<Block> blocks_;
  double dt_;
  double h_min_;
  double h_;  // carried across macro steps
  long budget_;
  bool use_omp_ = false;
  double tol_step_ = 0.0;
  std::vector<R> x_, kx_, tmp_, k2_, k3_, k4_;
  Rk full_, half1_, half2_;
  kernels::Scratch scratch_;
  bool initial_ok_ = false;
  long substeps_ = 0;
  double min_h_ = 1e300;
};

void pack(const std::vector<AgentStateOriginal>& s, std::vector<double>& x,
          std::size_t off) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    x[off + 4 * k] = s[k].r.real();
    x[off + 4 * k + 1] = s[k].r.imag();
    x[off + 4 * k + 2] = s[k].v;
    x[off + 4 * k + 3] = s[k].theta;
  }
}

void pack(const std::vector<AgentStateTransformed>& s, std::vector<double>& x,
          std::size_t off) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    x[off + 4 * k] = s[k].rho.real();
    x[off + 4 * k + 1] = s[k].rho.imag();
    x[off + 4 * k + 2] = s[k].s;
    x[off + 4 * k + 3] = s[k].gamma;
  }
}

std::vector<AgentStateOriginal> unpack_original(const std::vector<double>& x,
                                                std::size_t off, int n) {
  std::vector<AgentStateOriginal> s(n);
  for (int k = 0; k < n; ++k) {
    s[k] = {{x[off + 4 * k], x[off + 4 * k + 1]}, x[off + 4 * k + 2], x[off + 4 * k + 3]};
  }
  return s;
}

std::vector<AgentStateTransformed> unpack_transformed(const std::vector<double>& x,
                                                      std::size_t off, int n) {
  std::vector<AgentStateTransformed> s(n);
  for (int k = 0; k < n; ++k) {
    s[k] = {{x[off + 4 * k], x[off + 4 * k + 1]}, x[off + 4 * k + 2], x[off + 4 * k + 3]};
  }
  return s;
}

// Both-plane snapshot of the primary integrated block.
struct Snapshot {
  std::vector<AgentStateOriginal> orig;
  std::vector<AgentStateTransformed> tr;
};

Snapshot snapshot(const SimConfig& cfg, const std::vector<double>& x, Plane primary,
                  std::size_t off) {
  const int n = cfg.graph.n();
  Snapshot s;
  if (primary == Plane::Transformed) {
    s.tr = unpack_transformed(x, off, n);
    for (const auto& y : s.tr) s.orig.push_back(to_original(cfg.ctx, y));
  } else {
    s.orig = unpack_original(x, off, n);
    for (const auto& o : s.orig) s.tr.push_back(to_transformed(cfg.ctx, o));
  }
  return s;
}

Sample make_sample(const SimConfig& cfg, double t, const Snapshot& s, Plane primary,
                   double V) {
  const int n = cfg.graph.n();
  Sample smp;
  smp.t = t;
  smp.V = V;
  std::vector<double> gamma;
  for (const auto& y : s.tr) gamma.push_back(y.gamma);
  smp.abs_q = order_of_angles(gamma).magnitude;
  smp.U = potential_U(cfg.graph, gamma);
  for (int k = 0; k < n; ++k) {
    AgentSample a;
    const auto& o = s.orig[k];
    const auto& y = s.tr[k];
    a.r = o.r;
    a.v = o.v;
    a.theta = o.theta;
    a.rho = y.rho;
    a.s = y.s;
    a.gamma = y.gamma;
    a.e = error_original(o);
    a.E = error_transformed(cfg.ctx, y);
    if (primary == Plane::Transformed) {
      a.nu = nu_transformed(cfg.ctx, cfg.gains, y);
      a.Omega = Omega_transformed(cfg.graph, cfg.ctx, cfg.gains, s.tr, k);
      a.u = u_from_transformed(cfg.ctx, y, a.nu);
      a.omega = omega_from_transformed(cfg.ctx, y, a.Omega);
    } else {
      const auto c = original_control(cfg.ctx, cfg.gains, neighborhood(cfg.graph, s.orig, k));
      a.u = c.u;
      a.omega = c.omega;
      a.nu = c.nu;
      a.Omega = c.Omega;
    }
    smp.agents.push_back(a);
  }
  return smp;
}

class Monitor {
 public:
  Monitor(const SimConfig& cfg, MonitorReport& rep) : cfg_(cfg), rep_(rep) {
    lyap_ = cfg.pattern == Pattern::Sync || cfg.graph.circulant();
    if (!lyap_) {
      std::cerr << "warning: balancing on a non-circulant graph; the Lyapunov and "
                   "envelope monitors are skipped\n";
    }
  }

  bool lyapunov_available() const { return lyap_; }

  // Returns V (0 if unavailable).
  double observe(double t, const Snapshot& s, bool first) {
    const auto& ctx = cfg_.ctx;
    const auto& g = cfg_.gains;
    const int n = cfg_.graph.n();
    double V = 0.0;
    if (lyap_) V = lyapunov(cfg_.pattern, cfg_.graph, ctx, g, s.tr);
    if (first) {
      V0_ = V;
      rep_.lyapunov_tolerance = kLyapunovRelTol * std::max(1.0, V0_);
      if (lyap_) rep_.envelope = bound_envelope(ctx, g, V0_, cfg_.pattern, cfg_.graph);
    } else if (lyap_) {
      const double inc = V - V_prev_;
      rep_.max_lyapunov_increment = std::max(rep_.max_lyapunov_increment, inc);
      if (inc > rep_.lyapunov_tolerance) rep_.lyapunov_monotone = false;
    }
    V_prev_ = V;

    const double lam = ctx.pair.lambda(), mu = ctx.pair.mu();
    const double dT2 = ctx.delta_T * ctx.delta_T;
    const auto& env = rep_.envelope;
    double max_e = 0.0;
    std::vector<double> gamma(n);
    for (int k = 0; k < n; ++k) {
      const auto& o = s.orig[k];
      const auto& y = s.tr[k];
      const double ratio = std::abs(o.r - lam) / mu;
      rep_.max_boundary_ratio = std::max(rep_.max_boundary_ratio, ratio);
      if (!(ratio < 1.0)) rep_.boundary_ok = false;
      const double absE = std::abs(error_transformed(ctx, y));
      const double gapT = dT2 - absE * absE;
      const double st = y.s - g.s_d;
      rep_.min_gap_T = std::min(rep_.min_gap_T, gapT);
      if (!(gapT > 0.0) || !(std::abs(st) < g.delta_S)) rep_.barrier_ok = false;
      const double arho = std::abs(y.rho);
      // Annulus |rho| in (|alpha| - delta_T, |alpha| + delta_T).
      if (!(arho > ctx.radius_inner - ctx.delta_T && arho < ctx.radius_inner + ctx.delta_T)) {
        rep_.barrier_ok = false;
      }
      if (!(y.s > 0.0) || !(o.v > 0.0)) rep_.speed_positive = false;
      rep_.max_abs_E = std::max(rep_.max_abs_E, absE);
      rep_.min_rho = std::min(rep_.min_rho, arho);
      rep_.max_rho = std::max(rep_.max_rho, arho);
      rep_.min_s = std::min(rep_.min_s, y.s);
      rep_.max_s = std::max(rep_.max_s, y.s);
      rep_.min_v = std::min(rep_.min_v, o.v);
      const double excess = std::abs(o.r - env.disc_center) - env.disc_radius;
      rep_.max_disc_excess = std::max(rep_.max_disc_excess, excess);
      if (lyap_) {
        if (!(absE < env.E_max + kEnvelopeSlack) ||
            !(arho > env.rho_min - kEnvelopeSlack && arho < env.rho_max + kEnvelopeSlack) ||
            !(y.s > env.s_min - kEnvelopeSlack && y.s < env.s_max + kEnvelopeSlack) ||
            !(excess < kEnvelopeSlack)) {
          rep_.envelope_ok = false;
        }
      }
      max_e = std::max(max_e, std::abs(error_original(o)));
      gamma[k] = y.gamma;
    }
    const double es = edge_phasor_sum(cfg_.graph, gamma);
    rep_.min_edge_sum = std::min(rep_.min_edge_sum, es);
    rep_.max_edge_sum = std::max(rep_.max_edge_sum, es);
    if (lyap_ && !(es > env.edge_sum_min - kEnvelopeSlack &&
                   es < env.edge_sum_max + kEnvelopeSlack)) {
      rep_.envelope_ok = false;
    }

    const double q = order_of_angles(gamma).magnitude;
    const bool pattern_ok =
        cfg_.pattern == Pattern::Sync ? q > kSyncOrder : q < kBalanceOrder;
    if (max_e < kConvergedError && pattern_ok) {
      if (!candidate_) candidate_ = t;
    } else {
      candidate_.reset();
    }
    return V;
  }

  void finish(double t_final, const Snapshot& s) {
    if (candidate_ && t_final - *candidate_ >= kDwell) rep_.converged_at = candidate_;
    const int n = cfg_.graph.n();
    std::vector<double> gamma, theta;
    Complex sg = 0.0, st = 0.0;
    double max_e = 0.0;
    for (int k = 0; k < n; ++k) {
      gamma.push_back(s.tr[k].gamma);
      theta.push_back(s.orig[k].theta);
      sg += std::polar(1.0, s.tr[k].gamma);
      st += std::polar(1.0, s.orig[k].theta);
      max_e = std::max(max_e, std::abs(error_original(s.orig[k])));
    }
    rep_.final_abs_q = order_of_angles(gamma).magnitude;
    rep_.final_max_abs_e = max_e;
    rep_.final_gamma_spread = angle_spread(gamma);
    rep_.final_theta_spread = angle_spread(theta);
    rep_.final_gamma_sum_abs = std::abs(sg);
    rep_.final_theta_sum_abs = std::abs(st);
    const double target = cfg_.gains.s_d / cfg_.ctx.sigma;
    double dev = 0.0;
    try {
      for (int k = 0; k < n; ++k) {
        dev = std::max(dev, std::abs(Omega_transformed(cfg_.graph, cfg_.ctx, cfg_.gains,
                                                       s.tr, k) -
                                     target));
      }
    } catch (const BarrierViolation&) {
      dev = std::numeric_limits<double>::infinity();
    }
    rep_.final_max_Omega_dev = dev;
  }

 private:
  const SimConfig& cfg_;
  MonitorReport& rep_;
  bool lyap_ = true;
  double V0_ = 0.0;
  double V_prev_ = 0.0;
  std::optional<double> candidate_;
};

struct Layout {
  std::vector<Block> blocks;
  Plane primary;            // block whose samples are logged
  std::size_t primary_off;  // offset of that block
  std::size_t size;
};

Layout layout_for(const SimConfig& cfg) {
  const std::size_t m = 4 * static_cast<std::size_t>(cfg.graph.n());
  Layout l;
  switch (cfg.plane) {
    case Plane::Original:
      l.blocks = {{Plane::Original, 0}};
      l.primary = Plane::Original;
      l.primary_off = 0;
      l.size = m;
      break;
    case Plane::Transformed:
      l.blocks = {{Plane::Transformed, 0}};
      l.primary = Plane::Transformed;
      l.primary_off = 0;
      l.size = m;
      break;
    case Plane::CrossCheck:
      l.blocks = {{Plane::Transformed, 0}, {Plane::Original, m}};
      l.primary = Plane::Original;
      l.primary_off = m;
      l.size = 2 * m;
      break;
  }
  return l;
}

std::vector<double> initial_vector(const SimConfig& cfg, const Layout& l) {
  std::vector<double> x(l.size, 0.0);
  std::vector<AgentStateTransformed> tr;
  for (const auto& o : cfg.initial_states) tr.push_back(to_transformed(cfg.ctx, o));
  for (const auto& b : l.blocks) {
    if (b.plane == Plane::Transformed) {
      pack(tr, x, b.offset);
    } else {
      pack(cfg.initial_states, x, b.offset);
    }
  }
  return x;
}

double divergence(const SimConfig& cfg, const std::vector<double>& x) {
  const int n = cfg.graph.n();
  const std::size_t m = 4 * static_cast<std::size_t>(n);
  double d = 0.0;
  for (int k = 0; k < n; ++k) {
    const Complex rho{x[4 * k], x[4 * k + 1]};
    const Complex rb{x[m + 4 * k], x[m + 4 * k + 1]};
    d = std::max(d, std::abs(inverse_map(cfg.ctx, rho) - rb));
  }
  return d;
}

std::vector<double> step_flat(const SimConfig& config, Plane plane,
                              std::vector<double> x) {
  config.validate();
  Integrator<double> integ(config, {{plane, 0}}, x);
  if (!integ.initial_ok()) throw BarrierViolation("initial state outside barrier interior");
  switch (integ.macro_step(config.dt)) {
    case StepOutcome::Ok: break;
    case StepOutcome::Budget: throw StepBudgetExceeded("substep budget exhausted");
    case StepOutcome::Floor:
      if (!integ.state_finite()) throw NonFiniteState("state became non-finite");
      throw BarrierViolation("substep floor reached within one step; try halving dt");
  }
  return integ.state();
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidConfig("dt must be positive");
  if (dt > 0.01 && !allow_coarse_dt) {
    throw InvalidConfig("dt must be <= 0.01 s (got " + std::to_string(dt) + ")");
  }
  if (!(t_final >= dt)) throw InvalidConfig("t_final must be >= dt");
  if (log_stride < 1) throw InvalidConfig("log_stride must be >= 1");
  if (max_refine_depth < 0 || max_refine_depth > 60) {
    throw InvalidConfig("max_refine_depth out of range");
  }
  if (!(refine_tol > 0.0)) throw InvalidConfig("refine_tol must be positive");
  gains.validate(pattern);
  if (static_cast<int>(initial_states.size()) != graph.n()) {
    throw InvalidConfig("graph has " + std::to_string(graph.n()) + " nodes but " +
                        std::to_string(initial_states.size()) + " initial states given");
  }
}

std::vector<AgentStateOriginal> random_feasible_states(const MobiusContext& ctx,
                                                       const ControllerGains& gains,
                                                       int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<AgentStateOriginal> out;
  const double lam = ctx.pair.lambda(), mu = ctx.pair.mu();
  while (static_cast<int>(out.size()) < n) {
    AgentStateTransformed y;
    y.gamma = 2.0 * std::numbers::pi * unit(rng);
    const double rad = 0.9 * ctx.delta_T * std::sqrt(unit(rng));
    const Complex E = std::polar(rad, 2.0 * std::numbers::pi * unit(rng));
    y.rho = E - kI * ctx.sigma * std::polar(1.0, y.gamma);
    y.s = gains.s_d + gains.delta_S * (1.8 * unit(rng) - 0.9);
    if (!(y.s > 0.0) || std::abs(y.rho - 1.0) < 1e-6) continue;
    const auto o = to_original(ctx, y);
    if (!(std::abs(o.r - lam) < mu) || !(o.v > 0.0)) continue;
    out.push_back(o);
  }
  return out;
}

StepStatus rk4_step(Plane plane, const kernels::LawParams& p,
                    const kernels::Adjacency& adj, double h, std::vector<double>& x) {
  const std::size_t m = x.size();
  kernels::Scratch sc;
  auto f = [&](const std::vector<double>& in, std::vector<double>& out) {
    return plane == Plane::Transformed
               ? kernels::rhs_transformed_serial(p, adj, in.data(), out.data(), sc)
               : kernels::rhs_original_serial(p, adj, in.data(), out.data(), sc);
  };
  std::vector<double> k1(m), k2(m), k3(m), k4(m), t(m);
  bool ok = f(x, k1);
  for (std::size_t i = 0; i < m; ++i) t[i] = x[i] + 0.5 * h * k1[i];
  ok = f(t, k2) && ok;
  for (std::size_t i = 0; i < m; ++i) t[i] = x[i] + 0.5 * h * k2[i];
  ok = f(t, k3) && ok;
  for (std::size_t i = 0; i < m; ++i) t[i] = x[i] + h * k3[i];
  ok = f(t, k4) && ok;
  for (std::size_t i = 0; i < m; ++i) {
    x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return {ok};
}

std::vector<AgentStateOriginal> step(const SimConfig& config,
                                     const std::vector<AgentStateOriginal>& states) {
  std::vector<double> x(4 * states.size());
  pack(states, x, 0);
  return unpack_original(step_flat(config, Plane::Original, std::move(x)), 0,
                         static_cast<int>(states.size()));
}

std::vector<AgentStateTransformed> step(const SimConfig& config,
                                        const std::vector<AgentStateTransformed>& states) {
  std::vector<double> x(4 * states.size());
  pack(states, x, 0);
  return unpack_transformed(step_flat(config, Plane::Transformed, std::move(x)), 0,
                            static_cast<int>(states.size()));
}

namespace {

template <class R>
RunResult run_monitored_t(const SimConfig& config) {
  config.validate();
  const auto feas = feasibility_check(config.ctx, config.gains, config.initial_states);
  if (!feas.ok) {
    throw InfeasibleInitialConditions("initial states violate the barrier conditions\n" +
                                      feas.summary());
  }
  const Layout lay = layout_for(config);
  Integrator<R> integ(config, lay.blocks, initial_vector(config, lay));
  if (!integ.initial_ok()) {
    throw InfeasibleInitialConditions("controller undefined at the initial state");
  }

  RunResult res;
  MonitorReport& rep = res.report;
  Monitor mon(config, rep);
  const long nsteps = static_cast<long>(std::ceil(config.t_final / config.dt - 1e-9));
  double max_div = 0.0;

  Snapshot snap = snapshot(config, integ.state(), lay.primary, lay.primary_off);
  double V = mon.observe(0.0, snap, true);
  res.log.samples.push_back(make_sample(config, 0.0, snap, lay.primary, V));
  double t = 0.0;
  for (long i = 1; i <= nsteps; ++i) {
    const double t_next = i == nsteps ? config.t_final : static_cast<double>(i) * config.dt;
    const StepOutcome out = integ.macro_step(t_next - t);
    if (out != StepOutcome::Ok) {
      std::ostringstream os;
      os << "at t=" << t << ": ";
      if (out == StepOutcome::Budget) {
        os << "substep budget of " << config.max_substeps
           << " exhausted (min position-barrier gap " << rep.min_gap_T << ")";
      } else if (integ.state_finite()) {
        os << "barrier saturated and substep floor reached; try halving dt";
        rep.barrier_ok = false;
      } else {
        os << "state became non-finite";
      }
      rep.failure = os.str();
      rep.macro_steps = i - 1;
      rep.substeps = integ.substeps();
      rep.min_substep = integ.min_substep();
      mon.finish(t, snap);
      if (res.log.samples.back().t != t) {
        res.log.samples.push_back(make_sample(config, t, snap, lay.primary, V));
      }
      return res;
    }
    t = t_next;
    snap = snapshot(config, integ.state(), lay.primary, lay.primary_off);
    V = mon.observe(t, snap, false);
    if (config.plane == Plane::CrossCheck) {
      max_div = std::max(max_div, divergence(config, integ.state()));
    }
    if (i % config.log_stride == 0 || i == nsteps) {
      res.log.samples.push_back(make_sample(config, t, snap, lay.primary, V));
    }
  }
  mon.finish(t, snap);
  if (config.plane == Plane::CrossCheck) rep.max_cross_divergence = max_div;
  rep.macro_steps = nsteps;
  rep.substeps = integ.substeps();
  rep.min_substep = integ.min_substep();
  return res;
}

}  // namespace

RunResult run_monitored(const SimConfig& config) {
  return config.extended_precision ? run_monitored_t<long double>(config)
                                   : run_monitored_t<double>(config);
}

RunResult run(const SimConfig& config) {
  RunResult res = run_monitored(config);
  if (!res.report.failure.empty()) {
    if (res.report.failure.find("non-finite") != std::string::npos) {
      throw NonFiniteState(res.report.failure);
    }
    if (res.report.failure.find("budget") != std::string::npos) {
      throw StepBudgetExceeded(res.report.failure);
    }
    throw BarrierViolation(res.report.failure);
  }
  return res;
}

namespace {

template <class R>
double cross_check_t(const SimConfig& config) {
  SimConfig c = config;
  c.plane = Plane::CrossCheck;
  c.validate();
  const Layout lay = layout_for(c);
  Integrator<R> integ(c, lay.blocks, initial_vector(c, lay));
  if (!integ.initial_ok()) {
    throw InfeasibleInitialConditions("controller undefined at the initial state");
  }
  const long nsteps = static_cast<long>(std::ceil(c.t_final / c.dt - 1e-9));
  double t = 0.0, max_div = divergence(c, integ.state());
  for (long i = 1; i <= nsteps; ++i) {
    const double t_next = i == nsteps ? c.t_final : static_cast<double>(i) * c.dt;
    const StepOutcome out = integ.macro_step(t_next - t);
    if (out == StepOutcome::Budget) {
      throw StepBudgetExceeded("cross check stopped at t=" + std::to_string(t));
    }
    if (out == StepOutcome::Floor) {
      throw BarrierViolation("cross check aborted at t=" + std::to_string(t));
    }
    t = t_next;
    max_div = std::max(max_div, divergence(c, integ.state()));
  }
  return max_div;
}

}  // namespace

double cross_check(const SimConfig& config) {
  return config.extended_precision ? cross_check_t<long double>(config)
                                   : cross_check_t<double>(config);
}

std::string to_string(Plane p) {
  switch (p) {
    case Plane::Original: return "original";
    case Plane::Transformed: return "transformed";
    case Plane::CrossCheck: return "crosscheck";
  }
  return "?";
}

std::string to_string(Pattern p) { return p == Pattern::Sync ? "sync" : "balance"; }

}  // namespace mobius_flock
