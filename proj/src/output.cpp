#include "mobius_flock/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include "json.hpp"
#include <ostream>
#include <sstream>

#include "mobius_flock/errors.hpp"

namespace mobius_flock {

std::string format_double(double v) {
  std::array<char, 32> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log) {
  os << kCsvHeader << '\n';
  std::string line;
  for (const auto& s : log.samples) {
    for (std::size_t k = 0; k < s.agents.size(); ++k) {
      const auto& a = s.agents[k];
      const double cols[] = {s.t,        static_cast<double>(k + 1),
                             a.r.real(), a.r.imag(),
                             a.v,        a.theta,
                             a.rho.real(), a.rho.imag(),
                             a.s,        a.gamma,
                             std::abs(a.e), std::abs(a.E),
                             a.u,        a.omega,
                             a.nu,       a.Omega,
                             s.V,        s.abs_q};
      line.clear();
      for (int c = 0; c < kCsvColumns; ++c) {
        if (c) line += ',';
        line += format_double(cols[c]);
      }
      os << line << '\n';
    }
  }
}

std::vector<std::vector<double>> read_trajectory_csv(std::istream& is) {
  std::vector<std::vector<double>> rows;
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw InvalidConfig("trajectory CSV header mismatch");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const auto r = std::from_chars(p, comma, v);
      if (r.ec != std::errc() || r.ptr != comma) throw InvalidConfig("bad CSV field: " + line);
      row.push_back(v);
      p = comma + 1;
    }
    if (row.size() != static_cast<std::size_t>(kCsvColumns)) {
      throw InvalidConfig("CSV row has wrong column count: " + line);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string report_json(const MonitorReport& rep, const SimConfig& cfg) {
  using nlohmann::json;
  json j;
  j["ok"] = rep.ok();
  j["plane"] = to_string(cfg.plane);
  j["pattern"] = to_string(cfg.pattern);
  j["dt"] = cfg.dt;
  j["t_final"] = cfg.t_final;
  j["monitors"] = {{"boundary_ok", rep.boundary_ok},
                   {"barrier_ok", rep.barrier_ok},
                   {"speed_positive", rep.speed_positive},
                   {"lyapunov_monotone", rep.lyapunov_monotone},
                   {"max_lyapunov_increment", rep.max_lyapunov_increment},
                   {"lyapunov_tolerance", rep.lyapunov_tolerance},
                   {"envelope_ok", rep.envelope_ok}};
  j["converged_at"] = rep.converged_at ? json(*rep.converged_at) : json(nullptr);
  const auto& e = rep.envelope;
  j["envelope"] = {{"V0", e.V0},           {"c", e.c},
                   {"ell", e.ell},         {"eta_plus", e.eta_plus},
                   {"eta_minus", e.eta_minus}, {"E_max", e.E_max},
                   {"s_min", e.s_min},     {"s_max", e.s_max},
                   {"edge_sum_min", e.edge_sum_min}, {"edge_sum_max", e.edge_sum_max},
                   {"disc_center", {e.disc_center.real(), e.disc_center.imag()}},
                   {"disc_radius", e.disc_radius}};
  j["extremes"] = {{"max_abs_E", rep.max_abs_E},
                   {"min_rho", rep.min_rho},
                   {"max_rho", rep.max_rho},
                   {"min_s", rep.min_s},
                   {"max_s", rep.max_s},
                   {"min_v", rep.min_v},
                   {"min_edge_sum", rep.min_edge_sum},
                   {"max_edge_sum", rep.max_edge_sum},
                   {"max_disc_excess", rep.max_disc_excess},
                   {"max_boundary_ratio", rep.max_boundary_ratio},
                   {"min_gap_T", rep.min_gap_T}};
  j["final"] = {{"abs_q", rep.final_abs_q},
                {"max_abs_e", rep.final_max_abs_e},
                {"gamma_spread", rep.final_gamma_spread},
                {"theta_spread", rep.final_theta_spread},
                {"abs_sum_e_itheta", rep.final_theta_sum_abs},
                {"abs_sum_e_igamma", rep.final_gamma_sum_abs},
                {"max_Omega_deviation", rep.final_max_Omega_dev}};
  if (rep.max_cross_divergence) j["max_cross_divergence"] = *rep.max_cross_divergence;
  j["integration"] = {{"macro_steps", rep.macro_steps},
                      {"substeps", rep.substeps},
                      {"min_substep", rep.min_substep}};
  if (!rep.failure.empty()) j["failure"] = rep.failure;
  return j.dump(2);
}

std::string plot_script(const std::string& csv_name) {
  std::ostringstream os;
  os << R"PY(#!/usr/bin/env python3
# Renders trajectories, errors and controls from the trajectory CSV.
import os, sys
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, ")PY"
     << csv_name << R"PY(")
d = np.genfromtxt(path, delimiter=",", names=True)
ids = np.unique(d["agent_id"]).astype(int)

def per_agent(col):
    return [(d["t"][d["agent_id"] == k], d[col][d["agent_id"] == k]) for k in ids]

fig, ax = plt.subplots(2, 4, figsize=(18, 8))
th = np.linspace(0, 2 * np.pi, 400)
for k in ids:
    m = d["agent_id"] == k
    ax[0, 0].plot(d["rer"][m], d["imr"][m], lw=0.8, label=f"agent {k}")
    ax[1, 0].plot(d["rerho"][m], d["imrho"][m], lw=0.8)
ax[0, 0].plot(np.cos(th), np.sin(th), "k--", lw=0.8)
ax[0, 0].set_title("original plane"); ax[0, 0].axis("equal"); ax[0, 0].legend(fontsize=7)
ax[1, 0].set_title("transformed plane"); ax[1, 0].axis("equal")
for (t, y) in per_agent("abs_e"): ax[0, 1].plot(t, y, lw=0.8)
ax[0, 1].set_title("|e_k|")
for (t, y) in per_agent("abs_E"): ax[1, 1].plot(t, y, lw=0.8)
ax[1, 1].set_title("|E_k|")
for (t, y) in per_agent("u"): ax[0, 2].plot(t, y, lw=0.8)
ax[0, 2].set_title("u_k")
for (t, y) in per_agent("omega"): ax[0, 3].plot(t, y, lw=0.8)
ax[0, 3].set_title("omega_k")
for (t, y) in per_agent("nu"): ax[1, 2].plot(t, y, lw=0.8)
ax[1, 2].set_title("nu_k")
for (t, y) in per_agent("Omega"): ax[1, 3].plot(t, y, lw=0.8)
ax[1, 3].set_title("Omega_k")
fig.tight_layout()
fig.savefig(os.path.join(os.path.dirname(path), "trajectory.png"), dpi=120)

fig2, ax2 = plt.subplots(1, 3, figsize=(14, 4))
m = d["agent_id"] == ids[0]
ax2[0].plot(d["t"][m], d["V"][m]); ax2[0].set_title("V")
ax2[1].plot(d["t"][m], d["abs_q"][m]); ax2[1].set_title("|q|")
for k in ids:
    mk = d["agent_id"] == k
    ax2[2].plot(d["t"][mk], d["v"][mk], lw=0.8)
    ax2[2].plot(d["t"][mk], d["s"][mk], lw=0.8, ls="--")
ax2[2].set_title("speeds v (solid), s (dashed)")
fig2.tight_layout()
fig2.savefig(os.path.join(os.path.dirname(path), "signals.png"), dpi=120)
)PY";
  return os.str();
}

}  // namespace mobius_flock
