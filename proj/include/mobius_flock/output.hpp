#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mobius_flock/sim.hpp"

namespace mobius_flock {

inline constexpr const char* kCsvHeader =
    "t,agent_id,re(r),im(r),v,theta,re(rho),im(rho),s,gamma,abs_e,abs_E,u,omega,nu,"
    "Omega,V,abs_q";
inline constexpr int kCsvColumns = 18;

// Shortest round-trip decimal form.
std::string format_double(double v);

void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log);
// One row per line, numeric columns in header order.
std::vector<std::vector<double>> read_trajectory_csv(std::istream& is);

std::string report_json(const MonitorReport& rep, const SimConfig& cfg);
std::string plot_script(const std::string& csv_name);

}  // namespace mobius_flock
