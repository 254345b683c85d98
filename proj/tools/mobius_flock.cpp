// mobius_flock: geometry inspection, simulation runs and the acceptance suite.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mobius_flock/acceptance.hpp"
#include "mobius_flock/config.hpp"
#include "mobius_flock/errors.hpp"
#include "mobius_flock/output.hpp"
#include "mobius_flock/sim.hpp"

namespace fs = std::filesystem;
using namespace mobius_flock;

namespace {

struct RunFlags {
  std::string config;
  std::string out;
  std::string plane;
  std::string pattern;
  std::string root;
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<int> log_stride;
};

// Re-parse with the root override so the context is rebuilt consistently.
LoadedConfig load_with_overrides(const RunFlags& f) {
  std::ifstream in(f.config);
  if (!in) throw InvalidConfig("cannot open config '" + f.config + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (!f.root.empty()) text += "\nroot = " + f.root + "\n";
  LoadedConfig c = parse_config(text, f.config);
  if (!f.plane.empty()) c.sim.plane = parse_plane(f.plane);
  if (!f.pattern.empty()) c.sim.pattern = parse_pattern(f.pattern);
  if (f.dt) c.sim.dt = *f.dt;
  if (f.t_final) c.sim.t_final = *f.t_final;
  if (f.log_stride) c.sim.log_stride = *f.log_stride;
  return c;
}

int cmd_geometry(const RunFlags& f) {
  const LoadedConfig c = load_with_overrides(f);
  const MobiusContext& ctx = c.sim.ctx;
  const AlphaRoots roots = solve_alpha(ctx.pair);
  std::cout << std::setprecision(12);
  std::cout << "lambda = " << ctx.pair.lambda() << "\n"
            << "mu = " << ctx.pair.mu() << "\n"
            << "alpha_s = " << roots.alpha_s << "\n"
            << "alpha_l = " << roots.alpha_l << "\n"
            << "root = " << (ctx.root_kind == RootKind::Smaller ? "smaller" : "larger")
            << "\n"
            << "alpha = " << ctx.alpha << "\n"
            << "sigma = " << ctx.sigma << "\n"
            << "radius_inner = " << ctx.radius_inner << "\n"
            << "radius_outer = " << ctx.radius_outer << "\n"
            << "delta_T = " << ctx.delta_T << "\n";
  return 0;
}

std::string default_out_dir() {
  const char* env = std::getenv("MOBIUS_FLOCK_OUT");
  return env && *env ? env : "mobius_flock_out";
}

int cmd_run(const RunFlags& f) {
  const LoadedConfig c = load_with_overrides(f);
  const fs::path dir = f.out.empty() ? fs::path(default_out_dir()) : fs::path(f.out);
  fs::create_directories(dir);

  const RunResult res = run_monitored(c.sim);
  const std::string& error = res.report.failure;
  const fs::path csv = dir / "trajectory.csv";
  const fs::path report = dir / "report.json";
  const fs::path plot = dir / "plot.py";
  const fs::path manifest = dir / "manifest.json";
  {
    std::ofstream os(csv);
    write_trajectory_csv(os, res.log);
  }
  {
    std::ofstream os(report);
    os << report_json(res.report, c.sim) << '\n';
  }
  {
    std::ofstream os(plot);
    os << plot_script("trajectory.csv");
  }
  const int status = res.report.ok() ? 0 : 1;
  nlohmann::json m;
  m["config"] = fs::absolute(f.config).string();
  m["output_dir"] = fs::absolute(dir).string();
  m["artifacts"] = {csv.filename().string(), report.filename().string(),
                    plot.filename().string(), manifest.filename().string()};
  m["exit_status"] = status;
  {
    std::ofstream os(manifest);
    os << m.dump(2) << '\n';
  }

  const auto& r = res.report;
  std::cout << "plane " << to_string(c.sim.plane) << ", pattern " << to_string(c.sim.pattern)
            << ", t_final " << c.sim.t_final << ", dt " << c.sim.dt << "\n";
  std::cout << "monitors: boundary " << r.boundary_ok << ", barrier " << r.barrier_ok
            << ", speed " << r.speed_positive << ", lyapunov " << r.lyapunov_monotone
            << ", envelope " << r.envelope_ok << "\n";
  std::cout << "final |q| " << r.final_abs_q << ", max|e| " << r.final_max_abs_e
            << ", converged_at "
            << (r.converged_at ? std::to_string(*r.converged_at) : std::string("none"))
            << "\n";
  for (const auto& p : {csv, report, plot, manifest}) std::cout << "wrote " << p.string() << "\n";
  if (!error.empty()) std::cerr << "error: " << error << "\n";
  return status;
}

int cmd_verify(const AcceptanceOptions& o) {
  const auto results = run_acceptance(o, &std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Circular-motion control of unicycle agents under a circular boundary"};
  app.require_subcommand(1);

  RunFlags f;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", f.config, "Config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--root", f.root, "smaller|larger");
  };
  auto* geo = app.add_subcommand("geometry", "Print the circle pair and Mobius map data");
  add_common(geo);

  auto* runc = app.add_subcommand("run", "Simulate and write trajectory, report and plot script");
  add_common(runc);
  runc->add_option("--out", f.out, "Output directory (default $MOBIUS_FLOCK_OUT)");
  runc->add_option("--plane", f.plane, "original|transformed|crosscheck");
  runc->add_option("--pattern", f.pattern, "sync|balance");
  runc->add_option("--dt", f.dt, "Macro step");
  runc->add_option("--t-final", f.t_final, "Horizon");
  runc->add_option("--log-stride", f.log_stride, "Log every n macro steps");

  AcceptanceOptions ao;
  auto* ver = app.add_subcommand("verify", "Run the acceptance suite");
  ver->add_flag("--quick", ao.quick, "Skip the long closed-loop runs");
  ver->add_option("--kappa1", ao.kappa1, "Override kappa1");
  ver->add_option("--dt", ao.dt, "Override dt");
  ver->add_option("--t-final", ao.t_final, "Override the run horizon");
  ver->add_option("--only", ao.only, "Criterion ids to run");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*geo) return cmd_geometry(f);
    if (*runc) return cmd_run(f);
    if (*ver) return cmd_verify(ao);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
