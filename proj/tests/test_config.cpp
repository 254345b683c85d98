#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mobius_flock/config.hpp"
#include "mobius_flock/errors.hpp"
#include "mobius_flock/output.hpp"

using namespace mobius_flock;

namespace {

TEST(Numbers, Expressions) {
  EXPECT_DOUBLE_EQ(parse_number("sqrt(2.5)"), std::sqrt(2.5));
  EXPECT_DOUBLE_EQ(parse_number("-pi/2"), -std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(parse_number(" 3*2/4 "), 1.5);
  EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
  EXPECT_THROW(parse_number("2x"), InvalidConfig);
  EXPECT_THROW(parse_number("sqrt(-1)"), InvalidConfig);
  EXPECT_THROW(parse_number("(1"), InvalidConfig);
}

TEST(Config, BundledSync) {
  const auto c = load_config(bundled_config_path("paper_sync"));
  EXPECT_EQ(c.sim.graph.n(), 5);
  EXPECT_TRUE(c.sim.graph.circulant());
  EXPECT_EQ(c.sim.pattern, Pattern::Sync);
  EXPECT_EQ(c.sim.plane, Plane::Original);
  EXPECT_DOUBLE_EQ(c.sim.gains.kappa1, 0.004);
  EXPECT_DOUBLE_EQ(c.sim.gains.K, -0.04);
  EXPECT_DOUBLE_EQ(c.sim.ctx.alpha, c.sim.ctx.alpha);
  EXPECT_NEAR(c.sim.ctx.alpha, 0.5, 1e-15);
  ASSERT_EQ(c.sim.initial_states.size(), 5u);
  EXPECT_NEAR(std::abs(c.sim.initial_states[3].r), 1.33, 1e-15);
  EXPECT_NEAR(c.sim.initial_states[0].theta, std::numbers::pi / 2, 1e-15);
}

TEST(Config, BundledBalancing) {
  const auto c = load_config(bundled_config_path("paper_balancing"));
  EXPECT_EQ(c.sim.pattern, Pattern::Balance);
  EXPECT_DOUBLE_EQ(c.sim.gains.K, 0.04);
}

TEST(Config, UnknownKeyAndBadValues) {
  EXPECT_THROW(parse_config("lambda = 0.5\nmu = 2\nkappa = 1\n"), InvalidConfig);
  EXPECT_THROW(parse_config("lambda = 0.5\n"), InvalidConfig);
  EXPECT_THROW(parse_config("lambda = 0.5\nmu = 2\nplane = sideways\n"), InvalidConfig);
  EXPECT_THROW(parse_config("lambda = 0.5\nmu = 2\nno equals sign\n"), InvalidConfig);
  EXPECT_THROW(parse_config("lambda = 0\nmu = 2\n"), ConcentricCircles);
  EXPECT_THROW(parse_config("lambda = 0.5\nmu = 2\nprecision = quad\n"), InvalidConfig);
}

TEST(Config, PrecisionKey) {
  EXPECT_FALSE(parse_config("lambda = 0.5\nmu = 2\n").sim.extended_precision);
  EXPECT_TRUE(
      parse_config("lambda = 0.5\nmu = 2\nprecision = extended\n").sim.extended_precision);
}

TEST(Config, EdgesAndRandomInitial) {
  const auto c = parse_config(
      "lambda = 0.5\nmu = sqrt(2.5)\nn = 4\ngraph = edges\nedges = 1-2 2-3 3-4\n"
      "initial = random\nseed = 7\n");
  EXPECT_EQ(c.sim.graph.edge_count(), 3u);
  EXPECT_EQ(c.sim.initial_states.size(), 4u);
  EXPECT_THROW(parse_config("lambda = 0.5\nmu = 2\nn = 3\ngraph = edges\nedges = 1-2\n"),
               Disconnected);
}

TEST(Config, AgentIndicesMustBeContiguous) {
  EXPECT_THROW(parse_config("lambda = 0.5\nmu = 2\nagent.1 = cart 1.2 0 0.1 0\n"
                            "agent.3 = cart 1.2 0.1 0.1 0\n"),
               InvalidConfig);
  EXPECT_THROW(parse_config("lambda = 0.5\nmu = 2\nagent.1 = spherical 1 2 3 4\n"),
               InvalidConfig);
}

TEST(Config, UserFrameCircles) {
  const auto c = parse_config(
      "desired_center = 1, 1\ndesired_radius = 2\nboundary_center = 2, 1\n"
      "boundary_radius = 2*sqrt(2.5)\nagent.1 = cart 3 1 0.2 90\nagent.2 = cart -1 1 0.2 -90\n");
  ASSERT_TRUE(c.frame.has_value());
  EXPECT_NEAR(c.sim.ctx.pair.lambda(), 0.5, 1e-14);
  EXPECT_NEAR(std::abs(c.sim.initial_states[0].r - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(c.sim.initial_states[0].v, 0.1, 1e-15);
}

TEST(Csv, RoundTripIsExact) {
  auto cfg = load_config(bundled_config_path("paper_sync")).sim;
  cfg.t_final = 0.5;
  cfg.log_stride = 50;
  const auto res = run(cfg);
  std::stringstream ss;
  write_trajectory_csv(ss, res.log);
  const auto rows = read_trajectory_csv(ss);
  ASSERT_EQ(rows.size(), res.log.samples.size() * 5);
  std::size_t i = 0;
  for (const auto& s : res.log.samples) {
    for (std::size_t k = 0; k < s.agents.size(); ++k, ++i) {
      const auto& a = s.agents[k];
      EXPECT_EQ(rows[i][0], s.t);
      EXPECT_EQ(rows[i][1], static_cast<double>(k + 1));
      EXPECT_EQ(rows[i][2], a.r.real());
      EXPECT_EQ(rows[i][3], a.r.imag());
      EXPECT_EQ(rows[i][5], a.theta);
      EXPECT_EQ(rows[i][9], a.gamma);
      EXPECT_EQ(rows[i][12], a.u);
      EXPECT_EQ(rows[i][15], a.Omega);
      EXPECT_EQ(rows[i][16], s.V);
      EXPECT_EQ(rows[i][17], s.abs_q);
    }
  }
}

TEST(Csv, HeaderMismatchRejected) {
  std::stringstream ss("t,x\n1,2\n");
  EXPECT_THROW(read_trajectory_csv(ss), InvalidConfig);
}

TEST(Output, ReportAndPlotScript) {
  auto cfg = load_config(bundled_config_path("paper_sync")).sim;
  cfg.t_final = 0.1;
  const auto res = run(cfg);
  const std::string js = report_json(res.report, cfg);
  EXPECT_NE(js.find("\"lyapunov_monotone\": true"), std::string::npos);
  EXPECT_NE(js.find("\"envelope\""), std::string::npos);
  const std::string py = plot_script("trajectory.csv");
  EXPECT_NE(py.find("trajectory.csv"), std::string::npos);
  EXPECT_NE(py.find("genfromtxt"), std::string::npos);
}

}  // namespace
