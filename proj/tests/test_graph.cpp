#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mobius_flock/errors.hpp"
#include "mobius_flock/graph.hpp"

using namespace mobius_flock;

namespace {

TEST(Graph, CycleFiveSpectrum) {
  const auto g = cycle_graph(5);
  EXPECT_EQ(g.n(), 5);
  EXPECT_EQ(g.edge_count(), 5u);
  EXPECT_TRUE(g.circulant());
  EXPECT_NEAR(g.lambda_max(), 2.0 - 2.0 * std::cos(4.0 * std::numbers::pi / 5.0), 1e-12);
  EXPECT_NEAR(g.lambda_max(), 3.618, 1e-3);
  EXPECT_NEAR(g.spectrum()(0), 0.0, 1e-12);
  EXPECT_GT(g.algebraic_connectivity(), 0.0);
}

TEST(Graph, LaplacianIsIncidenceProduct) {
  const auto g = build_graph(4, {{1, 2}, {2, 3}, {3, 4}, {1, 3}});
  const Eigen::MatrixXd& B = g.incidence();
  EXPECT_LT((B * B.transpose() - g.laplacian()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(g.laplacian().rowwise().sum().cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_FALSE(g.circulant());
}

TEST(Graph, Rejections) {
  EXPECT_THROW(build_graph(3, {{1, 1}, {1, 2}, {2, 3}}), SelfLoop);
  EXPECT_THROW(build_graph(3, {{1, 2}, {2, 1}, {2, 3}}), DuplicateEdge);
  EXPECT_THROW(build_graph(4, {{1, 2}, {3, 4}}), Disconnected);
  EXPECT_THROW(build_graph(3, {{1, 4}}), InvalidGraph);
  EXPECT_THROW(preset_graph("star", 4), InvalidGraph);
}

TEST(Graph, Presets) {
  EXPECT_TRUE(complete_graph(6).circulant());
  EXPECT_FALSE(path_graph(4).circulant());
  EXPECT_EQ(complete_graph(6).edge_count(), 15u);
  EXPECT_EQ(preset_graph("path", 5).edge_count(), 4u);
}

TEST(Graph, Neighbors) {
  const auto g = cycle_graph(5);
  auto nb = g.neighbors(0);
  std::sort(nb.begin(), nb.end());
  EXPECT_EQ(nb, (std::vector<int>{1, 4}));
}

TEST(Potential, SyncAndBalanceValues) {
  const auto g = cycle_graph(5);
  std::vector<double> same(5, 0.7);
  EXPECT_NEAR(potential_U(g, same), 0.0, 1e-15);
  // Splay state on the cycle with phase step 4 pi / 5 reaches N lambda_max / 2.
  std::vector<double> splay(5);
  for (int k = 0; k < 5; ++k) splay[k] = 4.0 * std::numbers::pi * k / 5.0;
  EXPECT_NEAR(potential_U(g, splay), 5.0 * g.lambda_max() / 2.0, 1e-12);
  EXPECT_NEAR(edge_phasor_sum(g, splay), 2.0 * potential_U(g, splay), 1e-12);
}

TEST(Potential, UpperBoundOnCirculant) {
  const auto g = cycle_graph(7);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-5.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> gam(7);
    for (auto& x : gam) x = d(rng);
    EXPECT_LE(potential_U(g, gam), 7.0 * g.lambda_max() / 2.0 + 1e-12);
  }
}

TEST(Potential, GradientMatchesSineSum) {
  const auto g = cycle_graph(5);
  const std::vector<double> gam{0.1, 1.3, -0.4, 2.2, 0.9};
  const auto grad = potential_gradient(g, gam);
  for (int k = 0; k < 5; ++k) {
    double expect = 0.0;
    for (int j : g.neighbors(k)) expect -= std::sin(gam[j] - gam[k]);
    EXPECT_NEAR(grad[k], expect, 1e-14);
  }
}

TEST(Circulant, FourierBasisDiagonalizes) {
  const auto g = cycle_graph(6);
  const auto b = circulant_eigenbasis(g);
  const Eigen::MatrixXcd L = g.laplacian().cast<std::complex<double>>();
  for (int l = 0; l < 6; ++l) {
    const Eigen::VectorXcd v = b.vectors.col(l);
    EXPECT_LT((L * v - b.eigenvalues(l) * v).norm(), 1e-12);
  }
  EXPECT_THROW(circulant_eigenbasis(path_graph(4)), NotCirculant);
}

}  // namespace
