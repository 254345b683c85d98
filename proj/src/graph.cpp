#include "mobius_flock/graph.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "mobius_flock/errors.hpp"

namespace mobius_flock {

InteractionGraph build_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 2) throw InvalidGraph("need at least two agents, got " + std::to_string(n));
  std::set<InteractionGraph::Edge> seen;
  InteractionGraph g;
  g.n_ = n;
  g.neighbors_.assign(n, {});
  for (auto [a, b] : edges) {
    if (a < 1 || a > n || b < 1 || b > n) {
      throw InvalidGraph("edge {" + std::to_string(a) + "," + std::to_string(b) +
                         "} out of range 1.." + std::to_string(n));
    }
    if (a == b) throw SelfLoop("self loop at node " + std::to_string(a));
    InteractionGraph::Edge e{std::min(a, b) - 1, std::max(a, b) - 1};
    if (!seen.insert(e).second) {
      throw DuplicateEdge("edge {" + std::to_string(a) + "," + std::to_string(b) +
                          "} listed twice");
    }
    g.edges_.push_back(e);
    g.neighbors_[e.first].push_back(e.second);
    g.neighbors_[e.second].push_back(e.first);
  }
  for (auto& nb : g.neighbors_) std::sort(nb.begin(), nb.end());

  const auto m = static_cast<Eigen::Index>(g.edges_.size());
  g.incidence_ = Eigen::MatrixXd::Zero(n, m);
  for (Eigen::Index e = 0; e < m; ++e) {
    g.incidence_(g.edges_[e].first, e) = 1.0;
    g.incidence_(g.edges_[e].second, e) = -1.0;
  }
  g.laplacian_ = g.incidence_ * g.incidence_.transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.laplacian_,
                                                    Eigen::EigenvaluesOnly);
  g.spectrum_ = es.eigenvalues();
  if (!(g.spectrum_(1) > 1e-10)) {
    throw Disconnected("second-smallest Laplacian eigenvalue " +
                       std::to_string(g.spectrum_(1)));
  }

  // Integer entries make the cyclic-shift comparison exact.
  g.circulant_ = true;
  for (int i = 1; i < n && g.circulant_; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.laplacian_(i, (j + i) % n) != g.laplacian_(0, j)) {
        g.circulant_ = false;
        break;
      }
    }
  }
  return g;
}

InteractionGraph cycle_graph(int n) {
  if (n < 3) return path_graph(n);
  std::vector<std::pair<int, int>> e;
  for (int k = 1; k <= n; ++k) e.emplace_back(k, k % n + 1);
  return build_graph(n, e);
}

InteractionGraph path_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int k = 1; k < n; ++k) e.emplace_back(k, k + 1);
  return build_graph(n, e);
}

InteractionGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int j = 1; j <= n; ++j)
    for (int k = j + 1; k <= n; ++k) e.emplace_back(j, k);
  return build_graph(n, e);
}

InteractionGraph preset_graph(const std::string& name, int n) {
  if (name == "cycle") return cycle_graph(n);
  if (name == "path") return path_graph(n);
  if (name == "complete") return complete_graph(n);
  throw InvalidGraph("unknown preset '" + name + "'");
}

CirculantBasis circulant_eigenbasis(const InteractionGraph& g) {
  if (!g.circulant()) throw NotCirculant("Laplacian rows are not cyclic shifts");
  const int n = g.n();
  const Eigen::MatrixXd& L = g.laplacian();
  CirculantBasis out;
  out.vectors.resize(n, n);
  out.eigenvalues.resize(n);
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  for (int l = 0; l < n; ++l) {
    std::complex<double> lam = 0.0;
    for (int j = 0; j < n; ++j) {
      lam += L(0, j) * std::polar(1.0, 2.0 * std::numbers::pi * l * j / n);
    }
    out.eigenvalues(l) = lam.real();
    for (int k = 0; k < n; ++k) {
      out.vectors(k, l) = inv * std::polar(1.0, 2.0 * std::numbers::pi * l * k / n);
    }
  }
  const Eigen::MatrixXcd Lc = L.cast<std::complex<double>>();
  const double resid = (Lc * out.vectors -
                        out.vectors * out.eigenvalues.cast<std::complex<double>>().asDiagonal())
                           .cwiseAbs()
                           .maxCoeff();
  if (resid > 1e-10) {
    throw NotCirculant("Fourier basis residual " + std::to_string(resid));
  }
  return out;
}

double potential_U(const InteractionGraph& g, std::span<const double> gamma) {
  const int n = g.n();
  Eigen::VectorXcd z(n);
  for (int k = 0; k < n; ++k) z(k) = std::polar(1.0, gamma[k]);
  return 0.5 * (z.adjoint() * (g.laplacian() * z))(0).real();
}

double edge_phasor_sum(const InteractionGraph& g, std::span<const double> gamma) {
  double acc = 0.0;
  for (auto [j, k] : g.edges()) {
    acc += std::norm(std::polar(1.0, gamma[j]) - std::polar(1.0, gamma[k]));
  }
  return acc;
}

double potential_U_edges(const InteractionGraph& g, std::span<const double> gamma) {
  return 0.5 * edge_phasor_sum(g, gamma);
}

std::vector<double> potential_gradient(const InteractionGraph& g,
                                       std::span<const double> gamma) {
  std::vector<double> grad(g.n(), 0.0);
  for (int k = 0; k < g.n(); ++k) {
    double acc = 0.0;
    for (int j : g.neighbors(k)) acc += std::sin(gamma[j] - gamma[k]);
    grad[k] = -acc;
  }
  return grad;
}

}  // namespace mobius_flock
