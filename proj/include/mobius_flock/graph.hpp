#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mobius_flock {

// Undirected, unweighted, connected interaction topology.
class InteractionGraph {
 public:
  using Edge = std::pair<int, int>;  // 0-indexed, first < second

  int n() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  const Eigen::MatrixXd& laplacian() const { return laplacian_; }
  const Eigen::MatrixXd& incidence() const { return incidence_; }
  bool circulant() const { return circulant_; }
  const std::vector<int>& neighbors(int k) const { return neighbors_[k]; }
  // Laplacian spectrum, ascending.
  const Eigen::VectorXd& spectrum() const { return spectrum_; }
  double lambda_max() const { return spectrum_(n_ - 1); }
  double algebraic_connectivity() const { return spectrum_(1); }

 private:
  friend InteractionGraph build_graph(int n, const std::vector<Edge>& edges);
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> neighbors_;
  Eigen::MatrixXd laplacian_;
  Eigen::MatrixXd incidence_;
  Eigen::VectorXd spectrum_;
  bool circulant_ = false;
};

// Edges are 1-indexed pairs {j, k}.
InteractionGraph build_graph(int n, const std::vector<std::pair<int, int>>& edges);

InteractionGraph cycle_graph(int n);
InteractionGraph path_graph(int n);
InteractionGraph complete_graph(int n);
// "cycle", "path" or "complete".
InteractionGraph preset_graph(const std::string& name, int n);

struct CirculantBasis {
  Eigen::MatrixXcd vectors;      // column l is e^{i l Phi} / sqrt(n)
  Eigen::VectorXd eigenvalues;   // matching column order
};

CirculantBasis circulant_eigenbasis(const InteractionGraph& g);

double potential_U(const InteractionGraph& g, std::span<const double> gamma);
// Same quantity as the edge sum 1/2 sum |e^{i gamma_j} - e^{i gamma_k}|^2.
double potential_U_edges(const InteractionGraph& g, std::span<const double> gamma);
std::vector<double> potential_gradient(const InteractionGraph& g,
                                       std::span<const double> gamma);
// sum over edges of |e^{i gamma_j} - e^{i gamma_k}|^2 (= 2U).
double edge_phasor_sum(const InteractionGraph& g, std::span<const double> gamma);

}  // namespace mobius_flock
