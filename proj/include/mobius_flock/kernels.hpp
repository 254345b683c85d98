#pragma once

// Closed-loop right-hand sides on flat state arrays.  Agent k occupies
// x[4k .. 4k+3] = (Re position, Im position, speed, heading).  The serial
// versions are the reference; the OpenMP versions must match them bit for bit.

#include <vector>

#include "mobius_flock/control.hpp"
#include "mobius_flock/graph.hpp"

namespace mobius_flock::kernels {

struct Adjacency {
  std::vector<int> offsets;  // size n + 1
  std::vector<int> index;

  static Adjacency from(const InteractionGraph& g);
  int n() const { return static_cast<int>(offsets.size()) - 1; }
};

struct LawParams {
  double alpha = 0.5;
  double sigma = 0.5;
  double delta_T = 0.0;
  ControllerGains gains;

  static LawParams from(const MobiusContext& ctx, const ControllerGains& gains);
};

// Per-agent trig scratch, 2n (transformed) or 5n (original) values.
struct Scratch {
  std::vector<double> buf;
  std::vector<long double> lbuf;
};

// Return false when any agent leaves a barrier interior or hits a singularity.
// The long double overloads serve extended-precision runs.
bool rhs_transformed_serial(const LawParams& p, const Adjacency& adj, const double* x,
                            double* dx, Scratch& scratch);
bool rhs_transformed_omp(const LawParams& p, const Adjacency& adj, const double* x,
                         double* dx, Scratch& scratch);
bool rhs_original_serial(const LawParams& p, const Adjacency& adj, const double* x,
                         double* dx, Scratch& scratch);
bool rhs_original_omp(const LawParams& p, const Adjacency& adj, const double* x,
                      double* dx, Scratch& scratch);

bool rhs_transformed_serial(const LawParams& p, const Adjacency& adj, const long double* x,
                            long double* dx, Scratch& scratch);
bool rhs_transformed_omp(const LawParams& p, const Adjacency& adj, const long double* x,
                         long double* dx, Scratch& scratch);
bool rhs_original_serial(const LawParams& p, const Adjacency& adj, const long double* x,
                         long double* dx, Scratch& scratch);
bool rhs_original_omp(const LawParams& p, const Adjacency& adj, const long double* x,
                      long double* dx, Scratch& scratch);

// Maps n original-plane agents to the transformed plane at the working precision.
void original_to_transformed(const LawParams& p, const double* xo, double* xt, int n);
void original_to_transformed(const LawParams& p, const long double* xo, long double* xt,
                             int n);

}  // namespace mobius_flock::kernels
