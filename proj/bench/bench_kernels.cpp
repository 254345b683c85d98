#include <benchmark/benchmark.h>

#include <cmath>

#include "mobius_flock/kernels.hpp"
#include "mobius_flock/sim.hpp"

using namespace mobius_flock;

namespace {

struct Fixture {
  kernels::LawParams p;
  kernels::Adjacency adj;
  std::vector<double> xo, xt, dx;
  kernels::Scratch sc;

  explicit Fixture(int n) {
    const auto ctx = MobiusContext::make(0.5, std::sqrt(2.5));
    ControllerGains g;
    const auto graph = cycle_graph(n);
    p = kernels::LawParams::from(ctx, g);
    adj = kernels::Adjacency::from(graph);
    for (const auto& o : random_feasible_states(ctx, g, n, 1)) {
      const auto y = to_transformed(ctx, o);
      xo.insert(xo.end(), {o.r.real(), o.r.imag(), o.v, o.theta});
      xt.insert(xt.end(), {y.rho.real(), y.rho.imag(), y.s, y.gamma});
    }
    dx.resize(xo.size());
  }
};

template <bool Omp, bool Transformed>
void BM_Rhs(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    bool ok;
    if constexpr (Transformed) {
      ok = Omp ? kernels::rhs_transformed_omp(f.p, f.adj, f.xt.data(), f.dx.data(), f.sc)
               : kernels::rhs_transformed_serial(f.p, f.adj, f.xt.data(), f.dx.data(), f.sc);
    } else {
      ok = Omp ? kernels::rhs_original_omp(f.p, f.adj, f.xo.data(), f.dx.data(), f.sc)
               : kernels::rhs_original_serial(f.p, f.adj, f.xo.data(), f.dx.data(), f.sc);
    }
    benchmark::DoNotOptimize(ok);
    benchmark::DoNotOptimize(f.dx.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RunOneSecond(benchmark::State& state) {
  SimConfig c;
  c.ctx = MobiusContext::make(0.5, std::sqrt(2.5));
  c.graph = cycle_graph(5);
  c.initial_states = random_feasible_states(c.ctx, c.gains, 5, 2);
  c.t_final = 1.0;
  c.log_stride = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(run(c).report.macro_steps);
}

}  // namespace

#define SIZES ->Arg(5)->Arg(64)->Arg(256)->Arg(1024)
BENCHMARK(BM_Rhs<false, false>) SIZES;
BENCHMARK(BM_Rhs<true, false>) SIZES;
BENCHMARK(BM_Rhs<false, true>) SIZES;
BENCHMARK(BM_Rhs<true, true>) SIZES;
BENCHMARK(BM_RunOneSecond)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
