#include "mobius_flock/kernels.hpp"

#include <cmath>

namespace mobius_flock::kernels {

Adjacency Adjacency::from(const InteractionGraph& g) {
  Adjacency a;
  a.offsets.push_back(0);
  for (int k = 0; k < g.n(); ++k) {
    for (int j : g.neighbors(k)) a.index.push_back(j);
    a.offsets.push_back(static_cast<int>(a.index.size()));
  }
  return a;
}

LawParams LawParams::from(const MobiusContext& ctx, const ControllerGains& gains) {
  return {ctx.alpha, ctx.sigma, ctx.delta_T, gains};
}

namespace {

template <class R>
inline bool finite4(const R* d) {
  return std::isfinite(d[0]) && std::isfinite(d[1]) && std::isfinite(d[2]) &&
         std::isfinite(d[3]);
}

// cs[2k] = cos gamma_k, cs[2k+1] = sin gamma_k
template <class R>
inline void trig_pass(const R* x, R* cs, int k) {
  cs[2 * k] = std::cos(x[4 * k + 3]);
  cs[2 * k + 1] = std::sin(x[4 * k + 3]);
}

template <class R>
inline bool transformed_agent(const LawParams& p, const Adjacency& adj, const R* x,
                              const R* cs, R* dx, int k) {
  const R* xk = x + 4 * k;
  const R sigma = p.sigma;
  const R c = cs[2 * k], s = cs[2 * k + 1];
  R G = 0;
  for (int e = adj.offsets[k]; e < adj.offsets[k + 1]; ++e) {
    const int j = adj.index[e];
    // sin(gamma_j - gamma_k)
    G -= cs[2 * j + 1] * c - cs[2 * j] * s;
  }
  const R ex = xk[0] - sigma * s;
  const R ey = xk[1] + sigma * c;
  const R pk = xk[0] * c + xk[1] * s;
  const auto t = detail::transformed_law_t<R>(p.delta_T, sigma, p.gains, pk,
                                              ex * ex + ey * ey, xk[2] - R(p.gains.s_d), G);
  R* d = dx + 4 * k;
  d[0] = xk[2] * c;
  d[1] = xk[2] * s;
  d[2] = t.nu;
  d[3] = t.Omega;
  return t.ok && finite4(d);
}

// Per agent: cos Theta, sin Theta, Re rho, Im rho, |df/dr|, Theta = theta + chi.
constexpr int kOrigStride = 5;

template <class R>
inline bool original_pass(const LawParams& p, const R* x, R* sc, int k) {
  const R* xk = x + 4 * k;
  const R a = p.alpha;
  const R wr = 1 + a * xk[0], wi = a * xk[1];
  const R w2 = wr * wr + wi * wi;
  R* o = sc + kOrigStride * k;
  if (!(w2 > R(1e-24))) {
    o[0] = o[1] = o[2] = o[3] = o[4] = 0;
    return false;
  }
  // df/dr = a(1 - a^2) conj(w)^2 / |w|^4
  const R c0 = a * (1 - a * a) / (w2 * w2);
  const R dfr = c0 * (wr * wr - wi * wi);
  const R dfi = c0 * (-2 * wr * wi);
  const R Theta = xk[3] + std::atan2(dfi, dfr);
  o[0] = std::cos(Theta);
  o[1] = std::sin(Theta);
  // rho = a (r + a) conj(w) / |w|^2
  const R nr = a * (xk[0] + a), ni = a * xk[1];
  o[2] = (nr * wr + ni * wi) / w2;
  o[3] = (ni * wr - nr * wi) / w2;
  o[4] = std::abs(a * (1 - a * a)) / w2;
  return true;
}

template <class R>
inline bool original_agent(const LawParams& p, const Adjacency& adj, const R* x,
                           const R* sc, R* dx, int k) {
  const R* xk = x + 4 * k;
  const R* o = sc + kOrigStride * k;
  const R sigma = p.sigma;
  const R cT = o[0], sT = o[1];
  R tau = 0;
  for (int e = adj.offsets[k]; e < adj.offsets[k + 1]; ++e) {
    const R* oj = sc + kOrigStride * adj.index[e];
    tau -= oj[1] * cT - oj[0] * sT;
  }
  const R h = o[4] * xk[2] - R(p.gains.s_d);
  const R m = o[2] * cT + o[3] * sT;
  const R nx = o[2] - sigma * sT;
  const R ny = o[3] + sigma * cT;
  const auto t =
      detail::transformed_law_t<R>(p.delta_T, sigma, p.gains, m, nx * nx + ny * ny, h, tau);

  const R a = p.alpha;
  const R ct = std::cos(xk[3]), st = std::sin(xk[3]);
  const R wr = 1 + a * xk[0], wi = a * xk[1];
  const R w2 = wr * wr + wi * wi;
  const R v = xk[2];
  R* d = dx + 4 * k;
  d[0] = v * ct;
  d[1] = v * st;
  // u = |w^2 / (a(1-a^2))| nu + 2 a v <w, r_dot>/|w|^2
  d[2] = t.nu / o[4] + 2 * a * v * v * (wr * ct + wi * st) / w2;
  // omega = Omega - chi_dot, chi_dot = -2 a v Im(e^{i theta} conj(w))/|w|^2
  d[3] = t.Omega + 2 * a * v * (st * wr - ct * wi) / w2;
  return t.ok && finite4(d);
}

template <class R>
void map_original(const LawParams& p, const R* xo, R* xt, int n) {
  R o[kOrigStride];
  for (int k = 0; k < n; ++k) {
    original_pass(p, xo + 4 * k, o, 0);
    const R a = p.alpha;
    const R wr = 1 + a * xo[4 * k], wi = a * xo[4 * k + 1];
    const R c0 = a * (1 - a * a);
    xt[4 * k] = o[2];
    xt[4 * k + 1] = o[3];
    xt[4 * k + 2] = o[4] * xo[4 * k + 2];
    xt[4 * k + 3] = xo[4 * k + 3] + std::atan2(c0 * (-2 * wr * wi), c0 * (wr * wr - wi * wi));
  }
}

template <class R>
std::vector<R>& buffer(Scratch& s);
template <>
std::vector<double>& buffer<double>(Scratch& s) { return s.buf; }
template <>
std::vector<long double>& buffer<long double>(Scratch& s) { return s.lbuf; }

template <class R>
bool transformed_serial(const LawParams& p, const Adjacency& adj, const R* x, R* dx,
                        Scratch& scratch) {
  const int n = adj.n();
  auto& buf = buffer<R>(scratch);
  buf.resize(2 * static_cast<std::size_t>(n));
  R* cs = buf.data();
  for (int k = 0; k < n; ++k) trig_pass(x, cs, k);
  bool ok = true;
  for (int k = 0; k < n; ++k) ok = transformed_agent(p, adj, x, cs, dx, k) && ok;
  return ok;
}

template <class R>
bool transformed_omp(const LawParams& p, const Adjacency& adj, const R* x, R* dx,
                     Scratch& scratch) {
  const int n = adj.n();
  auto& buf = buffer<R>(scratch);
  buf.resize(2 * static_cast<std::size_t>(n));
  R* cs = buf.data();
  bool ok = true;
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int k = 0; k < n; ++k) trig_pass(x, cs, k);
#pragma omp for schedule(static) reduction(&& : ok)
    for (int k = 0; k < n; ++k) ok = transformed_agent(p, adj, x, cs, dx, k) && ok;
  }
  return ok;
}

template <class R>
bool original_serial(const LawParams& p, const Adjacency& adj, const R* x, R* dx,
                     Scratch& scratch) {
  const int n = adj.n();
  auto& buf = buffer<R>(scratch);
  buf.resize(kOrigStride * static_cast<std::size_t>(n));
  R* sc = buf.data();
  bool ok = true;
  for (int k = 0; k < n; ++k) ok = original_pass(p, x, sc, k) && ok;
  if (!ok) return false;
  for (int k = 0; k < n; ++k) ok = original_agent(p, adj, x, sc, dx, k) && ok;
  return ok;
}

template <class R>
bool original_omp(const LawParams& p, const Adjacency& adj, const R* x, R* dx,
                  Scratch& scratch) {
  const int n = adj.n();
  auto& buf = buffer<R>(scratch);
  buf.resize(kOrigStride * static_cast<std::size_t>(n));
  R* sc = buf.data();
  bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (int k = 0; k < n; ++k) ok = original_pass(p, x, sc, k) && ok;
  if (!ok) return false;
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (int k = 0; k < n; ++k) ok = original_agent(p, adj, x, sc, dx, k) && ok;
  return ok;
}

}  // namespace

#define MOBIUS_FLOCK_KERNELS(R)                                                          \
  bool rhs_transformed_serial(const LawParams& p, const Adjacency& adj, const R* x,     \
                              R* dx, Scratch& s) {                                      \
    return transformed_serial(p, adj, x, dx, s);                                        \
  }                                                                                     \
  bool rhs_transformed_omp(const LawParams& p, const Adjacency& adj, const R* x, R* dx, \
                           Scratch& s) {                                                \
    return transformed_omp(p, adj, x, dx, s);                                           \
  }                                                                                     \
  bool rhs_original_serial(const LawParams& p, const Adjacency& adj, const R* x, R* dx, \
                           Scratch& s) {                                                \
    return original_serial(p, adj, x, dx, s);                                           \
  }                                                                                     \
  bool rhs_original_omp(const LawParams& p, const Adjacency& adj, const R* x, R* dx,    \
                        Scratch& s) {                                                   \
    return original_omp(p, adj, x, dx, s);                                              \
  }                                                                                     \
  void original_to_transformed(const LawParams& p, const R* xo, R* xt, int n) {         \
    map_original(p, xo, xt, n);                                                         \
  }

MOBIUS_FLOCK_KERNELS(double)
MOBIUS_FLOCK_KERNELS(long double)

#undef MOBIUS_FLOCK_KERNELS

}  // namespace mobius_flock::kernels
