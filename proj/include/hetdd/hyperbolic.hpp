#pragma once

// Transport d_t v + b d_x v + eta v = p on an interval: implicit upwind
// solver and the exact solution along characteristics.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "hetdd/core.hpp"

namespace hetdd {

struct TransportSpec {
  double b = 1.0;
  double eta = 0.0;
  Source rhs = zero_source();
  Trace inflow;                 // at x_min if b > 0, at x_max if b < 0
  std::vector<double> initial;  // nodal values at t = 0
  Grid grid;
  TimeGrid time;
};

inline double inflow_location(double b, const Grid& g) { return b > 0.0 ? g.x_min() : g.x_max(); }

/// |inflow(0) - initial(x^-)|, nonzero for incompatible corner data.
inline double corner_mismatch(const TransportSpec& s) {
  const std::size_t j = s.b > 0.0 ? 0 : s.grid.n_cells();
  return std::abs(s.inflow[0] - s.initial[j]);
}

inline void check(const TransportSpec& s) {
  if (s.b == 0.0 || !std::isfinite(s.b)) throw ValidationError("transport speed must be nonzero");
  if (!(s.eta >= 0.0)) throw ValidationError("transport reaction must be nonnegative");
  if (s.initial.size() != s.grid.nodes()) throw ValidationError("initial data size does not match grid");
  if (!(s.inflow.time() == s.time)) throw ValidationError("inflow trace lives on a different time grid");
  if (!s.rhs) throw ValidationError("transport source is empty");
}

/// Backward Euler in time, first-order upwind in space. Each step is one
/// sweep from the inflow node:
///   (v_j^{n+1} - v_j^n)/dt + b (v_j^{n+1} - v_{j-1}^{n+1})/dx + eta v_j^{n+1} = p(x_j, t_{n+1})
/// for b > 0, mirrored for b < 0.
inline Field solve_transport(const TransportSpec& s) {
  check(s);
  const std::size_t J = s.grid.n_cells();
  const double dt = s.time.dt();
  const double dx = s.grid.dx();
  const double cfl = std::abs(s.b) / dx;
  const double inv_dt = 1.0 / dt;
  const double denom = inv_dt + cfl + s.eta;

  Field v(s.grid, s.time);
  auto first = v.row(0);
  for (std::size_t j = 0; j <= J; ++j) first[j] = s.initial[j];

  for (std::size_t n = 0; n < s.time.n_steps(); ++n) {
    const auto old = v.row(n);
    auto next = v.row(n + 1);
    if (s.b > 0.0) {
      next[0] = s.inflow[n + 1];
      for (std::size_t j = 1; j <= J; ++j)
        next[j] = (old[j] * inv_dt + cfl * next[j - 1] + s.rhs(n + 1, j)) / denom;
    } else {
      next[J] = s.inflow[n + 1];
      for (std::size_t j = J; j-- > 0;)
        next[j] = (old[j] * inv_dt + cfl * next[j + 1] + s.rhs(n + 1, j)) / denom;
    }
    for (double x : next)
      if (!std::isfinite(x))
        throw SolverError("transport solve produced a non-finite value at step " + std::to_string(n + 1));
  }
  return v;
}

/// Transport problem with analytic data, for the characteristics solution.
struct TransportProblem {
  double b = 1.0;
  double eta = 0.0;
  double x_lo = 0.0;
  double x_hi = 1.0;
  std::function<double(double, double)> p = [](double, double) { return 0.0; };
  std::function<double(double)> g = [](double) { return 0.0; };  // inflow data
  std::function<double(double)> h = [](double) { return 0.0; };  // initial data

  double inflow_x() const { return b > 0.0 ? x_lo : x_hi; }
  /// Time for the backward characteristic through x to reach the inflow boundary.
  double tau(double x) const { return (x - inflow_x()) / b; }
};

/// Samples an analytic transport problem onto grids.
inline TransportSpec discretize(const TransportProblem& p, const Grid& grid, const TimeGrid& time) {
  TransportSpec s;
  s.b = p.b;
  s.eta = p.eta;
  s.grid = grid;
  s.time = time;
  s.rhs = function_source(p.p, grid, time);
  std::vector<double> g(time.levels());
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = p.g(time.t(n));
  s.inflow = Trace(time, inflow_location(p.b, grid), std::move(g));
  s.initial.resize(grid.nodes());
  for (std::size_t j = 0; j < grid.nodes(); ++j) s.initial[j] = p.h(grid.x(j));
  return s;
}

class QuadratureError : public SolverError {
 public:
  using SolverError::SolverError;
};

namespace detail {

struct SimpsonPanel {
  double a, m, b, fa, fm, fb, whole;
};

template <class F>
double adaptive_simpson(const F& f, const SimpsonPanel& p, double tol, int depth) {
  const double lm = 0.5 * (p.a + p.m), rm = 0.5 * (p.m + p.b);
  const double flm = f(lm), frm = f(rm);
  const double left = (p.m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - p.m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) throw QuadratureError("adaptive Simpson failed to reach tolerance");
  return adaptive_simpson(f, {p.a, lm, p.m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, {p.m, rm, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
template <class F>
double integrate(const F& f, double a, double b, double tol = 1e-10, int max_depth = 50) {
  if (b <= a) return 0.0;
  // Start from a few panels so narrow features are not stepped over.
  constexpr int panels = 8;
  const double w = (b - a) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * w, hi = i + 1 == panels ? b : lo + w, mid = 0.5 * (lo + hi);
    const double flo = f(lo), fmid = f(mid), fhi = f(hi);
    sum += detail::adaptive_simpson(f, {lo, mid, hi, flo, fmid, fhi, (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)},
                                    tol / panels, max_depth);
  }
  return sum;
}

/// Exact weak solution along characteristics:
///   v = h(x - bt) e^{-eta t} 1_{t<tau} + g(t - tau) e^{-eta tau} 1_{t>tau}
///       + int_{(t-tau)^+}^t p(x - b(t-s), s) e^{-eta (t-s)} ds.
inline double characteristics_oracle(const TransportProblem& p, double x, double t, double tol = 1e-10) {
  const double tau = p.tau(x);
  const double eta = p.eta;
  double v = 0.0;
  double s_lo = 0.0;
  if (t < tau) {
    v = p.h(x - p.b * t) * std::exp(-eta * t);
  } else {
    v = p.g(t - tau) * std::exp(-eta * tau);
    s_lo = t - tau;
  }
  auto integrand = [&](double s) { return p.p(x - p.b * (t - s), s) * std::exp(-eta * (t - s)); };
  // The integration window starts exactly at the characteristic's exit time,
  // so the kink of the extended integrand never falls inside a panel.
  v += integrate(integrand, s_lo, t, tol);
  return v;
}

}  // namespace hetdd
