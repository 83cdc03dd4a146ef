#pragma once

// Independent oracles and quick self-checks used by the `check` command and
// the test suites.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hetdd/analysis.hpp"
#include "hetdd/coupling.hpp"
#include "hetdd/hyperbolic.hpp"
#include "hetdd/parabolic.hpp"

namespace hetdd::verify {

/// Dense Gaussian elimination with partial pivoting on the expanded matrix.
inline std::vector<double> dense_solve(const Tridiagonal& m, std::vector<double> b) {
  const std::size_t n = m.size();
  std::vector<double> A(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    A[i * n + i] = m.diag[i];
    if (i > 0) A[i * n + i - 1] = m.sub[i];
    if (i + 1 < n) A[i * n + i + 1] = m.super[i];
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A[i * n + k]) > std::abs(A[p * n + k])) p = i;
    if (A[p * n + k] == 0.0) throw SingularMatrixError("dense oracle: singular matrix");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(A[k * n + j], A[p * n + j]);
      std::swap(b[k], b[p]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = A[i * n + k] / A[k * n + k];
      for (std::size_t j = k; j < n; ++j) A[i * n + j] -= l * A[k * n + j];
      b[i] -= l * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A[i * n + j] * x[j];
    x[i] = s / A[i * n + i];
  }
  return x;
}

/// Random strictly diagonally dominant tridiagonal matrix of order n.
inline Tridiagonal random_dominant(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> off(-1.0, 1.0), extra(0.1, 2.0), sign(-1.0, 1.0);
  Tridiagonal m(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) m.sub[i] = off(rng);
    if (i + 1 < n) m.super[i] = off(rng);
    const double d = std::abs(m.sub[i]) + std::abs(m.super[i]) + extra(rng);
    m.diag[i] = sign(rng) < 0.0 ? -d : d;
  }
  return m;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Max deviation between thomas_solve and the dense oracle over random systems.
inline double thomas_vs_dense(std::size_t systems, std::size_t max_n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> size(1, max_n);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  double worst = 0.0;
  for (std::size_t s = 0; s < systems; ++s) {
    const std::size_t n = size(rng);
    const auto m = random_dominant(n, rng);
    std::vector<double> b(n);
    for (auto& v : b) v = val(rng);
    const auto x = thomas_solve(m, b);
    const auto y = dense_solve(m, b);
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
  }
  return worst;
}

/// Worst relative identity residual over random exponential eigenfunctions.
inline double identity_worst(std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.1, 3.0), lognu(-6.0, 0.0), cc(0.1, 3.0), ab(-5.0, 5.0);
  std::bernoulli_distribution flip(0.5);
  double worst = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double a = flip(rng) ? mag(rng) : -mag(rng);
    const double nu = std::pow(10.0, lognu(rng));
    const double c = cc(rng), alpha = ab(rng), beta = ab(rng);
    const double r = factorization_identity_check(a, nu, c, alpha, beta) /
                     factorization_identity_scale(a, nu, c, alpha, beta);
    worst = std::max(worst, r);
  }
  return worst;
}

/// Max-norm error of implicit upwind against the characteristics solution
/// for a Gaussian transported out of (0, 1), b = 1, eta = 1, dt = dx.
/// Sampled at the levels t = 0.05 k, k = 0..10, shared by every grid with
/// n_cells divisible by 20.
inline double transport_error(std::size_t n_cells) {
  TransportProblem p;
  p.b = 1.0;
  p.eta = 1.0;
  p.h = [](double x) { return std::exp(-100.0 * (x - 0.4) * (x - 0.4)); };
  const Grid grid(0.0, 1.0, n_cells);
  const TimeGrid time(0.5, n_cells / 2);
  const Field v = solve_transport(discretize(p, grid, time));
  const std::size_t stride = std::max<std::size_t>(1, n_cells / 20);
  double err = 0.0;
  for (std::size_t n = 0; n < time.levels(); n += stride)
    for (std::size_t j = 0; j < grid.nodes(); ++j)
      err = std::max(err, std::abs(v.at(n, j) - characteristics_oracle(p, grid.x(j), time.t(n))));
  return err;
}

namespace manufactured {

constexpr double c = 1.0;

// u* = e^{-t} sin(pi (x + 1) / 2) on (-1, 1).
inline double u(double x, double t) { return std::exp(-t) * std::sin(std::numbers::pi * (x + 1) / 2); }
inline double u_x(double x, double t) {
  return std::exp(-t) * std::numbers::pi / 2 * std::cos(std::numbers::pi * (x + 1) / 2);
}
inline double u_xx(double x, double t) { return -std::pow(std::numbers::pi / 2, 2) * u(x, t); }
inline double u_t(double x, double t) { return -u(x, t); }

}  // namespace manufactured

enum class Kind { Dirichlet, Absorbing, AdvectionFlux, TransportRobin, Neumann, FluxRobin };

/// Right boundary condition of the given kind whose data is the boundary
/// operator applied to u* at x = 1.
inline RightBoundary manufactured_right(Kind k, const TimeGrid& time, double a, double nu) {
  using namespace manufactured;
  std::vector<double> g(time.levels());
  for (std::size_t n = 0; n < g.size(); ++n) {
    const double t = time.t(n), x = 1.0;
    switch (k) {
      case Kind::Dirichlet: g[n] = u(x, t); break;
      case Kind::Absorbing:
      case Kind::AdvectionFlux: g[n] = u_t(x, t) + a * u_x(x, t) + c * u(x, t); break;
      case Kind::TransportRobin: g[n] = u_t(x, t) - a * u_x(x, t) + (c + a * a / nu) * u(x, t); break;
      case Kind::Neumann: g[n] = u_x(x, t); break;
      case Kind::FluxRobin: g[n] = -nu * u_x(x, t) + a * u(x, t); break;
    }
  }
  Trace tr(time, 1.0, std::move(g));
  switch (k) {
    case Kind::Absorbing: return bc::Absorbing{tr};
    case Kind::AdvectionFlux: return bc::AdvectionFlux{tr};
    case Kind::TransportRobin: return bc::TransportRobin{tr};
    case Kind::Neumann: return bc::Neumann{tr};
    case Kind::FluxRobin: return bc::FluxRobin{tr};
    default: return bc::Dirichlet{tr};
  }
}

/// L2(x,t) error of Crank-Nicolson against u* on (-1, 1), dt = dx, with
/// f = L_ad u* and the chosen right boundary.
inline double manufactured_error(std::size_t n, Kind k, BoundaryStencil st, double a = 1.0, double nu = 0.1) {
  using namespace manufactured;
  AdvDiffSpec s;
  s.a = a;
  s.nu = nu;
  s.c = c;
  s.grid = Grid(-1.0, 1.0, n);
  s.time = TimeGrid(1.0, n / 2);
  s.rhs = function_source([a, nu](double x, double t) { return u_t(x, t) - nu * u_xx(x, t) + a * u_x(x, t) + c * u(x, t); },
                          s.grid, s.time);
  s.left = bc::Dirichlet{Trace(s.time, -1.0, 0.0)};
  s.right = manufactured_right(k, s.time, a, nu);
  s.initial.resize(s.grid.nodes());
  for (std::size_t j = 0; j < s.grid.nodes(); ++j) s.initial[j] = u(s.grid.x(j), 0.0);
  s.stencil = st;
  const Field sol = solve_advdiff(s);
  Field exact(s.grid, s.time);
  for (std::size_t m = 0; m < s.time.levels(); ++m)
    for (std::size_t j = 0; j < s.grid.nodes(); ++j) exact.at(m, j) = u(s.grid.x(j), s.time.t(m));
  return l2_spacetime_diff(sol, exact);
}

/// Fast checks run by the CLI: kernel oracle, identity, transport rate.
inline std::vector<CheckResult> self_checks() {
  std::vector<CheckResult> out;
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return std::string(buf);
  };
  const double dense = thomas_vs_dense(100, 50, 7);
  out.push_back({"thomas_vs_dense", dense <= 1e-12, "max deviation " + fmt(dense)});
  const double ident = identity_worst(1000, 11);
  out.push_back({"factorization_identity", ident <= 1e-9, "worst relative residual " + fmt(ident)});
  const double e1 = transport_error(800), e2 = transport_error(1600);
  const double ratio = e1 / e2;
  out.push_back({"transport_rate", ratio >= 1.7 && ratio <= 2.3, "error ratio " + fmt(ratio)});
  return out;
}

}  // namespace hetdd::verify
