#pragma once

// Crank-Nicolson solver for d_t u - nu d_xx u + a d_x u + c u = f on an
// interval, with the boundary operators used by the couplings, and the
// tridiagonal kernel behind it.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hetdd/core.hpp"

namespace hetdd {

class SingularMatrixError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Tridiagonal matrix of order n. sub[0] and super[n-1] are unused.
struct Tridiagonal {
  std::vector<double> sub;
  std::vector<double> diag;
  std::vector<double> super;

  explicit Tridiagonal(std::size_t n = 0) : sub(n, 0.0), diag(n, 0.0), super(n, 0.0) {}
  std::size_t size() const { return diag.size(); }

  std::vector<double> multiply(std::span<const double> x) const {
    const std::size_t n = size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = diag[i] * x[i];
      if (i > 0) y[i] += sub[i] * x[i - 1];
      if (i + 1 < n) y[i] += super[i] * x[i + 1];
    }
    return y;
  }
};

/// Forward elimination of a tridiagonal matrix, reusable across right-hand
/// sides (the Crank-Nicolson step matrix is constant in time).
class TridiagonalLU {
 public:
  explicit TridiagonalLU(const Tridiagonal& m) : sub_(m.sub), pivot_(m.size()), ratio_(m.size()) {
    const std::size_t n = m.size();
    if (n == 0) return;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      scale = std::max({scale, std::abs(m.diag[i]), std::abs(m.sub[i]), std::abs(m.super[i])});
    const double tiny = 1e-300 + 1e-14 * scale;
    pivot_[0] = m.diag[0];
    if (std::abs(pivot_[0]) <= tiny) throw SingularMatrixError("zero pivot in row 0");
    for (std::size_t i = 1; i < n; ++i) {
      ratio_[i - 1] = m.super[i - 1] / pivot_[i - 1];
      pivot_[i] = m.diag[i] - m.sub[i] * ratio_[i - 1];
      if (std::abs(pivot_[i]) <= tiny || !std::isfinite(pivot_[i]))
        throw SingularMatrixError("zero pivot in row " + std::to_string(i));
    }
  }

  std::size_t size() const { return pivot_.size(); }

  /// Solves in place: rhs is overwritten with the solution.
  void solve_in_place(std::span<double> rhs) const {
    const std::size_t n = size();
    if (rhs.size() != n) throw ValidationError("tridiagonal solve: rhs size mismatch");
    if (n == 0) return;
    rhs[0] /= pivot_[0];
    for (std::size_t i = 1; i < n; ++i) rhs[i] = (rhs[i] - sub_[i] * rhs[i - 1]) / pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= ratio_[i] * rhs[i + 1];
  }

 private:
  std::vector<double> sub_;
  std::vector<double> pivot_;
  std::vector<double> ratio_;
};

/// Thomas algorithm. Throws SingularMatrixError on a vanishing pivot.
inline std::vector<double> thomas_solve(const Tridiagonal& m, std::span<const double> rhs) {
  if (rhs.size() != m.size() || m.sub.size() != m.size() || m.super.size() != m.size())
    throw ValidationError("tridiagonal solve: size mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  TridiagonalLU(m).solve_in_place(x);
  return x;
}

namespace bc {

/// u = g.
struct Dirichlet {
  Trace g;
};
/// (d_t + a d_x + c) u = g; outflow condition for a > 0.
struct Absorbing {
  Trace g;
};
/// (d_t + a d_x + c) u = g imposed at the interface by the a > 0 factorization.
struct AdvectionFlux {
  Trace g;
};
/// (d_t - a d_x + c + a^2/nu) u = g imposed at the interface by the a < 0 factorization.
struct TransportRobin {
  Trace g;
};
/// d_x u = g.
struct Neumann {
  Trace g;
};
/// -nu d_x u + a u = g.
struct FluxRobin {
  Trace g;
};

}  // namespace bc

using RightBoundary =
    std::variant<bc::Dirichlet, bc::Absorbing, bc::AdvectionFlux, bc::TransportRobin, bc::Neumann, bc::FluxRobin>;

/// Spatial difference used for d_x in non-Dirichlet boundary rows.
enum class BoundaryStencil {
  OneSided1,  // (u_J - u_{J-1}) / dx
  OneSided2,  // (3 u_J - 4 u_{J-1} + u_{J-2}) / (2 dx)
};

struct AdvDiffSpec {
  double a = 1.0;
  double nu = 1e-3;
  double c = 1.0;
  Grid grid;
  TimeGrid time;
  Source rhs = zero_source();
  bc::Dirichlet left;
  RightBoundary right;
  std::vector<double> initial;
  BoundaryStencil stencil = BoundaryStencil::OneSided2;
};

inline const Trace& boundary_trace(const RightBoundary& r) {
  return std::visit([](const auto& b) -> const Trace& { return b.g; }, r);
}

namespace detail {

// Boundary row for (d_t + speed d_x + eta) u = g with d_x one-sided and
// trapezoidal averaging in time.
struct OperatorRow {
  double speed;
  double eta;
};

inline std::optional<OperatorRow> operator_row(const RightBoundary& r, double a, double nu, double c) {
  if (std::holds_alternative<bc::Absorbing>(r) || std::holds_alternative<bc::AdvectionFlux>(r))
    return OperatorRow{a, c};
  if (std::holds_alternative<bc::TransportRobin>(r)) return OperatorRow{-a, c + a * a / nu};
  return std::nullopt;
}

}  // namespace detail

inline void check(const AdvDiffSpec& s) {
  if (!(s.nu > 0.0)) throw ValidationError("viscosity must be positive");
  if (s.grid.n_cells() < 2) throw ValidationError("advection-diffusion grid needs at least two cells");
  if (s.initial.size() != s.grid.nodes()) throw ValidationError("initial data size does not match grid");
  if (!(s.left.g.time() == s.time) || !(boundary_trace(s.right).time() == s.time))
    throw ValidationError("boundary trace lives on a different time grid");
  if (!s.rhs) throw ValidationError("advection-diffusion source is empty");
  if (s.stencil == BoundaryStencil::OneSided2 && s.grid.n_cells() < 3)
    throw ValidationError("second-order boundary stencil needs at least three cells");
}

/// Crank-Nicolson with centered differences. One tridiagonal solve per step;
/// the step matrix is factored once.
inline Field solve_advdiff(const AdvDiffSpec& s) {
  check(s);
  const std::size_t J = s.grid.n_cells();
  const std::size_t N = J + 1;
  const double dt = s.time.dt();
  const double dx = s.grid.dx();
  const double diff = s.nu / (dx * dx);
  const double adv = s.a / (2.0 * dx);

  // Interior: L = I/dt + M/2, explicit part R = I/dt - M/2 with
  // (M u)_j = -diff (u_{j+1} - 2u_j + u_{j-1}) + adv (u_{j+1} - u_{j-1}) + c u_j.
  const double m_lo = -diff - adv, m_di = 2.0 * diff + s.c, m_up = -diff + adv;

  Tridiagonal L(N);
  L.diag[0] = 1.0;
  for (std::size_t j = 1; j < J; ++j) {
    L.sub[j] = 0.5 * m_lo;
    L.diag[j] = 1.0 / dt + 0.5 * m_di;
    L.super[j] = 0.5 * m_up;
  }

  // Boundary row J as coefficients on (u_{J-2}, u_{J-1}, u_J) at level n+1.
  const auto op = detail::operator_row(s.right, s.a, s.nu, s.c);
  const bool second = s.stencil == BoundaryStencil::OneSided2;
  // d_x weights on (u_{J-2}, u_{J-1}, u_J)
  const double w2 = second ? 0.5 / dx : 0.0;
  const double w1 = second ? -2.0 / dx : -1.0 / dx;
  const double w0 = second ? 1.5 / dx : 1.0 / dx;
  double e2 = 0.0, e1 = 0.0, e0 = 1.0;
  if (op) {
    e2 = 0.5 * op->speed * w2;
    e1 = 0.5 * op->speed * w1;
    e0 = 1.0 / dt + 0.5 * op->speed * w0 + 0.5 * op->eta;
  } else if (std::holds_alternative<bc::Neumann>(s.right)) {
    e2 = w2, e1 = w1, e0 = w0;
  } else if (std::holds_alternative<bc::FluxRobin>(s.right)) {
    e2 = -s.nu * w2, e1 = -s.nu * w1, e0 = -s.nu * w0 + s.a;
  }
  // Fold the u_{J-2} entry into row J using row J-1.
  if (e2 != 0.0 && L.sub[J - 1] == 0.0)
    throw SingularMatrixError("second-order boundary row cannot be folded: row J-1 has no u_{J-2} entry");
  const double fold = (e2 != 0.0) ? e2 / L.sub[J - 1] : 0.0;
  L.sub[J] = e1 - fold * L.diag[J - 1];
  L.diag[J] = e0 - fold * L.super[J - 1];

  const TridiagonalLU lu(L);
  const Trace& gr = boundary_trace(s.right);

  Field u(s.grid, s.time);
  {
    auto first = u.row(0);
    for (std::size_t j = 0; j < N; ++j) first[j] = s.initial[j];
  }
  std::vector<double> rhs(N);
  for (std::size_t n = 0; n < s.time.n_steps(); ++n) {
    const auto old = u.row(n);
    rhs[0] = s.left.g[n + 1];
    for (std::size_t j = 1; j < J; ++j) {
      const double mu = m_lo * old[j - 1] + m_di * old[j] + m_up * old[j + 1];
      rhs[j] = old[j] / dt - 0.5 * mu + 0.5 * (s.rhs(n + 1, j) + s.rhs(n, j));
    }
    double rJ;
    if (op) {
      const double d_old = w2 * old[J - 2] + w1 * old[J - 1] + w0 * old[J];
      rJ = old[J] / dt - 0.5 * op->speed * d_old - 0.5 * op->eta * old[J] + 0.5 * (gr[n + 1] + gr[n]);
    } else {
      rJ = gr[n + 1];
    }
    rhs[J] = rJ - fold * rhs[J - 1];

    lu.solve_in_place(rhs);
    auto next = u.row(n + 1);
    for (std::size_t j = 0; j < N; ++j) {
      if (!std::isfinite(rhs[j]))
        throw SolverError("advection-diffusion solve produced a non-finite value at step " +
                          std::to_string(n + 1));
      next[j] = rhs[j];
    }
  }
  return u;
}

}  // namespace hetdd
