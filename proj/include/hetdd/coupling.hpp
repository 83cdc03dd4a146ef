#pragma once

// Heterogeneous couplings of advection-diffusion on (-l1, 0) with transport on
// (0, l2): the factorization algorithms for both signs of a, the classical
// variational and non-variational transmission conditions, and the
// monodomain viscous reference.

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hetdd/core.hpp"
#include "hetdd/hyperbolic.hpp"
#include "hetdd/parabolic.hpp"

namespace hetdd {

class ConvergenceError : public SolverError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : SolverError(what), history_(std::move(history)) {}
  /// Relative interface increments, one per iteration.
  const std::vector<double>& history() const { return history_; }

 private:
  std::vector<double> history_;
};

struct InterfaceRecord {
  std::string label;  // e.g. "u_ma^1(0)", "u_ad^2(0)"
  Trace trace;
};

struct CouplingDiagnostics {
  std::size_t iterations = 0;
  bool converged = true;
  std::vector<double> increments;          // relative interface increments
  std::vector<InterfaceRecord> interface;  // traces exchanged, in order
  std::vector<std::string> warnings;
};

struct CoupledSolution {
  Field u_ad;  // on (-l1, 0)
  Field u_a;   // on (0, l2)
  CouplingDiagnostics diagnostics;
};

/// Discretization knobs shared by every solve in a coupling run.
struct SolverOptions {
  BoundaryStencil stencil = BoundaryStencil::OneSided2;
};

/// w = d_tt v + 2c d_t v + c^2 v, nodewise, second order in time. Central
/// differences at interior levels, one-sided differences at t = 0 and t = T
/// (four-point for d_tt when at least four levels exist).
inline Field apply_remainder(const Field& v, double c) {
  const std::size_t L = v.time().levels();
  if (L < 3) throw ValidationError("remainder needs at least three time levels");
  const double dt = v.time().dt();
  const double idt = 1.0 / dt, idt2 = 1.0 / (dt * dt);
  const std::size_t nodes = v.grid().nodes();
  Field w(v.grid(), v.time());
  auto emit = [&](std::size_t n, std::size_t j, double vtt, double vt) {
    w.at(n, j) = vtt + 2.0 * c * vt + c * c * v.at(n, j);
  };
  const bool four = L >= 4;
  for (std::size_t j = 0; j < nodes; ++j) {
    {
      const double v0 = v.at(0, j), v1 = v.at(1, j), v2 = v.at(2, j);
      const double vt = (-3.0 * v0 + 4.0 * v1 - v2) * 0.5 * idt;
      const double vtt = four ? (2.0 * v0 - 5.0 * v1 + 4.0 * v2 - v.at(3, j)) * idt2 : (v0 - 2.0 * v1 + v2) * idt2;
      emit(0, j, vtt, vt);
    }
    for (std::size_t n = 1; n + 1 < L; ++n) {
      const double vm = v.at(n - 1, j), v0 = v.at(n, j), vp = v.at(n + 1, j);
      emit(n, j, (vp - 2.0 * v0 + vm) * idt2, (vp - vm) * 0.5 * idt);
    }
    {
      const std::size_t e = L - 1;
      const double v0 = v.at(e, j), v1 = v.at(e - 1, j), v2 = v.at(e - 2, j);
      const double vt = (3.0 * v0 - 4.0 * v1 + v2) * 0.5 * idt;
      const double vtt =
          four ? (2.0 * v0 - 5.0 * v1 + 4.0 * v2 - v.at(e - 3, j)) * idt2 : (v0 - 2.0 * v1 + v2) * idt2;
      emit(e, j, vtt, vt);
    }
  }
  return w;
}

/// |(nu/a^2)(L_ma L_a - R) u - L_ad u| on u = e^{alpha x + beta t}, for
/// which every operator acts as multiplication by its symbol. For a < 0 the
/// factors compose in the reverse order; the symbols commute, so the
/// residual is the same expression.
inline double factorization_identity_check(double a, double nu, double c, double alpha, double beta) {
  const double s_a = beta + a * alpha + c;                    // L_a
  const double s_ma = beta - a * alpha + c + a * a / nu;      // L_ma
  const double s_r = (beta + c) * (beta + c);                 // R
  const double s_ad = beta - nu * alpha * alpha + a * alpha + c;  // L_ad
  const double composed = a > 0.0 ? s_ma * s_a : s_a * s_ma;
  return std::abs(nu / (a * a) * (composed - s_r) - s_ad);
}

/// Magnitude of the terms entering factorization_identity_check, for relative tolerances.
inline double factorization_identity_scale(double a, double nu, double c, double alpha, double beta) {
  const double s_a = beta + a * alpha + c;
  const double s_ma = beta - a * alpha + c + a * a / nu;
  const double s_r = (beta + c) * (beta + c);
  return nu / (a * a) * (std::abs(s_ma * s_a) + s_r) + std::abs(beta) + nu * alpha * alpha +
         std::abs(a * alpha) + c;
}

namespace detail {

inline std::shared_ptr<const Field> sample_field(const DataSpec& d, const Grid& g, const TimeGrid& time) {
  auto f = std::make_shared<Field>(g, time);
  for (std::size_t n = 0; n < time.levels(); ++n) {
    const double t = time.t(n);
    for (std::size_t j = 0; j < g.nodes(); ++j) f->at(n, j) = eval(d, g.x(j), t);
  }
  return f;
}

// Subdomain grids plus the forcing sampled once on each of them.
struct Setup {
  Decomposition dec;
  TimeGrid time;
  std::shared_ptr<const Field> f1;
  std::shared_ptr<const Field> f2;
};

inline Setup make_setup(const ProblemSpec& spec, const Grid& grid, const TimeGrid& time) {
  auto report = validate(spec, grid, time);
  if (!report.ok()) throw ValidationError(report.violations.front());
  auto dec = Decomposition::of(grid);
  auto f1 = sample_field(spec.f, dec.omega1, time);
  auto f2 = sample_field(spec.f, dec.omega2, time);
  return {dec, time, std::move(f1), std::move(f2)};
}

inline std::vector<double> trace_values(const Field& f, std::size_t j) { return column(f, j).values(); }

inline double l2_time(const std::vector<double>& v, double dt) {
  double s = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double w = (n == 0 || n + 1 == v.size()) ? 0.5 : 1.0;
    s += w * v[n] * v[n];
  }
  return std::sqrt(s * dt);
}

inline AdvDiffSpec omega1_spec(const ProblemSpec& spec, const Setup& s, RightBoundary right,
                               const SolverOptions& opt) {
  AdvDiffSpec ad;
  ad.a = spec.a;
  ad.nu = spec.nu;
  ad.c = spec.c;
  ad.grid = s.dec.omega1;
  ad.time = s.time;
  ad.rhs = field_source(s.f1);
  ad.left = bc::Dirichlet{sample_trace(spec.g1, s.time, -spec.l1)};
  ad.right = std::move(right);
  ad.initial = sample_initial(spec.h, ad.grid);
  ad.stencil = opt.stencil;
  return ad;
}

/// L_a u_a = f on (0, l2) with the given inflow trace and initial data h.
inline Field omega2_transport(const ProblemSpec& spec, const Setup& s, Trace inflow) {
  TransportSpec ts;
  ts.b = spec.a;
  ts.eta = spec.c;
  ts.grid = s.dec.omega2;
  ts.time = s.time;
  ts.rhs = field_source(s.f2);
  ts.inflow = std::move(inflow);
  ts.initial = sample_initial(spec.h, ts.grid);
  return solve_transport(ts);
}

// (a^2/nu) f + R v on Omega2, as a nodal field.
inline std::shared_ptr<const Field> corrected_source(const ProblemSpec& spec, const Setup& s, const Field& v) {
  auto w = std::make_shared<Field>(apply_remainder(v, spec.c));
  const double k = spec.a * spec.a / spec.nu;
  auto& out = w->values();
  const auto& f = s.f2->values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += k * f[i];
  return w;
}

inline void note_corner(CouplingDiagnostics& d, const TransportSpec& ts, const std::string& what) {
  constexpr double tol = 1e-8;
  const double m = corner_mismatch(ts);
  if (m > tol) d.warnings.push_back(what + ": incompatible corner data (mismatch " + std::to_string(m) + ")");
}

}  // namespace detail

/// Fully viscous solution on (-l1, l2) with the sign-dependent outer boundary
/// operators (Dirichlet at -l1; absorbing at l2 for a > 0, Dirichlet for a < 0).
inline Field solve_monodomain(const ProblemSpec& spec, const Grid& grid, const TimeGrid& time,
                              const SolverOptions& opt = {}) {
  auto report = validate(spec, grid, time);
  if (!report.ok()) throw ValidationError(report.violations.front());
  AdvDiffSpec ad;
  ad.a = spec.a;
  ad.nu = spec.nu;
  ad.c = spec.c;
  ad.grid = grid;
  ad.time = time;
  ad.rhs = field_source(detail::sample_field(spec.f, grid, time));
  ad.left = bc::Dirichlet{sample_trace(spec.g1, time, -spec.l1)};
  Trace g2 = sample_trace(spec.g2, time, spec.l2);
  if (spec.a > 0.0)
    ad.right = bc::Absorbing{std::move(g2)};
  else
    ad.right = bc::Dirichlet{std::move(g2)};
  ad.initial = sample_initial(spec.h, grid);
  ad.stencil = opt.stencil;
  return solve_advdiff(ad);
}

/// Splits a field over the global grid into its (Omega1, Omega2) restrictions.
inline std::pair<Field, Field> split(const Field& global, const Decomposition& dec) {
  return {global.restrict_to(0, dec.interface_index, dec.omega1),
          global.restrict_to(dec.interface_index, dec.global.n_cells(), dec.omega2)};
}

/// Factorization algorithm for a > 0. Each sweep k solves
///   L_a u_a^k = f on Omega2, u_a^k(0) = u_ad^{k-1}(0), u_a^k(., 0) = h;
///   L_ma u_ma^k = (a^2/nu) f + R u_a^k on Omega2, u_ma^k(l2) = g2,
///     u_ma^k(., 0) = f(., 0) + nu h'';
///   L_ad u_ad^k = f on Omega1, u_ad^k(-l1) = g1, L_a u_ad^k(0) = u_ma^k(0).
inline CoupledSolution solve_factorization_pos(const ProblemSpec& spec, const Grid& grid, const TimeGrid& time,
                                               std::size_t k_iters, std::optional<Trace> initial_guess = {},
                                               const SolverOptions& opt = {}) {
  if (!(spec.a > 0.0)) throw ValidationError("positive-advection factorization needs a > 0");
  if (k_iters == 0) throw ValidationError("factorization needs at least one iteration");
  const auto s = detail::make_setup(spec, grid, time);
  Trace guess = initial_guess ? *initial_guess : Trace(time, 0.0);
  if (!(guess.time() == time)) throw ValidationError("initial guess lives on a different time grid");
  if (!has_derivatives(spec.h))
    throw UnsupportedDerivative("factorization needs d_xx h");

  const Grid& g2 = s.dec.omega2;
  const double eta_ma = spec.c + spec.a * spec.a / spec.nu;
  std::vector<double> ma_initial(g2.nodes());
  for (std::size_t j = 0; j < g2.nodes(); ++j)
    ma_initial[j] = eval(spec.f, g2.x(j), 0.0) + spec.nu * eval_dxx(spec.h, g2.x(j), 0.0);
  const Trace ma_inflow = sample_trace(spec.g2, time, spec.l2);

  CoupledSolution out;
  auto& diag = out.diagnostics;
  Trace lambda = std::move(guess);
  for (std::size_t k = 1; k <= k_iters; ++k) {
    const std::string tag = std::to_string(k);
    out.u_a = detail::omega2_transport(spec, s, Trace(time, 0.0, lambda.values()));

    TransportSpec ma;
    ma.b = -spec.a;
    ma.eta = eta_ma;
    ma.grid = g2;
    ma.time = time;
    ma.rhs = field_source(detail::corrected_source(spec, s, out.u_a));
    ma.inflow = ma_inflow;
    ma.initial = ma_initial;
    detail::note_corner(diag, ma, "u_ma^" + tag);
    const Field u_ma = solve_transport(ma);
    Trace ma_trace = column(u_ma, 0);

    out.u_ad = solve_advdiff(detail::omega1_spec(spec, s, bc::AdvectionFlux{ma_trace}, opt));
    Trace next = column(out.u_ad, s.dec.omega1.n_cells());

    std::vector<double> delta(next.size());
    for (std::size_t n = 0; n < delta.size(); ++n) delta[n] = next[n] - lambda[n];
    const double denom = detail::l2_time(next.values(), time.dt());
    diag.increments.push_back(denom > 0.0 ? detail::l2_time(delta, time.dt()) / denom : 0.0);
    diag.interface.push_back({"u_ma^" + tag + "(0)", std::move(ma_trace)});
    diag.interface.push_back({"u_ad^" + tag + "(0)", next});
    lambda = std::move(next);
  }
  diag.iterations = k_iters;
  return out;
}

/// Factorization algorithm for a < 0, one pass:
///   L_a u_a^1 = f on Omega2, u_a^1(l2) = g2, u_a^1(., 0) = h;
///   L_a u_a^2 = (a^2/nu) f + R u_a^1, u_a^2(l2) = 2 g2' + (2c + a^2/nu) g2 - f(l2, .),
///     u_a^2(., 0) = f(., 0) - 2a h' + a^2 h / nu;
///   L_ad u_ad = f on Omega1, u_ad(-l1) = g1, L_ma u_ad(0) = u_a^2(0).
/// Returns (u_ad, u_a^1).
inline CoupledSolution solve_factorization_neg(const ProblemSpec& spec, const Grid& grid, const TimeGrid& time,
                                               const SolverOptions& opt = {}) {
  if (!(spec.a < 0.0)) throw ValidationError("negative-advection factorization needs a < 0");
  const auto s = detail::make_setup(spec, grid, time);
  if (!has_derivatives(spec.g2) || !has_derivatives(spec.h))
    throw UnsupportedDerivative("factorization needs g2' and h'");
  const Grid& g2 = s.dec.omega2;
  const double a = spec.a, c = spec.c, k = a * a / spec.nu;

  CoupledSolution out;
  auto& diag = out.diagnostics;
  out.u_a = detail::omega2_transport(spec, s, sample_trace(spec.g2, time, spec.l2));

  TransportSpec second;
  second.b = a;
  second.eta = c;
  second.grid = g2;
  second.time = time;
  second.rhs = field_source(detail::corrected_source(spec, s, out.u_a));
  std::vector<double> inflow(time.levels());
  for (std::size_t n = 0; n < inflow.size(); ++n) {
    const double t = time.t(n);
    inflow[n] = 2.0 * eval_dt(spec.g2, spec.l2, t) + (2.0 * c + k) * eval(spec.g2, spec.l2, t) -
                eval(spec.f, spec.l2, t);
  }
  second.inflow = Trace(time, spec.l2, std::move(inflow));
  second.initial.resize(g2.nodes());
  for (std::size_t j = 0; j < g2.nodes(); ++j) {
    const double x = g2.x(j);
    second.initial[j] = eval(spec.f, x, 0.0) - 2.0 * a * eval_dx(spec.h, x, 0.0) + k * eval(spec.h, x, 0.0);
  }
  detail::note_corner(diag, second, "u_a^2");
  const Field u_a2 = solve_transport(second);
  Trace a2_trace = column(u_a2, 0);

  out.u_ad = solve_advdiff(detail::omega1_spec(spec, s, bc::TransportRobin{a2_trace}, opt));
  diag.interface.push_back({"u_a^1(0)", column(out.u_a, 0)});
  diag.interface.push_back({"u_a^2(0)", std::move(a2_trace)});
  diag.interface.push_back({"u_ad(0)", column(out.u_ad, s.dec.omega1.n_cells())});
  diag.iterations = 1;
  return out;
}

/// Classical transmission conditions.
///   a > 0 variational: nu d_x u_ad(0) = 0, then transport with inflow u_ad(0).
///   a > 0 non-variational: relaxed Dirichlet-Neumann iteration on
///     d_x u_ad(0) = d_x u_a(0), u_ad(0) = u_a(0).
///   a < 0 variational: transport from l2, then -nu d_x u_ad + a u_ad = a u_a at 0.
///   a < 0 non-variational: transport from l2, then u_ad(0) = u_a(0).
inline CoupledSolution solve_classical(const ProblemSpec& spec, const Grid& grid, const TimeGrid& time,
                                       const CouplingMethod& m, const SolverOptions& opt = {}) {
  const auto s = detail::make_setup(spec, grid, time);
  const std::size_t J1 = s.dec.omega1.n_cells();
  CoupledSolution out;
  auto& diag = out.diagnostics;

  if (std::holds_alternative<method::Variational>(m)) {
    if (spec.a > 0.0) {
      out.u_ad = solve_advdiff(detail::omega1_spec(spec, s, bc::Neumann{Trace(time, 0.0)}, opt));
      out.u_a = detail::omega2_transport(spec, s, Trace(time, 0.0, detail::trace_values(out.u_ad, J1)));
    } else {
      out.u_a = detail::omega2_transport(spec, s, sample_trace(spec.g2, time, spec.l2));
      std::vector<double> g = detail::trace_values(out.u_a, 0);
      for (double& v : g) v *= spec.a;
      out.u_ad = solve_advdiff(detail::omega1_spec(spec, s, bc::FluxRobin{Trace(time, 0.0, std::move(g))}, opt));
    }
    diag.iterations = 1;
    diag.interface.push_back({"u_ad(0)", column(out.u_ad, J1)});
    return out;
  }

  const auto* nv = std::get_if<method::NonVariational>(&m);
  if (!nv) throw ValidationError("solve_classical expects a variational or non-variational method");
  if (!(nv->tol > 0.0)) throw ValidationError("non-variational tolerance must be positive");

  if (spec.a < 0.0) {
    out.u_a = detail::omega2_transport(spec, s, sample_trace(spec.g2, time, spec.l2));
    out.u_ad = solve_advdiff(
        detail::omega1_spec(spec, s, bc::Dirichlet{Trace(time, 0.0, detail::trace_values(out.u_a, 0))}, opt));
    diag.iterations = 1;
    diag.interface.push_back({"u_a(0)", column(out.u_a, 0)});
    return out;
  }

  double theta = nv->theta ? *nv->theta : default_theta(spec.nu);
  if (!(theta > 0.0 && theta <= 1.0)) throw ValidationError("relaxation must lie in (0, 1]");
  const double dx = s.dec.omega2.dx();
  const bool second = opt.stencil == BoundaryStencil::OneSided2 && s.dec.omega2.n_cells() >= 2;
  std::vector<double> lambda(time.levels(), 0.0);
  diag.converged = false;
  for (std::size_t it = 1; it <= nv->max_iters; ++it) {
    out.u_a = detail::omega2_transport(spec, s, Trace(time, 0.0, lambda));
    std::vector<double> slope(time.levels());
    for (std::size_t n = 0; n < slope.size(); ++n) {
      const double u0 = out.u_a.at(n, 0), u1 = out.u_a.at(n, 1);
      slope[n] = second ? (-3.0 * u0 + 4.0 * u1 - out.u_a.at(n, 2)) / (2.0 * dx) : (u1 - u0) / dx;
    }
    out.u_ad = solve_advdiff(detail::omega1_spec(spec, s, bc::Neumann{Trace(time, 0.0, std::move(slope))}, opt));

    std::vector<double> next(lambda.size()), delta(lambda.size());
    for (std::size_t n = 0; n < next.size(); ++n) {
      next[n] = theta * out.u_ad.at(n, J1) + (1.0 - theta) * lambda[n];
      delta[n] = next[n] - lambda[n];
    }
    const double norm = detail::l2_time(next, time.dt());
    const double inc = detail::l2_time(delta, time.dt());
    diag.increments.push_back(norm > 0.0 ? inc / norm : 0.0);
    diag.iterations = it;
    lambda = std::move(next);
    if (inc <= nv->tol * norm) {
      diag.converged = true;
      break;
    }
  }
  diag.interface.push_back({"lambda", Trace(time, 0.0, lambda)});
  if (!diag.converged)
    throw ConvergenceError("non-variational iteration did not converge in " + std::to_string(nv->max_iters) +
                               " iterations (last relative increment " +
                               std::to_string(diag.increments.back()) + ")",
                           diag.increments);
  return out;
}

/// Dispatches on the method tag. Monodomain returns the restrictions of the
/// viscous reference.
inline CoupledSolution solve_coupled(const ProblemSpec& spec, const Grid& grid, const TimeGrid& time,
                                     const CouplingMethod& m, const SolverOptions& opt = {}) {
  if (std::holds_alternative<method::Monodomain>(m)) {
    const auto dec = Decomposition::of(grid);
    auto [u1, u2] = split(solve_monodomain(spec, grid, time, opt), dec);
    CoupledSolution out{std::move(u1), std::move(u2), {}};
    out.diagnostics.iterations = 1;
    return out;
  }
  if (const auto* f = std::get_if<method::Factorization>(&m)) {
    if (spec.a > 0.0) return solve_factorization_pos(spec, grid, time, f->k_iters, std::nullopt, opt);
    return solve_factorization_neg(spec, grid, time, opt);
  }
  return solve_classical(spec, grid, time, m, opt);
}

}  // namespace hetdd
