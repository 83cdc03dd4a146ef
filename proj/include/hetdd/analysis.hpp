#pragma once

// Space-time norms, viscosity sweeps and log-log slope fits.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hetdd/coupling.hpp"

namespace hetdd {

/// Trapezoidal L2(x,t) norm of a field.
inline double l2_spacetime(const Field& f) {
  const std::size_t L = f.time().levels(), M = f.grid().nodes();
  double s = 0.0;
  for (std::size_t n = 0; n < L; ++n) {
    const double wn = (n == 0 || n + 1 == L) ? 0.5 : 1.0;
    const auto row = f.row(n);
    double r = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const double wj = (j == 0 || j + 1 == M) ? 0.5 : 1.0;
      r += wj * row[j] * row[j];
    }
    s += wn * r;
  }
  return std::sqrt(s * f.grid().dx() * f.time().dt());
}

/// Trapezoidal L2(x,t) norm of u - v on a common grid.
inline double l2_spacetime_diff(const Field& u, const Field& v) {
  if (u.grid().nodes() != v.grid().nodes() || u.time().levels() != v.time().levels())
    throw ValidationError("fields live on different grids");
  Field d(u.grid(), u.time());
  for (std::size_t i = 0; i < d.values().size(); ++i) d.values()[i] = u.values()[i] - v.values()[i];
  return l2_spacetime(d);
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;         // log(err) at log(nu) = 0
  std::vector<double> pair_slopes;  // consecutive pairs, nu ascending
};

/// Least-squares line through (log nu, log err), points sorted by nu.
inline SlopeFit fit_slope(std::vector<std::pair<double, double>> points) {
  if (points.size() < 2) throw std::invalid_argument("slope fit needs at least two points");
  for (const auto& [nu, err] : points)
    if (!(nu > 0.0) || !(err > 0.0) || !std::isfinite(nu) || !std::isfinite(err))
      throw std::invalid_argument("slope fit needs strictly positive finite values");
  std::sort(points.begin(), points.end());
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [nu, err] : points) sx += std::log(nu), sy += std::log(err);
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [nu, err] : points) {
    const double dx = std::log(nu) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(err) - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope fit needs at least two distinct viscosities");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 1; i < points.size(); ++i)
    fit.pair_slopes.push_back(std::log(points[i].second / points[i - 1].second) /
                              std::log(points[i].first / points[i - 1].first));
  return fit;
}

/// Points above the discretization floor, largest nu first. Walking down in
/// nu, the floor starts at the first pair whose slope drops below floor_slope;
/// the first two points are always kept.
inline std::vector<std::pair<double, double>> above_floor(std::vector<std::pair<double, double>> points,
                                                          double floor_slope = 1.0) {
  std::sort(points.begin(), points.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  std::vector<std::pair<double, double>> kept;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i >= 2) {
      const auto& p = points[i - 1];
      const auto& q = points[i];
      const double s = std::log(p.second / q.second) / std::log(p.first / q.first);
      if (s < floor_slope) break;
    }
    kept.push_back(points[i]);
  }
  return kept;
}

/// Uniform global grid over (-l1, l2) with n_cells cells and dt = dt_ratio * dx.
struct GridPolicy {
  std::size_t n_cells = 4000;
  double dt_ratio = 1.0;

  Grid grid(const ProblemSpec& s) const { return Grid(-s.l1, s.l2, n_cells); }
  TimeGrid time(const ProblemSpec& s) const {
    const double dt = dt_ratio * (s.l1 + s.l2) / static_cast<double>(n_cells);
    const double steps = std::round(s.t_final / dt);
    if (steps < 1.0) throw ValidationError("time step exceeds the horizon");
    return TimeGrid(s.t_final, static_cast<std::size_t>(steps));
  }
};

/// Resolution check: cell Peclet number |a| dx / nu <= 2, and for a < 0 the
/// boundary layer nu / |a| spans at least five cells.
inline bool resolved(double a, double nu, double dx) {
  if (std::abs(a) * dx / nu > 2.0) return false;
  if (a < 0.0 && nu / std::abs(a) < 5.0 * dx) return false;
  return true;
}

struct ErrorRecord {
  double nu = 0.0;
  CouplingMethod method;
  double err_omega1 = 0.0;
  double err_omega2 = 0.0;
  std::size_t n_cells = 0;
  double dx = 0.0;
  double dt = 0.0;
  double peclet = 0.0;
  bool resolved = true;
  std::size_t iterations = 0;
  std::optional<std::string> failure;  // solver error message, errors are NaN
};

struct SweepSpec {
  ProblemSpec problem;  // nu is overridden per row
  std::vector<double> nu_list;
  std::vector<CouplingMethod> methods;
  GridPolicy grid;
  SolverOptions options;
  unsigned jobs = 1;
};

namespace detail {

inline std::vector<ErrorRecord> sweep_one_nu(const SweepSpec& sweep, double nu) {
  ProblemSpec spec = sweep.problem;
  spec.nu = nu;
  const Grid grid = sweep.grid.grid(spec);
  const TimeGrid time = sweep.grid.time(spec);
  const double dx = grid.dx();
  auto base = [&](const CouplingMethod& m) {
    ErrorRecord r;
    r.nu = nu;
    r.method = m;
    r.n_cells = grid.n_cells();
    r.dx = dx;
    r.dt = time.dt();
    r.peclet = std::abs(spec.a) * dx / nu;
    r.resolved = resolved(spec.a, nu, dx);
    return r;
  };
  auto fail = [](ErrorRecord r, const std::string& why) {
    r.err_omega1 = r.err_omega2 = std::nan("");
    r.failure = why;
    return r;
  };

  std::vector<ErrorRecord> out;
  out.reserve(sweep.methods.size());
  std::optional<std::pair<Field, Field>> ref;
  std::string ref_error;
  try {
    const auto dec = Decomposition::of(grid);
    ref = split(solve_monodomain(spec, grid, time, sweep.options), dec);
  } catch (const std::exception& e) {
    ref_error = std::string("reference solve failed: ") + e.what();
  }
  for (const auto& m : sweep.methods) {
    ErrorRecord r = base(m);
    if (!ref) {
      out.push_back(fail(r, ref_error));
      continue;
    }
    if (std::holds_alternative<method::Monodomain>(m)) {
      r.iterations = 1;
      out.push_back(r);
      continue;
    }
    try {
      const auto sol = solve_coupled(spec, grid, time, m, sweep.options);
      r.err_omega1 = l2_spacetime_diff(ref->first, sol.u_ad);
      r.err_omega2 = l2_spacetime_diff(ref->second, sol.u_a);
      r.iterations = sol.diagnostics.iterations;
      out.push_back(r);
    } catch (const std::exception& e) {
      out.push_back(fail(r, e.what()));
    }
  }
  return out;
}

}  // namespace detail

/// Runs every (nu, method) cell. Rows are ordered by nu (list order), then
/// method (list order), regardless of how many worker threads are used.
inline std::vector<ErrorRecord> run_sweep(const SweepSpec& sweep) {
  const std::size_t count = sweep.nu_list.size();
  std::vector<std::vector<ErrorRecord>> blocks(count);
  const unsigned jobs = std::max(1u, std::min<unsigned>(sweep.jobs, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) blocks[i] = detail::sweep_one_nu(sweep, sweep.nu_list[i]);
  };
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }
  std::vector<ErrorRecord> rows;
  for (auto& b : blocks)
    for (auto& r : b) rows.push_back(std::move(r));
  return rows;
}

/// (nu, error) points of one method; Omega1 when omega1 is true, else Omega2.
/// Failed rows are skipped, and unresolved rows unless include_unresolved.
inline std::vector<std::pair<double, double>> series(const std::vector<ErrorRecord>& rows, const std::string& method,
                                                     bool omega1, bool include_unresolved = false) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) {
    if (method_name(r.method) != method || r.failure) continue;
    if (!r.resolved && !include_unresolved) continue;
    pts.emplace_back(r.nu, omega1 ? r.err_omega1 : r.err_omega2);
  }
  return pts;
}

}  // namespace hetdd
