#pragma once

// Grids, fields, traces, problem setup and coupling-method selection shared
// by every solver.

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hetdd/data.hpp"

namespace hetdd {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform subdivision of [x_min, x_max] into n_cells cells.
class Grid {
 public:
  Grid() = default;
  Grid(double x_min, double x_max, std::size_t n_cells)
      : x_min_(x_min), x_max_(x_max), n_cells_(n_cells) {
    if (n_cells == 0) throw ValidationError("grid needs at least one cell");
    if (!(x_max > x_min)) throw ValidationError("grid needs x_max > x_min");
  }

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  std::size_t n_cells() const { return n_cells_; }
  std::size_t nodes() const { return n_cells_ + 1; }
  double dx() const { return (x_max_ - x_min_) / static_cast<double>(n_cells_); }
  double x(std::size_t j) const {
    return j == n_cells_ ? x_max_ : x_min_ + static_cast<double>(j) * dx();
  }

  /// Index of the node at position x, if x lies on a node within tol * dx.
  std::optional<std::size_t> node_index(double x, double tol = 1e-9) const {
    const double pos = (x - x_min_) / dx();
    const double r = std::round(pos);
    if (std::abs(pos - r) > tol || r < 0.0 || r > static_cast<double>(n_cells_)) return std::nullopt;
    return static_cast<std::size_t>(r);
  }

  /// Sub-grid spanning nodes [j_begin, j_end] of this grid.
  Grid restrict_to(std::size_t j_begin, std::size_t j_end) const {
    if (j_end <= j_begin || j_end > n_cells_) throw ValidationError("invalid grid restriction");
    return Grid(x(j_begin), x(j_end), j_end - j_begin);
  }

  bool operator==(const Grid&) const = default;

 private:
  double x_min_ = 0.0;
  double x_max_ = 1.0;
  std::size_t n_cells_ = 1;
};

/// Uniform time levels t_n = n dt, n = 0..n_steps, with t_{n_steps} = t_final.
class TimeGrid {
 public:
  TimeGrid() = default;
  TimeGrid(double t_final, std::size_t n_steps) : t_final_(t_final), n_steps_(n_steps) {
    if (n_steps == 0) throw ValidationError("time grid needs at least one step");
    if (!(t_final > 0.0)) throw ValidationError("time grid needs t_final > 0");
  }

  double t_final() const { return t_final_; }
  std::size_t n_steps() const { return n_steps_; }
  std::size_t levels() const { return n_steps_ + 1; }
  double dt() const { return t_final_ / static_cast<double>(n_steps_); }
  double t(std::size_t n) const {
    return n == n_steps_ ? t_final_ : static_cast<double>(n) * dt();
  }

  bool operator==(const TimeGrid&) const = default;

 private:
  double t_final_ = 1.0;
  std::size_t n_steps_ = 1;
};

/// Nodal space-time values over one interval, one row per time level.
class Field {
 public:
  Field() = default;
  Field(Grid grid, TimeGrid time, double fill = 0.0)
      : grid_(grid), time_(time), values_(time.levels() * grid.nodes(), fill) {}

  const Grid& grid() const { return grid_; }
  const TimeGrid& time() const { return time_; }

  double& at(std::size_t n, std::size_t j) { return values_[n * grid_.nodes() + j]; }
  double at(std::size_t n, std::size_t j) const { return values_[n * grid_.nodes() + j]; }

  std::span<double> row(std::size_t n) {
    return {values_.data() + n * grid_.nodes(), grid_.nodes()};
  }
  std::span<const double> row(std::size_t n) const {
    return {values_.data() + n * grid_.nodes(), grid_.nodes()};
  }

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  /// Copy of the columns [j_begin, j_end] as a field over the restricted grid.
  Field restrict_to(std::size_t j_begin, std::size_t j_end) const {
    return restrict_to(j_begin, j_end, grid_.restrict_to(j_begin, j_end));
  }

  /// As above, labelling the copy with a caller-supplied grid of matching size.
  Field restrict_to(std::size_t j_begin, std::size_t j_end, const Grid& sub) const {
    if (sub.n_cells() != j_end - j_begin) throw ValidationError("restriction grid size mismatch");
    Field out(sub, time_);
    for (std::size_t n = 0; n < time_.levels(); ++n)
      for (std::size_t j = j_begin; j <= j_end; ++j) out.at(n, j - j_begin) = at(n, j);
    return out;
  }

 private:
  Grid grid_;
  TimeGrid time_;
  std::vector<double> values_;
};

/// Time series sampled at a fixed position.
class Trace {
 public:
  Trace() = default;
  Trace(TimeGrid time, double location, double fill = 0.0)
      : time_(time), location_(location), values_(time.levels(), fill) {}
  Trace(TimeGrid time, double location, std::vector<double> values)
      : time_(time), location_(location), values_(std::move(values)) {
    if (values_.size() != time_.levels()) throw ValidationError("trace length does not match time grid");
  }

  const TimeGrid& time() const { return time_; }
  double location() const { return location_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t n) const { return values_[n]; }
  double& operator[](std::size_t n) { return values_[n]; }
  const std::vector<double>& values() const { return values_; }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  TimeGrid time_;
  double location_ = 0.0;
  std::vector<double> values_;
};

/// Column j of a field as a trace.
inline Trace column(const Field& f, std::size_t j) {
  std::vector<double> v(f.time().levels());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = f.at(n, j);
  return Trace(f.time(), f.grid().x(j), std::move(v));
}

/// Samples time-only data at a fixed location.
inline Trace sample_trace(const DataSpec& d, const TimeGrid& time, double location) {
  std::vector<double> v(time.levels());
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = eval(d, location, time.t(n));
  return Trace(time, location, std::move(v));
}

/// Samples data at t=0 on every node of a grid.
inline std::vector<double> sample_initial(const DataSpec& d, const Grid& grid) {
  std::vector<double> v(grid.nodes());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = eval(d, grid.x(j), 0.0);
  return v;
}

/// Right-hand side evaluated at node (n, j) of the grid a solver runs on.
using Source = std::function<double(std::size_t n, std::size_t j)>;

inline Source zero_source() {
  return [](std::size_t, std::size_t) { return 0.0; };
}

/// Samples data at the nodes of (grid, time).
inline Source sampled_source(DataSpec d, const Grid& grid, const TimeGrid& time) {
  return [d = std::move(d), grid, time](std::size_t n, std::size_t j) {
    return eval(d, grid.x(j), time.t(n));
  };
}

/// Samples a callable f(x, t) at the nodes of (grid, time).
template <class F>
Source function_source(F f, const Grid& grid, const TimeGrid& time) {
  return [f = std::move(f), grid, time](std::size_t n, std::size_t j) { return f(grid.x(j), time.t(n)); };
}

/// Reads nodal values from a field on the solver's grid.
inline Source field_source(std::shared_ptr<const Field> f) {
  return [f = std::move(f)](std::size_t n, std::size_t j) { return f->at(n, j); };
}

/// Physical setup: L_ad u = f on (-l1, l2) x (0, t_final) with boundary data
/// g1, g2 and initial condition h.
struct ProblemSpec {
  double a = 1.0;
  double nu = 1e-3;
  double c = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double t_final = 1.0;
  DataSpec f = data::Zero{};
  DataSpec g1 = data::Zero{};
  DataSpec g2 = data::Zero{};
  DataSpec h = data::Zero{};
};

namespace method {

struct Monodomain {};

struct Factorization {
  std::size_t k_iters = 1;  // ignored for a < 0
};

struct Variational {};

struct NonVariational {
  std::optional<double> theta;  // default 1 / (450 sqrt(nu)), clamped to (0, 1]
  std::size_t max_iters = 200;
  double tol = 1e-8;
};

}  // namespace method

using CouplingMethod =
    std::variant<method::Monodomain, method::Factorization, method::Variational, method::NonVariational>;

/// Stable identifier used in tables and file names.
inline std::string method_name(const CouplingMethod& m) {
  return std::visit(
      detail::overloaded{
          [](const method::Monodomain&) { return std::string("monodomain"); },
          [](const method::Factorization& f) { return "factorization_k" + std::to_string(f.k_iters); },
          [](const method::Variational&) { return std::string("variational"); },
          [](const method::NonVariational&) { return std::string("nonvariational"); },
      },
      m);
}

/// Inverse of method_name; nullopt for unknown names.
inline std::optional<CouplingMethod> parse_method(const std::string& name) {
  if (name == "monodomain") return method::Monodomain{};
  if (name == "variational") return method::Variational{};
  if (name == "nonvariational") return method::NonVariational{};
  if (name == "factorization") return method::Factorization{};
  const std::string prefix = "factorization_k";
  if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size()) {
    const std::string digits = name.substr(prefix.size());
    if (digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    const auto k = std::stoul(digits);
    if (k == 0) return std::nullopt;
    return method::Factorization{k};
  }
  return std::nullopt;
}

inline double default_theta(double nu) {
  const double theta = 1.0 / (450.0 * std::sqrt(nu));
  return theta > 1.0 ? 1.0 : theta;
}

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate(const ProblemSpec& spec, const Grid& grid, const TimeGrid& time) {
  constexpr double support_tol = 1e-12;
  ValidationReport r;
  auto need = [&](bool cond, const std::string& what) {
    if (!cond) r.violations.push_back(what);
  };
  need(spec.a != 0.0 && std::isfinite(spec.a), "a must be nonzero");
  need(spec.nu > 0.0, "nu must be positive");
  need(spec.c > 0.0, "c must be positive");
  need(spec.l1 > 0.0, "l1 must be positive");
  need(spec.l2 > 0.0, "l2 must be positive");
  need(spec.t_final > 0.0, "t_final must be positive");
  if (!r.ok()) return r;

  const double span_tol = 1e-12 * (spec.l1 + spec.l2);
  need(std::abs(grid.x_min() + spec.l1) <= span_tol && std::abs(grid.x_max() - spec.l2) <= span_tol,
       "grid does not span (-l1, l2)");
  need(grid.node_index(0.0).has_value(), "interface not a grid node");
  need(std::abs(time.t_final() - spec.t_final) <= 1e-12 * spec.t_final,
       "time grid does not end at t_final");

  // Initial data lives in the viscous subdomain. For a < 0 the inflow side
  // is x = l2 and data there is admitted.
  if (spec.a > 0.0) {
    for (std::size_t j = 0; j < grid.nodes(); ++j) {
      const double x = grid.x(j);
      if (x >= 0.0 && std::abs(eval(spec.h, x, 0.0)) > support_tol) {
        r.violations.push_back("h must vanish for x >= 0");
        break;
      }
    }
  }
  for (std::size_t j = 0; j < grid.nodes(); ++j) {
    if (std::abs(eval(spec.f, grid.x(j), 0.0)) > support_tol) {
      r.violations.push_back("f must vanish at t = 0");
      break;
    }
  }
  need(std::abs(eval(spec.g1, -spec.l1, 0.0)) <= support_tol, "g1 must vanish at t = 0");
  need(std::abs(eval(spec.g2, spec.l2, 0.0)) <= support_tol, "g2 must vanish at t = 0");

  const double corner_left = std::abs(eval(spec.h, -spec.l1, 0.0) - eval(spec.g1, -spec.l1, 0.0));
  if (corner_left > support_tol) r.warnings.push_back("initial and left boundary data differ at the corner");
  if (spec.a < 0.0) {
    const double corner_right = std::abs(eval(spec.h, spec.l2, 0.0) - eval(spec.g2, spec.l2, 0.0));
    if (corner_right > support_tol)
      r.warnings.push_back("initial and right boundary data differ at the corner");
  }
  return r;
}

/// The two abutting subdomain grids of a global grid over (-l1, l2).
struct Decomposition {
  Grid global;
  std::size_t interface_index;
  Grid omega1;
  Grid omega2;

  static Decomposition of(const Grid& global) {
    const auto k = global.node_index(0.0);
    if (!k || *k == 0 || *k == global.n_cells())
      throw ValidationError("interface not a grid node");
    return {global, *k, Grid(global.x_min(), 0.0, *k), Grid(0.0, global.x_max(), global.n_cells() - *k)};
  }
};

}  // namespace hetdd
