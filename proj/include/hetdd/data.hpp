#pragma once

// Analytic data catalog: forcing, boundary and initial data together with
// the exact derivatives consumed by the coupling algorithms.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hetdd {

class UnsupportedDerivative : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace data {

struct Zero {};

/// exp(-scale * (x - x0)^2), constant in time.
struct GaussianBump {
  double x0 = 0.0;
  double scale = 100.0;
};

/// f(x,t) = f1(t) f2(x,t) with
///   f1(t) = (sin^4(4 pi (t-t0)) + sin^4(2 pi (t-t0)) / 2) for t > t0, else 0
///   f2(x,t) = e^{-25 x^2} + e^{-100 (x - t/4 - 0.4)^2} + e^{-100 (x + t/2 + 0.4)^2}
struct PaperForcing {
  double t0 = 0.1;
};

/// amplitude * e^{-decay t} * sin(wavenumber * (x - shift)).
struct SineManufactured {
  double amplitude = 1.0;
  double decay = 1.0;
  double wavenumber = std::numbers::pi;
  double shift = 0.0;
};

/// e^{alpha x + beta t}.
struct ExpEigen {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Uniformly tabulated values along one axis, linearly interpolated.
struct Custom {
  enum class Axis { Space, Time };
  Axis axis = Axis::Space;
  double origin = 0.0;
  double step = 1.0;
  std::vector<double> values;
};

}  // namespace data

using DataSpec = std::variant<data::Zero, data::GaussianBump, data::PaperForcing,
                              data::SineManufactured, data::ExpEigen, data::Custom>;

/// Closed space-time box used for checked evaluation.
struct SpaceTimeBox {
  double x_lo;
  double x_hi;
  double t_hi;
};

namespace detail {

// Gaussian e^{-k s^2} and its first two derivatives in s.
struct GaussTerm {
  double v, d1, d2;
};

inline GaussTerm gauss(double k, double s) {
  const double e = std::exp(-k * s * s);
  return {e, -2.0 * k * s * e, (4.0 * k * k * s * s - 2.0 * k) * e};
}

struct PaperParts {
  double f1, df1;
  // f2 and partial derivatives
  double f2, f2_t, f2_x, f2_xx;
};

inline PaperParts paper_parts(const data::PaperForcing& p, double x, double t) {
  using std::numbers::pi;
  PaperParts r{};
  const double tau = t - p.t0;
  if (tau > 0.0) {
    const double s4 = std::sin(4.0 * pi * tau), c4 = std::cos(4.0 * pi * tau);
    const double s2 = std::sin(2.0 * pi * tau), c2 = std::cos(2.0 * pi * tau);
    r.f1 = std::pow(s4, 4) + 0.5 * std::pow(s2, 4);
    r.df1 = 16.0 * pi * std::pow(s4, 3) * c4 + 4.0 * pi * std::pow(s2, 3) * c2;
  }
  const auto g0 = gauss(25.0, x);
  const auto g1 = gauss(100.0, x - t / 4.0 - 0.4);
  const auto g2 = gauss(100.0, x + t / 2.0 + 0.4);
  r.f2 = g0.v + g1.v + g2.v;
  r.f2_t = -0.25 * g1.d1 + 0.5 * g2.d1;
  r.f2_x = g0.d1 + g1.d1 + g2.d1;
  r.f2_xx = g0.d2 + g1.d2 + g2.d2;
  return r;
}

inline double table_lookup(const data::Custom& c, double s) {
  if (c.values.empty()) throw std::out_of_range("custom data: empty table");
  const double pos = (s - c.origin) / c.step;
  const double last = static_cast<double>(c.values.size() - 1);
  constexpr double slack = 1e-9;
  if (pos < -slack || pos > last + slack)
    throw std::out_of_range("custom data: query outside tabulated range");
  const double clamped = std::clamp(pos, 0.0, last);
  const auto i = static_cast<std::size_t>(std::floor(clamped));
  if (i + 1 >= c.values.size()) return c.values.back();
  const double w = clamped - static_cast<double>(i);
  return (1.0 - w) * c.values[i] + w * c.values[i + 1];
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace detail

inline double eval(const DataSpec& d, double x, double t) {
  return std::visit(
      detail::overloaded{
          [](const data::Zero&) { return 0.0; },
          [&](const data::GaussianBump& g) { return std::exp(-g.scale * (x - g.x0) * (x - g.x0)); },
          [&](const data::PaperForcing& p) {
            const auto r = detail::paper_parts(p, x, t);
            return r.f1 * r.f2;
          },
          [&](const data::SineManufactured& s) {
            return s.amplitude * std::exp(-s.decay * t) * std::sin(s.wavenumber * (x - s.shift));
          },
          [&](const data::ExpEigen& e) { return std::exp(e.alpha * x + e.beta * t); },
          [&](const data::Custom& c) {
            return detail::table_lookup(c, c.axis == data::Custom::Axis::Space ? x : t);
          },
      },
      d);
}

/// Evaluation restricted to a closed box; throws std::out_of_range outside it.
inline double eval(const DataSpec& d, double x, double t, const SpaceTimeBox& box) {
  constexpr double slack = 1e-12;
  if (x < box.x_lo - slack || x > box.x_hi + slack || t < -slack || t > box.t_hi + slack)
    throw std::out_of_range("data evaluated outside the space-time domain at x=" +
                            std::to_string(x) + ", t=" + std::to_string(t));
  return eval(d, x, t);
}

inline double eval_dt(const DataSpec& d, double x, double t) {
  return std::visit(
      detail::overloaded{
          [](const data::Zero&) { return 0.0; },
          [](const data::GaussianBump&) { return 0.0; },
          [&](const data::PaperForcing& p) {
            const auto r = detail::paper_parts(p, x, t);
            return r.df1 * r.f2 + r.f1 * r.f2_t;
          },
          [&](const data::SineManufactured& s) {
            return -s.decay * s.amplitude * std::exp(-s.decay * t) *
                   std::sin(s.wavenumber * (x - s.shift));
          },
          [&](const data::ExpEigen& e) { return e.beta * std::exp(e.alpha * x + e.beta * t); },
          [](const data::Custom&) -> double {
            throw UnsupportedDerivative("custom tabulated data has no time derivative");
          },
      },
      d);
}

inline double eval_dx(const DataSpec& d, double x, double t = 0.0) {
  return std::visit(
      detail::overloaded{
          [](const data::Zero&) { return 0.0; },
          [&](const data::GaussianBump& g) {
            return detail::gauss(g.scale, x - g.x0).d1;
          },
          [&](const data::PaperForcing& p) {
            const auto r = detail::paper_parts(p, x, t);
            return r.f1 * r.f2_x;
          },
          [&](const data::SineManufactured& s) {
            return s.amplitude * s.wavenumber * std::exp(-s.decay * t) *
                   std::cos(s.wavenumber * (x - s.shift));
          },
          [&](const data::ExpEigen& e) { return e.alpha * std::exp(e.alpha * x + e.beta * t); },
          [](const data::Custom&) -> double {
            throw UnsupportedDerivative("custom tabulated data has no spatial derivative");
          },
      },
      d);
}

inline double eval_dxx(const DataSpec& d, double x, double t = 0.0) {
  return std::visit(
      detail::overloaded{
          [](const data::Zero&) { return 0.0; },
          [&](const data::GaussianBump& g) {
            return detail::gauss(g.scale, x - g.x0).d2;
          },
          [&](const data::PaperForcing& p) {
            const auto r = detail::paper_parts(p, x, t);
            return r.f1 * r.f2_xx;
          },
          [&](const data::SineManufactured& s) {
            return -s.amplitude * s.wavenumber * s.wavenumber * std::exp(-s.decay * t) *
                   std::sin(s.wavenumber * (x - s.shift));
          },
          [&](const data::ExpEigen& e) {
            return e.alpha * e.alpha * std::exp(e.alpha * x + e.beta * t);
          },
          [](const data::Custom&) -> double {
            throw UnsupportedDerivative("custom tabulated data has no spatial derivative");
          },
      },
      d);
}

/// True when every derivative query on this variant is answered exactly.
inline bool has_derivatives(const DataSpec& d) {
  return !std::holds_alternative<data::Custom>(d);
}

inline std::string describe(const DataSpec& d) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  return std::visit(
      detail::overloaded{
          [](const data::Zero&) { return std::string("zero"); },
          [&](const data::GaussianBump& g) {
            return "gaussian(x0=" + num(g.x0) + ",scale=" + num(g.scale) + ")";
          },
          [&](const data::PaperForcing& p) { return "paper(t0=" + num(p.t0) + ")"; },
          [&](const data::SineManufactured& s) {
            return "sine(amplitude=" + num(s.amplitude) + ",decay=" + num(s.decay) +
                   ",wavenumber=" + num(s.wavenumber) + ",shift=" + num(s.shift) + ")";
          },
          [&](const data::ExpEigen& e) {
            return "exp(alpha=" + num(e.alpha) + ",beta=" + num(e.beta) + ")";
          },
          [&](const data::Custom& c) {
            return "custom(" + std::to_string(c.values.size()) + " values)";
          },
      },
      d);
}

}  // namespace hetdd
