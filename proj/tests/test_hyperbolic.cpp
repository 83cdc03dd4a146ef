#include <gtest/gtest.h>

#include <cmath>

#include "hetdd/hyperbolic.hpp"
#include "hetdd/verify.hpp"

using namespace hetdd;

namespace {

TransportSpec constant_spec(double b, double eta, double p, double value, std::size_t n = 20) {
  TransportSpec s;
  s.b = b;
  s.eta = eta;
  s.grid = Grid(0.0, 1.0, n);
  s.time = TimeGrid(1.0, n);
  s.rhs = [p](std::size_t, std::size_t) { return p; };
  s.inflow = Trace(s.time, inflow_location(b, s.grid), value);
  s.initial.assign(s.grid.nodes(), value);
  return s;
}

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST(Transport, ConstantsAreExact) {
  for (double b : {1.0, -2.0}) {
    const Field v = solve_transport(constant_spec(b, 0.0, 0.0, 1.0));
    for (double x : v.values()) EXPECT_DOUBLE_EQ(x, 1.0);
  }
}

TEST(Transport, SteadyReactionBalance) {
  const Field v = solve_transport(constant_spec(1.0, 1.0, 1.0, 1.0));
  for (double x : v.values()) EXPECT_NEAR(x, 1.0, 1e-15);
}

TEST(Transport, LargeTimeStepStaysStable) {
  auto s = constant_spec(1.0, 0.0, 0.0, 0.0, 40);
  s.time = TimeGrid(1.0, 2);  // |b| dt / dx = 20
  s.inflow = Trace(s.time, 0.0, 0.0);
  for (std::size_t j = 0; j < s.grid.nodes(); ++j) s.initial[j] = std::sin(3.0 * s.grid.x(j));
  const Field v = solve_transport(s);
  EXPECT_TRUE(v.all_finite());
  EXPECT_LE(max_abs(v), 1.0);
}

TEST(Transport, RejectsBadSpecs) {
  auto s = constant_spec(0.0, 0.0, 0.0, 0.0);
  EXPECT_THROW(solve_transport(s), ValidationError);
  s = constant_spec(1.0, -1.0, 0.0, 0.0);
  EXPECT_THROW(solve_transport(s), ValidationError);
  s = constant_spec(1.0, 0.0, 0.0, 0.0);
  s.initial.pop_back();
  EXPECT_THROW(solve_transport(s), ValidationError);
}

TEST(Transport, FirstOrderAgainstCharacteristics) {
  const double e1 = verify::transport_error(800), e2 = verify::transport_error(1600),
               e3 = verify::transport_error(3200), e4 = verify::transport_error(6400);
  for (double r : {e1 / e2, e2 / e3, e3 / e4}) {
    EXPECT_GE(r, 1.7);
    EXPECT_LE(r, 2.3);
  }
}

TEST(Transport, NegativeSpeedAgainstCharacteristics) {
  TransportProblem p;
  p.b = -1.0;
  p.eta = 0.5;
  p.p = [](double x, double t) { return std::sin(M_PI * x) * t; };
  p.g = [](double t) { return t * t; };
  auto err = [&](std::size_t n) {
    const Grid g(0.0, 1.0, n);
    const TimeGrid t(1.0, n);
    const Field v = solve_transport(discretize(p, g, t));
    double e = 0.0;
    for (std::size_t k = 0; k < t.levels(); k += n / 10)
      for (std::size_t j = 0; j < g.nodes(); ++j)
        e = std::max(e, std::abs(v.at(k, j) - characteristics_oracle(p, g.x(j), t.t(k))));
    return e;
  };
  const double r = err(200) / err(400);
  EXPECT_GE(r, 1.7);
  EXPECT_LE(r, 2.3);
}

TEST(Transport, MaximumPrinciple) {
  auto s = constant_spec(1.0, 0.3, 0.0, 0.0, 200);
  for (std::size_t j = 0; j < s.grid.nodes(); ++j) s.initial[j] = std::cos(7.0 * s.grid.x(j));
  std::vector<double> g(s.time.levels());
  for (std::size_t n = 0; n < g.size(); ++n) g[n] = std::cos(5.0 * s.time.t(n)) * 1.2;
  g[0] = s.initial[0];
  s.inflow = Trace(s.time, 0.0, g);
  const Field v = solve_transport(s);
  EXPECT_LE(max_abs(v), 1.2 + 1e-14);
}

TEST(Transport, StiffReactionAtTinyViscosity) {
  // eta = c + a^2 / nu at nu = 1e-6, speed -a.
  const double nu = 1e-6, eta = 1.0 + 1.0 / nu;
  auto s = constant_spec(-1.0, eta, 0.0, 0.0, 400);
  for (std::size_t j = 0; j < s.grid.nodes(); ++j) s.initial[j] = std::exp(-100.0 * std::pow(s.grid.x(j) - 0.5, 2));
  std::vector<double> g(s.time.levels(), 0.5);
  g[0] = s.initial.back();
  s.inflow = Trace(s.time, 1.0, g);
  const Field v = solve_transport(s);
  EXPECT_TRUE(v.all_finite());
  EXPECT_LE(max_abs(v), 1.0);
}

TEST(Transport, DiscreteEnergyEstimate) {
  // eta ||v||^2 <= ||p||^2 / eta + ||h||^2 + |b| ||g||^2 (trapezoidal norms), factor 1.1.
  for (double eta : {0.5, 2.0, 20.0}) {
    TransportProblem p;
    p.b = 1.0;
    p.eta = eta;
    p.p = [](double x, double t) { return std::sin(4 * x) * t; };
    p.g = [](double t) { return std::sin(3 * t); };
    p.h = [](double x) { return std::exp(-100 * (x - 0.4) * (x - 0.4)); };
    const Grid grid(0.0, 1.0, 200);
    const TimeGrid time(1.0, 200);
    const auto spec = discretize(p, grid, time);
    const Field v = solve_transport(spec);
    auto trap = [](const std::vector<double>& a, double h) {
      double s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) s += (i == 0 || i + 1 == a.size() ? 0.5 : 1.0) * a[i] * a[i];
      return s * h;
    };
    double vv = 0, pp = 0;
    for (std::size_t n = 0; n < time.levels(); ++n) {
      std::vector<double> rv(v.row(n).begin(), v.row(n).end()), rp(grid.nodes());
      for (std::size_t j = 0; j < grid.nodes(); ++j) rp[j] = p.p(grid.x(j), time.t(n));
      const double w = (n == 0 || n + 1 == time.levels()) ? 0.5 : 1.0;
      vv += w * trap(rv, grid.dx()) * time.dt();
      pp += w * trap(rp, grid.dx()) * time.dt();
    }
    const double rhs = pp / eta + trap(spec.initial, grid.dx()) + trap(spec.inflow.values(), time.dt());
    EXPECT_LE(eta * vv, 1.1 * rhs) << eta;
  }
}

TEST(Characteristics, ZeroData) {
  TransportProblem p;
  EXPECT_EQ(characteristics_oracle(p, 0.5, 0.7), 0.0);
}

TEST(Characteristics, UnitSourceClosedForm) {
  TransportProblem p;
  p.b = 2.0;
  p.eta = 1.5;
  p.p = [](double, double) { return 1.0; };
  for (double x : {0.1, 0.5, 0.9})
    for (double t : {0.05, 0.3, 1.0}) {
      const double m = std::min(t, p.tau(x));
      EXPECT_NEAR(characteristics_oracle(p, x, t), (1.0 - std::exp(-p.eta * m)) / p.eta, 1e-10);
    }
}

TEST(Characteristics, PureTransportBranch) {
  TransportProblem p;
  p.b = 1.0;
  p.h = [](double x) { return std::sin(5 * x); };
  EXPECT_NEAR(characteristics_oracle(p, 0.8, 0.3), std::sin(5 * 0.5), 1e-14);
}

TEST(Quadrature, AdaptiveSimpsonAccuracy) {
  EXPECT_NEAR(integrate([](double s) { return std::exp(-100 * s * s); }, -1.0, 1.0), std::sqrt(M_PI / 100) * std::erf(10.0), 1e-10);
  EXPECT_EQ(integrate([](double) { return 1.0; }, 1.0, 1.0), 0.0);
}
