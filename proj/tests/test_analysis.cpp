#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hetdd/analysis.hpp"

using namespace hetdd;

namespace {

Field sampled(const Grid& g, const TimeGrid& t, const std::function<double(double, double)>& f) {
  Field v(g, t);
  for (std::size_t n = 0; n < t.levels(); ++n)
    for (std::size_t j = 0; j < g.nodes(); ++j) v.at(n, j) = f(g.x(j), t.t(n));
  return v;
}

SweepSpec small_sweep(std::vector<double> nus, std::vector<CouplingMethod> methods) {
  SweepSpec s;
  s.problem.a = 1.0;
  s.problem.f = data::PaperForcing{0.1};
  s.problem.h = data::GaussianBump{-0.6, 100.0};
  s.nu_list = std::move(nus);
  s.methods = std::move(methods);
  s.grid.n_cells = 200;
  return s;
}

}  // namespace

TEST(L2, UnitField) {
  EXPECT_NEAR(l2_spacetime(Field(Grid(-1, 0, 10), TimeGrid(1.0, 7), 1.0)), 1.0, 1e-14);
}

TEST(L2, LinearField) {
  const double e = l2_spacetime(sampled(Grid(0, 1, 100), TimeGrid(1.0, 50), [](double x, double) { return x; }));
  EXPECT_NEAR(e, 1.0 / std::sqrt(3.0), 1e-4);
}

TEST(L2, SineField) {
  auto f = [](double x, double t) { return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * t); };
  EXPECT_NEAR(l2_spacetime(sampled(Grid(0, 1, 200), TimeGrid(1.0, 200), f)), 0.5, 1e-4);
}

TEST(L2, MonotoneUnderDomination) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1), s(0, 1);
  const Grid g(0, 1, 30);
  const TimeGrid t(1.0, 20);
  for (int trial = 0; trial < 50; ++trial) {
    Field a(g, t), b(g, t);
    for (std::size_t i = 0; i < a.values().size(); ++i) {
      b.values()[i] = u(rng);
      a.values()[i] = b.values()[i] * s(rng) * (u(rng) < 0 ? -1 : 1);
    }
    EXPECT_LE(l2_spacetime(a), l2_spacetime(b));
  }
}

TEST(L2, DiffNeedsMatchingGrids) {
  EXPECT_THROW(l2_spacetime_diff(Field(Grid(0, 1, 3), TimeGrid(1, 2)), Field(Grid(0, 1, 4), TimeGrid(1, 2))),
               ValidationError);
}

TEST(Slope, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pts;
  for (double nu : {1e-1, 3e-2, 1e-2, 1e-3}) pts.emplace_back(nu, nu * nu);
  const auto fit = fit_slope(pts);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(fit.intercept, 0.0, 1e-11);
  ASSERT_EQ(fit.pair_slopes.size(), 3u);
  for (double p : fit.pair_slopes) EXPECT_NEAR(p, 2.0, 1e-12);
}

TEST(Slope, ConstantIsFlat) {
  const auto fit = fit_slope({{1e-3, 0.2}, {1e-2, 0.2}, {1e-1, 0.2}});
  EXPECT_NEAR(fit.slope, 0.0, 1e-14);
}

TEST(Slope, ScaleInvariance) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 10);
  std::vector<std::pair<double, double>> pts, scaled;
  for (double nu : {2e-3, 5e-3, 1e-2, 4e-2}) pts.emplace_back(nu, u(rng));
  for (const auto& [nu, e] : pts) scaled.emplace_back(nu, 4.0 * e);  // power of two keeps logs exact shifts
  const auto a = fit_slope(pts), b = fit_slope(scaled);
  EXPECT_EQ(a.slope, b.slope);
  EXPECT_NEAR(b.intercept - a.intercept, std::log(4.0), 1e-12);
}

TEST(Slope, RejectsBadInput) {
  EXPECT_THROW(fit_slope({{1e-2, 1.0}}), std::invalid_argument);
  EXPECT_THROW(fit_slope({{1e-2, 1.0}, {1e-3, 0.0}}), std::invalid_argument);
  EXPECT_THROW(fit_slope({{-1e-2, 1.0}, {1e-3, 1.0}}), std::invalid_argument);
}

TEST(Floor, StopsAtFirstShallowPair) {
  // Slope 4 down to nu = 1e-2, then flat.
  const std::vector<std::pair<double, double>> pts = {{1e-1, 1e-4}, {3e-2, 1e-4 * std::pow(0.3, 4)},
                                                      {1e-2, 1e-8}, {3e-3, 0.9e-8}, {1e-3, 0.8e-8}};
  const auto kept = above_floor(pts);
  ASSERT_EQ(kept.size(), 3u);
  EXPECT_EQ(kept.back().first, 1e-2);
  EXPECT_NEAR(fit_slope(kept).slope, 4.0, 1e-9);
}

TEST(Resolution, PecletAndLayer) {
  EXPECT_TRUE(resolved(1.0, 1e-3, 5e-4));
  EXPECT_FALSE(resolved(1.0, 1e-4, 5e-4));
  EXPECT_TRUE(resolved(-1.0, 2.5e-3, 5e-4));
  EXPECT_FALSE(resolved(-1.0, 2e-3, 5e-4));  // Peclet fine, layer under five cells
}

TEST(Sweep, EmptyListGivesEmptyTable) {
  EXPECT_TRUE(run_sweep(small_sweep({}, {method::Variational{}})).empty());
}

TEST(Sweep, MonodomainAgainstItselfIsZero) {
  const auto rows = run_sweep(small_sweep({3e-2}, {method::Monodomain{}}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].err_omega1, 0.0);
  EXPECT_EQ(rows[0].err_omega2, 0.0);
}

TEST(Sweep, CardinalityOrderAndFiniteness) {
  method::NonVariational nv;
  nv.max_iters = 5000;
  const std::vector<double> nus = {1e-1, 5e-2, 3e-2, 2e-2, 1e-2};
  const auto rows = run_sweep(
      small_sweep(nus, {method::Factorization{1}, method::Factorization{2}, method::Variational{}, nv}));
  ASSERT_EQ(rows.size(), 20u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].nu, nus[i / 4]);
    EXPECT_FALSE(rows[i].failure.has_value()) << *rows[i].failure;
    EXPECT_TRUE(std::isfinite(rows[i].err_omega1) && rows[i].err_omega1 >= 0);
    EXPECT_TRUE(std::isfinite(rows[i].err_omega2) && rows[i].err_omega2 >= 0);
  }
  EXPECT_EQ(method_name(rows[1].method), "factorization_k2");
  EXPECT_EQ(method_name(rows[3].method), "nonvariational");
}

TEST(Sweep, DeterministicAcrossRunsAndThreadCounts) {
  auto spec = small_sweep({5e-2, 2e-2, 1e-2}, {method::Factorization{1}, method::Variational{}});
  const auto a = run_sweep(spec);
  spec.jobs = 3;
  const auto b = run_sweep(spec);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].nu, b[i].nu);
    EXPECT_EQ(method_name(a[i].method), method_name(b[i].method));
    EXPECT_EQ(a[i].err_omega1, b[i].err_omega1);
    EXPECT_EQ(a[i].err_omega2, b[i].err_omega2);
  }
}

TEST(Sweep, FailureIsRecordedAndSweepContinues) {
  method::NonVariational nv;
  nv.max_iters = 1;
  const auto rows = run_sweep(small_sweep({2e-2}, {nv, method::Variational{}}));
  ASSERT_EQ(rows.size(), 2u);
  ASSERT_TRUE(rows[0].failure.has_value());
  EXPECT_TRUE(std::isnan(rows[0].err_omega1));
  EXPECT_FALSE(rows[1].failure.has_value());
}

TEST(Sweep, UnresolvedRowsFlaggedAndFilteredFromSeries) {
  // dx = 1e-2 on 200 cells: nu = 2e-3 has Peclet 5.
  const auto rows = run_sweep(small_sweep({2e-2, 2e-3}, {method::Variational{}}));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].resolved);
  EXPECT_FALSE(rows[1].resolved);
  EXPECT_NEAR(rows[1].peclet, 5.0, 1e-12);
  EXPECT_EQ(series(rows, "variational", true).size(), 1u);
  EXPECT_EQ(series(rows, "variational", true, true).size(), 2u);
}

TEST(GridPolicy, TimeStepFollowsRatio) {
  ProblemSpec s;
  GridPolicy p{4000, 1.0};
  EXPECT_EQ(p.time(s).n_steps(), 2000u);
  p.dt_ratio = 0.5;
  EXPECT_EQ(p.time(s).n_steps(), 4000u);
}
