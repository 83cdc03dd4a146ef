#include <gtest/gtest.h>

#include "hetdd/core.hpp"

using namespace hetdd;

namespace {

ProblemSpec reference_spec(double a) {
  ProblemSpec s;
  s.a = a;
  s.nu = 1e-3;
  s.f = data::PaperForcing{0.1};
  s.h = data::GaussianBump{a > 0 ? -0.6 : 0.5, 100.0};
  return s;
}

bool has(const ValidationReport& r, const std::string& what) {
  return std::find(r.violations.begin(), r.violations.end(), what) != r.violations.end();
}

}  // namespace

TEST(Grid, NodesAndEndpointsExact) {
  const Grid g(-1.0, 1.0, 4000);
  EXPECT_EQ(g.nodes(), 4001u);
  EXPECT_DOUBLE_EQ(g.dx(), 5e-4);
  EXPECT_EQ(g.x(0), -1.0);
  EXPECT_EQ(g.x(4000), 1.0);
  ASSERT_TRUE(g.node_index(0.0).has_value());
  EXPECT_EQ(*g.node_index(0.0), 2000u);
  EXPECT_EQ(g.x(2000), 0.0);
}

TEST(Grid, RestrictionKeepsNodes) {
  const Grid g(-1.0, 1.0, 10);
  const Grid r = g.restrict_to(5, 10);
  EXPECT_EQ(r.n_cells(), 5u);
  EXPECT_DOUBLE_EQ(r.x_min(), 0.0);
  EXPECT_EQ(r.x_max(), 1.0);
  for (std::size_t j = 0; j <= 5; ++j) EXPECT_NEAR(r.x(j), g.x(j + 5), 1e-15);
}

TEST(TimeGrid, HitsFinalTimeExactly) {
  const TimeGrid t(1.0, 3);
  EXPECT_EQ(t.levels(), 4u);
  EXPECT_EQ(t.t(0), 0.0);
  EXPECT_EQ(t.t(3), 1.0);
  EXPECT_DOUBLE_EQ(t.dt(), 1.0 / 3.0);
  EXPECT_THROW(TimeGrid(1.0, 0), ValidationError);
  EXPECT_THROW(TimeGrid(0.0, 5), ValidationError);
}

TEST(Field, RowMajorLayoutAndRestriction) {
  const Grid g(0.0, 1.0, 4);
  const TimeGrid t(1.0, 2);
  Field f(g, t);
  for (std::size_t n = 0; n < 3; ++n)
    for (std::size_t j = 0; j < 5; ++j) f.at(n, j) = 10.0 * n + j;
  EXPECT_EQ(f.values().size(), 15u);
  EXPECT_EQ(f.row(2)[3], 23.0);
  const Field r = f.restrict_to(1, 3);
  EXPECT_EQ(r.grid().nodes(), 3u);
  EXPECT_EQ(r.at(1, 0), 11.0);
  EXPECT_EQ(r.at(2, 2), 23.0);
  EXPECT_TRUE(f.all_finite());
  f.at(0, 0) = std::nan("");
  EXPECT_FALSE(f.all_finite());
}

TEST(Trace, LengthMustMatchTimeGrid) {
  const TimeGrid t(1.0, 4);
  EXPECT_THROW(Trace(t, 0.0, std::vector<double>(3, 0.0)), ValidationError);
  const Trace tr(t, 0.25, 2.0);
  EXPECT_EQ(tr.size(), 5u);
  EXPECT_EQ(tr[4], 2.0);
  EXPECT_EQ(tr.location(), 0.25);
}

TEST(Validate, ReferencePositiveSetupOnHeadlineGrid) {
  // N = 64000, dt = dx on (-1, 1).
  const auto r = validate(reference_spec(1.0), Grid(-1.0, 1.0, 64000), TimeGrid(1.0, 32000));
  EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
}

TEST(Validate, ReferenceNegativeSetup) {
  const auto r = validate(reference_spec(-1.0), Grid(-1.0, 1.0, 4000), TimeGrid(1.0, 2000));
  EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
}

TEST(Validate, ZeroViscosity) {
  auto s = reference_spec(1.0);
  s.nu = 0.0;
  EXPECT_TRUE(has(validate(s, Grid(-1.0, 1.0, 40), TimeGrid(1.0, 20)), "nu must be positive"));
}

TEST(Validate, InterfaceOffGrid) {
  auto s = reference_spec(1.0);
  s.l2 = 0.8;  // dx = 0.3 over (-1, 0.8)
  const Grid g(-1.0, 0.8, 6);
  ASSERT_NEAR(g.dx(), 0.3, 1e-15);
  EXPECT_TRUE(has(validate(s, g, TimeGrid(1.0, 4)), "interface not a grid node"));
}

TEST(Validate, EachSingleFieldViolation) {
  const Grid g(-1.0, 1.0, 40);
  const TimeGrid t(1.0, 20);
  auto base = reference_spec(1.0);
  auto check = [&](auto mutate, const std::string& msg) {
    auto s = base;
    mutate(s);
    EXPECT_TRUE(has(validate(s, g, t), msg)) << msg;
  };
  check([](ProblemSpec& s) { s.a = 0.0; }, "a must be nonzero");
  check([](ProblemSpec& s) { s.c = 0.0; }, "c must be positive");
  check([](ProblemSpec& s) { s.l1 = -1.0; }, "l1 must be positive");
  check([](ProblemSpec& s) { s.l2 = 0.0; }, "l2 must be positive");
  check([](ProblemSpec& s) { s.t_final = 0.0; }, "t_final must be positive");
  check([](ProblemSpec& s) { s.h = data::GaussianBump{0.3, 100.0}; }, "h must vanish for x >= 0");
  check([](ProblemSpec& s) { s.f = data::PaperForcing{-0.1}; }, "f must vanish at t = 0");
  check([](ProblemSpec& s) { s.g1 = data::ExpEigen{0.0, 1.0}; }, "g1 must vanish at t = 0");
  check([](ProblemSpec& s) { s.g2 = data::ExpEigen{0.0, 1.0}; }, "g2 must vanish at t = 0");
  auto s = base;
  EXPECT_TRUE(has(validate(s, Grid(-1.0, 2.0, 30), t), "grid does not span (-l1, l2)"));
  EXPECT_TRUE(has(validate(s, g, TimeGrid(2.0, 20)), "time grid does not end at t_final"));
}

TEST(Decomposition, SubgridsAbutAtInterface) {
  const auto d = Decomposition::of(Grid(-1.0, 1.0, 8));
  EXPECT_EQ(d.interface_index, 4u);
  EXPECT_EQ(d.omega1.x_max(), 0.0);
  EXPECT_EQ(d.omega2.x_min(), 0.0);
  EXPECT_EQ(d.omega1.n_cells() + d.omega2.n_cells(), 8u);
  EXPECT_THROW(Decomposition::of(Grid(-1.0, 0.8, 6)), ValidationError);
}

TEST(Method, NamesRoundTrip) {
  for (const CouplingMethod m : {CouplingMethod{method::Monodomain{}}, CouplingMethod{method::Factorization{2}},
                                 CouplingMethod{method::Variational{}}, CouplingMethod{method::NonVariational{}}}) {
    const auto back = parse_method(method_name(m));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(method_name(*back), method_name(m));
  }
  EXPECT_FALSE(parse_method("factorization_k0").has_value());
  EXPECT_FALSE(parse_method("viscous").has_value());
}

TEST(Method, DefaultRelaxation) {
  EXPECT_NEAR(default_theta(1e-3), 1.0 / (450.0 * std::sqrt(1e-3)), 1e-15);
  EXPECT_EQ(default_theta(1e-8), 1.0);
}
