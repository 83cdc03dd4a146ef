#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hetdd/data.hpp"

using namespace hetdd;

TEST(PaperForcing, VanishesBeforeOnset) {
  const DataSpec f = data::PaperForcing{0.1};
  EXPECT_EQ(eval(f, 0.0, 0.05), 0.0);
  EXPECT_EQ(eval(f, 0.3, 0.1), 0.0);
  EXPECT_EQ(eval_dt(f, -0.2, 0.1), 0.0);
}

TEST(PaperForcing, ValueAtReferencePoint) {
  // f1(0.25) = sin^4(pi) + sin^4(pi/2)/2 = 0.5, f2(0, 0.35) from the three Gaussians.
  const double expected = 0.5 * (1.0 + std::exp(-23.765625) + std::exp(-33.0625));
  EXPECT_NEAR(eval(data::PaperForcing{0.1}, 0.0, 0.35), expected, 1e-15);
}

TEST(PaperForcing, SmoothAcrossOnset) {
  // sin^4 vanishes to fourth order at t0: doubling the offset scales f by 16,
  // so f and its first three time derivatives are continuous there.
  const DataSpec f = data::PaperForcing{0.1};
  const double eps = 1e-4;
  const double r = eval(f, 0.1, 0.1 + 2 * eps) / eval(f, 0.1, 0.1 + eps);
  EXPECT_NEAR(r, 16.0, 0.1);
  EXPECT_NEAR(eval_dt(f, 0.1, 0.1 + eps) * eps / eval(f, 0.1, 0.1 + eps), 4.0, 0.01);
}

TEST(GaussianBump, PeakAndCurvature) {
  const DataSpec g = data::GaussianBump{-0.6, 100.0};
  EXPECT_EQ(eval(g, -0.6, 0.0), 1.0);
  EXPECT_EQ(eval_dx(g, -0.6), 0.0);
  EXPECT_DOUBLE_EQ(eval_dxx(g, -0.6), -200.0);
}

TEST(Zero, AllDerivativesVanish) {
  const DataSpec z = data::Zero{};
  EXPECT_EQ(eval(z, 0.3, 0.4), 0.0);
  EXPECT_EQ(eval_dt(z, 0.3, 0.4), 0.0);
  EXPECT_EQ(eval_dx(z, 0.3), 0.0);
  EXPECT_EQ(eval_dxx(z, 0.3), 0.0);
}

TEST(ExpEigen, TimeDerivative) {
  const DataSpec e = data::ExpEigen{0.7, -1.3};
  const double x = 0.4, t = 0.9;
  EXPECT_NEAR(eval_dt(e, x, t), -1.3 * std::exp(-1.3 * t) * std::exp(0.7 * x), 1e-15);
  EXPECT_NEAR(eval_dxx(e, x, t), 0.49 * std::exp(0.7 * x - 1.3 * t), 1e-15);
}

TEST(Custom, LinearInterpolationAndNoDerivatives) {
  data::Custom c;
  c.axis = data::Custom::Axis::Time;
  c.origin = 0.0;
  c.step = 0.5;
  c.values = {0.0, 1.0, 3.0};
  const DataSpec d = c;
  EXPECT_DOUBLE_EQ(eval(d, 0.0, 0.25), 0.5);
  EXPECT_DOUBLE_EQ(eval(d, 9.0, 0.75), 2.0);
  EXPECT_DOUBLE_EQ(eval(d, 0.0, 1.0), 3.0);
  EXPECT_THROW(eval(d, 0.0, 1.5), std::out_of_range);
  EXPECT_THROW(eval_dt(d, 0.0, 0.5), UnsupportedDerivative);
  EXPECT_THROW(eval_dx(d, 0.0), UnsupportedDerivative);
  EXPECT_FALSE(has_derivatives(d));
}

TEST(Eval, OutsideBoxIsAnError) {
  const SpaceTimeBox box{-1.0, 1.0, 1.0};
  const DataSpec g = data::GaussianBump{0.0, 100.0};
  EXPECT_NO_THROW(eval(g, 1.0, 1.0, box));
  EXPECT_THROW(eval(g, 1.1, 0.5, box), std::out_of_range);
  EXPECT_THROW(eval(g, 0.0, -0.1, box), std::out_of_range);
}

// Central differences of eval converge to the analytic derivatives at second order.
class DerivativeConvergence : public ::testing::TestWithParam<DataSpec> {};

TEST_P(DerivativeConvergence, CentralDifferenceRatio) {
  const DataSpec d = GetParam();
  const double x = -0.37, t = 0.61;
  auto err_dt = [&](double h) { return std::abs((eval(d, x, t + h) - eval(d, x, t - h)) / (2 * h) - eval_dt(d, x, t)); };
  auto err_dx = [&](double h) { return std::abs((eval(d, x + h, t) - eval(d, x - h, t)) / (2 * h) - eval_dx(d, x, t)); };
  auto err_dxx = [&](double h) {
    return std::abs((eval(d, x + h, t) - 2 * eval(d, x, t) + eval(d, x - h, t)) / (h * h) - eval_dxx(d, x, t));
  };
  auto check = [](auto err, const char* what) {
    const double e1 = err(2e-3), e2 = err(1e-3);
    if (e1 < 1e-11) return;  // derivative reproduced exactly (constant direction)
    const double r = e1 / e2;
    EXPECT_GE(r, 3.3) << what;
    EXPECT_LE(r, 4.7) << what;
  };
  check(err_dt, "dt");
  check(err_dx, "dx");
  check(err_dxx, "dxx");
}

INSTANTIATE_TEST_SUITE_P(Variants, DerivativeConvergence,
                         ::testing::Values(DataSpec{data::GaussianBump{-0.3, 100.0}}, DataSpec{data::PaperForcing{0.1}},
                                           DataSpec{data::SineManufactured{1.5, 0.7, std::numbers::pi, 0.2}},
                                           DataSpec{data::ExpEigen{1.1, -0.4}}));

TEST(Describe, SeventeenDigits) {
  EXPECT_EQ(describe(data::PaperForcing{0.1}), "paper(t0=0.10000000000000001)");
  EXPECT_EQ(describe(data::Zero{}), "zero");
}
