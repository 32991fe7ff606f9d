#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"

using namespace rcm;
using rcm::testing::v1;

namespace {

std::vector<double> symmetric_samples() {
  std::vector<double> t;
  for (int i = -50; i <= 50; ++i) t.push_back(0.2 * i);
  return t;
}

}  // namespace

TEST(HypothesisH, ExampleSatisfiesUnitConstants) {
  const auto spec = builtin_example<1, 1>();
  const HypothesisReport r = verify_hypothesis_H(spec, example_trichotomy(), symmetric_samples());
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.required_K, 1.0, 1e-12);
}

TEST(HypothesisH, TooLargeBetaIsRejected) {
  const auto spec = builtin_example<1, 1>();
  const HypothesisReport r = verify_hypothesis_H(spec, TrichotomyParams{1.0, 2.0, 0.0}, symmetric_samples());
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.stable_violation, 0.0);
}

TEST(HypothesisH, NonNormalBlockNeedsLargerK) {
  CenterStableSpec<Dynamic, Dynamic> spec;
  spec.A_c = Eigen::MatrixXd::Zero(1, 1);
  spec.A_s = Eigen::MatrixXd(2, 2);
  spec.A_s << -1.0, 5.0, 0.0, -1.0;
  const HypothesisReport r = verify_hypothesis_H(spec, TrichotomyParams{1.0, 0.5, 0.0}, symmetric_samples());
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.required_K, 1.5);
  const HypothesisReport ok =
      verify_hypothesis_H(spec, TrichotomyParams{r.required_K * 1.001, 0.5, 0.0}, symmetric_samples());
  EXPECT_TRUE(ok.pass);
}

TEST(HypothesisH, NonFiniteMatrixIsAConfigError) {
  auto spec = builtin_example<1, 1>();
  spec.A_s(0, 0) = std::nan("");
  EXPECT_THROW(verify_hypothesis_H(spec, example_trichotomy(), symmetric_samples()), ConfigError);
}

TEST(GapCondition, ClosedFormMatchesScanAndEdgeCases) {
  const TrichotomyParams p{1.5, 2.0, 0.25};
  const double L = 0.1;
  const GapReport r = gap_condition(p, L);
  EXPECT_NEAR(r.margin, 4.0 * 1.5 * 0.1 / 1.75, 1e-15);
  EXPECT_NEAR(r.eta_star, 1.125, 1e-15);
  EXPECT_TRUE(r.holds);
  double best = 1e300;
  for (int i = 0; i < 999; ++i) best = std::min(best, gap_sum(p, L, p.gamma + 1.75 * (i + 1) / 1000.0));
  EXPECT_NEAR(best, r.margin, 1e-6);
  EXPECT_EQ(gap_condition(p, 0.0).margin, 0.0);
  EXPECT_FALSE(gap_condition(TrichotomyParams{1.0, 1.0, 0.0}, 0.3).holds);
  EXPECT_THROW(gap_condition(TrichotomyParams{1.0, 1.0, 1.0}, 0.1), ConfigError);
  EXPECT_THROW(gap_condition(TrichotomyParams{0.5, 1.0, 0.0}, 0.1), ConfigError);
}

TEST(ExpansionConfig, Validation) {
  ExpansionConfig c;
  EXPECT_NO_THROW(c.validate(example_trichotomy()));
  c.eta = 1.2;
  EXPECT_THROW(c.validate(example_trichotomy()), ConfigError);
  c = ExpansionConfig{};
  c.fp_damping = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NEAR(ExpansionConfig::default_truncation(1e-10, 1.0, 0.5), 2.0 * std::log(1e10), 1e-12);
}

TEST(NumericDerivatives, MatchAnalyticExample) {
  const auto exact = builtin_example<1, 1>();
  auto bare = exact;
  bare.f_s.d_x = nullptr;
  bare.f_s.d_y = nullptr;
  bare.f_s.d_xx = nullptr;
  bare.f_s.d_xy = nullptr;
  bare.f_s.d_yy = nullptr;
  const auto num = with_numeric_derivatives(bare);
  for (double x : {-1.0, -0.3, 0.0, 0.8}) {
    for (double y : {-0.5, 0.2}) {
      EXPECT_NEAR(num.f_s.d_x(v1(x), v1(y))(0, 0), exact.f_s.d_x(v1(x), v1(y))(0, 0), 1e-8);
      EXPECT_NEAR(num.f_s.d_y(v1(x), v1(y))(0, 0), 0.0, 1e-8);
      EXPECT_NEAR(num.f_s.d_xx(v1(x), v1(y), v1(0.7), v1(-1.3))(0), -2.0 * 0.7 * -1.3, 1e-5);
      EXPECT_NEAR(num.f_s.d_xy(v1(x), v1(y), v1(0.7), v1(-1.3))(0), 0.0, 1e-5);
    }
  }
}

TEST(NumericDerivatives, SecondDerivativeFromSuppliedJacobian) {
  auto spec = builtin_example<1, 1>();
  spec.f_s.d_xx = nullptr;
  const auto num = with_numeric_derivatives(spec);
  EXPECT_NEAR(num.f_s.d_xx(v1(0.4), v1(0.0), v1(1.0), v1(1.0))(0), -2.0, 1e-7);
  EXPECT_EQ(num.f_s.d_xx(v1(0.4), v1(0.0), v1(0.0), v1(1.0))(0), 0.0);
}

TEST(CheckDerivatives, AcceptsExactAndRejectsWrong) {
  std::vector<std::pair<Vec<1>, Vec<1>>> pts;
  for (double x : {-1.0, 0.0, 0.5}) pts.emplace_back(v1(x), v1(0.3));
  EXPECT_TRUE(check_derivatives(builtin_example<1, 1>(), pts).pass);
  auto wrong = builtin_example<1, 1>();
  wrong.f_s.d_x = [](const Vec<1>& x, const Vec<1>&) { return Mat<1, 1>::Constant(-2.1 * x(0)).eval(); };
  const DerivativeReport r = check_derivatives(wrong, pts);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.max_first_error, 1e-3);
}

TEST(Cutoff, RampProfile) {
  const RadialCutoff c{1.0};
  EXPECT_EQ(c.value(0.5), 1.0);
  EXPECT_EQ(c.value(2.5), 0.0);
  EXPECT_NEAR(c.value(1.5), 0.5, 1e-15);
  for (double r : {1.0, 2.0}) {
    EXPECT_NEAR(c.value(r - 1e-9), c.value(r + 1e-9), 1e-8);
    EXPECT_NEAR(c.slope(r - 1e-9), c.slope(r + 1e-9), 1e-7);
  }
  for (double r = 1.05; r < 2.0; r += 0.1) {
    EXPECT_NEAR(c.slope(r), (c.value(r + 1e-6) - c.value(r - 1e-6)) / 2e-6, 1e-6);
    EXPECT_NEAR(c.curvature(r), (c.slope(r + 1e-6) - c.slope(r - 1e-6)) / 2e-6, 1e-5);
  }
}

TEST(Cutoff, LeavesBallUntouchedAndKeepsDerivativesConsistent) {
  const auto spec = builtin_example<1, 1>();
  // A wide transition keeps the higher derivatives of the cutoff O(1), which
  // the difference-quotient tolerances assume.
  const auto cut = apply_cutoff(spec, 2.0);
  EXPECT_EQ(cut.f_s.value(v1(1.5), v1(0.1))(0), spec.f_s.value(v1(1.5), v1(0.1))(0));
  EXPECT_EQ(cut.f_s.value(v1(4.5), v1(0.0))(0), 0.0);
  std::vector<std::pair<Vec<1>, Vec<1>>> pts;
  for (double x : {2.2, 2.7, 3.3}) pts.emplace_back(v1(x), v1(0.2));
  const DerivativeReport r = check_derivatives(cut, pts);
  EXPECT_TRUE(r.pass) << r.max_first_error << ' ' << r.max_second_error;
  EXPECT_THROW(apply_cutoff(spec, -1.0), ConfigError);
}

TEST(Lyapunov, ExampleExponents) {
  const auto spec = builtin_example<1, 1>();
  const auto p = rcm::testing::shared_path(3, 0.01, 1.0, 50.0);
  Eigen::VectorXd vc(2), vs(2);
  vc << 1.0, 0.0;
  vs << 0.0, 1.0;
  const double eps = 0.05;
  const double drift = eps * integrate_z(p.ou, 0.0, 50.0) / 50.0;
  EXPECT_NEAR(estimate_lyapunov(spec, p.ou, p.ou, eps, vc, 50.0), drift, 1e-12);
  EXPECT_NEAR(estimate_lyapunov(spec, p.ou, p.ou, eps, vs, 50.0), -1.0 + drift, 1e-9);
  Eigen::VectorXd mixed(2);
  mixed << 1.0, 1.0;
  EXPECT_THROW(estimate_lyapunov(spec, p.ou, p.ou, eps, mixed, 50.0), ConfigError);
}
