#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace rcm;
using rcm::testing::v1;

TEST(ClosedForms, DeterministicParabola) {
  EXPECT_EQ(closed_Hd(1.0), -1.0);
  EXPECT_EQ(closed_Hd(0.0), -0.0);
  EXPECT_EQ(closed_Hd(0.5), -0.25);
  EXPECT_EQ(deterministic_reference()(1.0), -1.0);
}

TEST(ClosedForms, ZeroPathGivesNoCorrections) {
  const TimeGrid g = TimeGrid::from_step(10.0, 1.0, 0.01);
  WienerPath w = generate_wiener(1, g);
  std::fill(w.increments.begin(), w.increments.end(), 0.0);
  std::fill(w.values.begin(), w.values.end(), 0.0);
  const OUPath ou = ou_from_wiener(w, OuInit::zero);
  const auto f = ExampleClosedForms::from_path(w, ou, 10.0);
  EXPECT_EQ(closed_H1(f, 0.8), 0.0);
  EXPECT_EQ(closed_H2(f, 0.8), 0.0);
  EXPECT_EQ(brownian_H2(f, 0.8), 0.0);
}

TEST(ClosedForms, QuadraticInXi) {
  const auto p = rcm::testing::shared_path(4, 0.01, 10.0);
  const auto f = ExampleClosedForms::from_path(p.w, p.ou, 10.0);
  EXPECT_NEAR(closed_H1(f, 0.5) / closed_H1(f, 1.0), 0.25, 1e-15);
  EXPECT_NEAR(closed_H2(f, 0.5) / closed_H2(f, 1.0), 0.25, 1e-15);
  EXPECT_NEAR(brownian_H2(f, 0.5) / brownian_H2(f, 1.0), 0.25, 1e-15);
  EXPECT_EQ(closed_H1(f, 1.0), f.exp_int);
}

TEST(ClosedForms, RecomputationIsBitIdentical) {
  const auto p = rcm::testing::shared_path(4, 0.01, 10.0);
  auto f = ExampleClosedForms::from_path(p.w, p.ou, 10.0);
  const double inner = f.inner_exp, wedge = f.wedge, e = f.exp_w2;
  f.recompute();
  EXPECT_EQ(inner, f.inner_exp);
  EXPECT_EQ(wedge, f.wedge);
  EXPECT_EQ(e, f.exp_w2);
}

TEST(ClosedForms, ExpIntegralIsTheOuValueAtZero) {
  // z(0) = int e^u dW_u up to the e^{-T} memory of the initial value and the
  // O(h) weight of the discrete recursion.
  const auto p = rcm::testing::shared_path(4, 0.005, 20.0);
  const auto f = ExampleClosedForms::from_path(p.w, p.ou, 20.0);
  EXPECT_NEAR(f.exp_int, f.z, 0.01 * std::abs(f.z) + 1e-6);
}

TEST(ClosedForms, BrownianSecondOrderHasMeanMinusHalf) {
  // E int e^u W(u)^2 du = int e^u |u| du = 1.
  double mean = 0.0;
  const int seeds = 300;
  for (int s = 0; s < seeds; ++s) {
    const auto p = rcm::testing::shared_path(static_cast<std::uint64_t>(s) + 500, 0.05, 15.0, 0.1);
    mean += brownian_H2(ExampleClosedForms::from_path(p.w, p.ou, 15.0), 1.0) / seeds;
  }
  EXPECT_NEAR(mean, -0.5, 0.12);
}

TEST(ClosedForms, PipelineSecondOrderAgreesWithBrownianFormAcrossSeeds) {
  const ExpansionConfig cfg = rcm::testing::coarse_config(0.01, 14.0);
  const XiGrid grid = XiGrid::uniform(1, -1.0, 1.0, 11);
  const auto spec = builtin_example<1, 1>();
  const auto Hd = deterministic_center_manifold(spec, grid, cfg);
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto p = rcm::testing::shared_path(seed, cfg.h, 14.0);
    const auto e = build_expansion(spec, grid, p.ou, p.ou, cfg, Hd);
    const auto f = ExampleClosedForms::from_path(p.w, p.ou, 14.0);
    EXPECT_NEAR(e.H2.value(v1(1.0))(0), brownian_H2(f, 1.0), 0.05) << "seed " << seed;
    EXPECT_NEAR(e.H1.value(v1(1.0))(0), closed_H1(f, 1.0), 0.01 * std::abs(f.z) + 1e-6) << "seed " << seed;
  }
}
