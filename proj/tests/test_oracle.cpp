#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"

using namespace rcm;
using rcm::testing::coarse_config;
using rcm::testing::v1;

namespace {

const XiGrid kGrid = XiGrid::uniform(1, -1.0, 1.0, 21);

}  // namespace

TEST(Oracle, NoNoiseReproducesDeterministicManifold) {
  const auto cfg = coarse_config();
  const auto spec = builtin_example<1, 1>();
  const auto p = rcm::testing::shared_path(2, cfg.h, 14.0);
  const auto Hd = deterministic_center_manifold(spec, kGrid, cfg);
  for (std::size_t i = 0; i < kGrid.size(); i += 4) {
    const Vec<1> xi = kGrid.point<1>(i);
    const auto r = solve_rde_manifold(spec, p.ou, p.ou, 0.0, xi, cfg);
    EXPECT_LE(std::abs(r.tilde_H(0) - Hd.table.at(i)(0)), 5.0 * cfg.fp_tol);
    EXPECT_LE(r.residual, cfg.fp_tol);
  }
}

TEST(Oracle, ZeroNonlinearityGivesZeroGraph) {
  const auto cfg = coarse_config();
  const auto p = rcm::testing::shared_path(2, cfg.h, 14.0);
  for (double eps : {0.0, 0.3}) {
    EXPECT_EQ(solve_rde_manifold(rcm::testing::linear_spec(), p.ou, p.ou, eps, v1(0.7), cfg).tilde_H(0), 0.0);
  }
}

TEST(Oracle, ExampleMatchesExactPathIntegral) {
  // H~^eps(xi~) = -xi~^2 int e^{s} e^{eps J(s)} ds for the shared-driver example
  // (the stable block integrates -e^{eps z} X^2 with X = xi~ e^{eps J}).
  const auto cfg = coarse_config(0.005, 14.0);
  const auto p = rcm::testing::shared_path(6, cfg.h, 14.0);
  const double eps = 0.3, xi = 0.8;
  const auto r = solve_rde_manifold(builtin_example<1, 1>(), p.ou, p.ou, eps, v1(xi), cfg);
  const NoiseWindow nw = NoiseWindow::at_origin(p.ou, p.ou, cfg.window_steps());
  double ref = 0.0;
  for (std::size_t k = 0; k <= nw.steps; ++k) {
    const double w = (k == 0 || k == nw.steps) ? 0.5 * cfg.h : cfg.h;
    // e^{-(0 - s)} e^{eps (J(0) - J(s))} e^{eps z(s)} xi^2 e^{2 eps J(s)}
    ref += w * std::exp(nw.time(k)) * std::exp(eps * (nw.z1[2 * k] + nw.J1[k]));
  }
  EXPECT_NEAR(r.tilde_H(0), -xi * xi * ref, 1e-9);
}

TEST(Oracle, OriginalCoordinates) {
  const auto cfg = coarse_config();
  const auto spec = builtin_example<1, 1>();
  const auto p = rcm::testing::shared_path(2, cfg.h, 14.0);
  const double eps = 0.2;
  auto r = oracle_at(spec, p.ou, p.ou, eps, v1(0.5), cfg);
  EXPECT_NEAR(r.xi(0), 0.5, 1e-15);
  EXPECT_NEAR(r.xi_tilde(0), 0.5 * std::exp(-eps * p.ou.at_zero()), 1e-15);
  EXPECT_NEAR(r.H(0), std::exp(eps * p.ou.at_zero()) * r.tilde_H(0), 1e-15);
  auto same = r;
  EXPECT_EQ(manifold_original(same, ConjugacyContext{eps, 0.0, 0.0, true})(0), r.tilde_H(0));
  EXPECT_EQ(manifold_original(same, ConjugacyContext{0.0, 5.0, 5.0, true})(0), r.tilde_H(0));
}

TEST(Oracle, DivergenceIsReported) {
  auto cfg = coarse_config();
  cfg.fp_max_iters = 1;
  const auto p = rcm::testing::shared_path(2, cfg.h, 14.0);
  EXPECT_THROW(solve_rde_manifold(builtin_example<1, 1>(), p.ou, p.ou, 0.1, v1(0.5), cfg), DivergenceError);
}

TEST(Simulation, OriginIsAnEquilibrium) {
  const auto p = rcm::testing::shared_path(2, 0.01, 1.0, 2.0);
  const auto tr = simulate_rde(builtin_example<1, 1>(), p.ou, p.ou, 0.5, v1(0.0), v1(0.0), 2.0);
  EXPECT_EQ(tr.t.size(), 201u);
  EXPECT_EQ(tr.X.back()(0), 0.0);
  EXPECT_EQ(tr.Y.back()(0), 0.0);
}

TEST(Simulation, DeterministicParabolaIsInvariant) {
  const auto p = rcm::testing::shared_path(2, 0.01, 1.0, 2.0);
  const auto tr = simulate_rde(builtin_example<1, 1>(), p.ou, p.ou, 0.0, v1(0.7), v1(-0.49), 2.0);
  for (std::size_t i = 0; i < tr.t.size(); ++i) EXPECT_NEAR(tr.Y[i](0), -tr.X[i](0) * tr.X[i](0), 1e-12);
}

TEST(Simulation, CocycleRestartIsNodeExact) {
  const auto p = rcm::testing::shared_path(9, 0.01, 1.0, 2.0);
  const auto spec = builtin_example<1, 1>();
  const auto whole = simulate_rde(spec, p.ou, p.ou, 0.4, v1(0.6), v1(0.1), 1.5);
  const auto first = simulate_rde(spec, p.ou, p.ou, 0.4, v1(0.6), v1(0.1), 0.7);
  const auto second = simulate_rde(spec, p.ou, p.ou, 0.4, first.X.back(), first.Y.back(), 1.5, 0.7);
  EXPECT_EQ(whole.X.back()(0), second.X.back()(0));
  EXPECT_EQ(whole.Y.back()(0), second.Y.back()(0));
}

TEST(Simulation, BlowUpIsDetected) {
  auto spec = builtin_example<1, 1>();
  spec.f_c.value = [](const Vec<1>& x, const Vec<1>&) { return Vec<1>::Constant(x(0) * x(0)).eval(); };
  const auto p = rcm::testing::shared_path(2, 0.01, 1.0, 2.0);
  EXPECT_THROW(simulate_rde(spec, p.ou, p.ou, 0.0, v1(5.0), v1(0.0), 2.0), InstabilityError);
  EXPECT_THROW(simulate_sde_stratonovich(spec, p.w, p.w, 0.0, v1(5.0), v1(0.0), 2.0), InstabilityError);
  EXPECT_THROW(simulate_rde(spec, p.ou, p.ou, 0.0, v1(0.0), v1(0.0), 3.0), RangeError);
}

TEST(Simulation, PureNoiseSdeIsGeometricBrownianMotion) {
  const auto spec = rcm::testing::linear_spec();
  auto s = spec;
  s.A_s(0, 0) = 0.0;
  const auto p = rcm::testing::shared_path(3, 0.001, 1.0, 1.0);
  const double eps = 0.5;
  const auto tr = simulate_sde_stratonovich(s, p.w, p.w, eps, v1(1.0), v1(2.0), 1.0);
  for (std::size_t i = 0; i < tr.t.size(); i += 100) {
    const double W = p.w.values[p.w.grid.zero_index() + i];
    EXPECT_NEAR(tr.X[i](0), std::exp(eps * W), 1e-3);
    EXPECT_NEAR(tr.Y[i](0), 2.0 * std::exp(eps * W), 2e-3);
  }
}

TEST(Simulation, SdeWithoutNoiseMatchesDeterministicFlow) {
  const auto p = rcm::testing::shared_path(3, 0.001, 1.0, 1.0);
  const auto tr = simulate_sde_stratonovich(builtin_example<1, 1>(), p.w, p.w, 0.0, v1(0.5), v1(0.3), 1.0);
  // x constant, y = -x^2 + (y0 + x^2) e^{-t}
  EXPECT_NEAR(tr.Y.back()(0), -0.25 + 0.55 * std::exp(-1.0), 1e-6);
}

TEST(Simulation, ConjugacyHoldsToFirstOrder) {
  const auto spec = builtin_example<1, 1>();
  const double eps = 0.5;
  double gaps[2] = {0.0, 0.0};
  const int seeds = 6;
  for (int s = 0; s < seeds; ++s) {
    const TimeGrid g = TimeGrid::from_step(4.0, 1.0, 0.001);
    const WienerPath fine = generate_wiener(static_cast<std::uint64_t>(s) + 40, g);
    for (int level = 0; level < 2; ++level) {
      const WienerPath w = level == 0 ? fine : coarsen(fine, 2);
      const OUPath ou = ou_from_wiener(w, OuInit::stationary_sample);
      const Vec<1> x0 = v1(0.8), y0 = v1(-0.3);
      const auto sde = simulate_sde_stratonovich(spec, w, w, eps, x0, y0, 1.0);
      const double zt = ou.at_zero();
      const auto rde = simulate_rde(spec, ou, ou, eps, (std::exp(-eps * zt) * x0).eval(),
                                    (std::exp(-eps * zt) * y0).eval(), 1.0);
      gaps[level] += conjugacy_gap(sde, rde, ou, ou, eps) / seeds;
    }
  }
  EXPECT_LT(gaps[0], 0.05);
  EXPECT_GT(gaps[1] / gaps[0], 1.5);
  EXPECT_LT(gaps[1] / gaps[0], 2.5);
}

TEST(Invariance, OracleGraphIsInvariant) {
  const auto cfg = coarse_config(0.01, 12.0);
  const auto spec = builtin_example<1, 1>();
  const auto p = rcm::testing::shared_path(7, cfg.h, 13.0, 1.0);
  const double eps = 0.1;
  const auto rep = invariance_defect(spec, p.ou, p.ou, eps, v1(0.6), 1.0, 0.25,
                                     oracle_evaluator(spec, p.ou, p.ou, eps, cfg));
  EXPECT_EQ(rep.samples.size(), 4u);
  EXPECT_LT(rep.sup_defect, 10.0 * (cfg.h + std::exp(-0.5 * cfg.T_trunc)));
}

TEST(Invariance, ExactParabolaWithoutNoise) {
  const auto cfg = coarse_config(0.01, 12.0);
  const auto spec = builtin_example<1, 1>();
  const auto p = rcm::testing::shared_path(7, cfg.h, 13.0, 1.0);
  const ManifoldEvaluator<1, 1> parabola = [](std::size_t, const Vec<1>& X) { return Vec<1>(-X * X(0)); };
  EXPECT_LT(invariance_defect(spec, p.ou, p.ou, 0.0, v1(0.6), 1.0, 0.1, parabola).sup_defect, 1e-12);
  EXPECT_THROW(invariance_defect(spec, p.ou, p.ou, 0.0, v1(0.6), 5.0, 0.1, parabola), RangeError);
}

TEST(ConvergenceOrder, SlopeFit) {
  EXPECT_NEAR(loglog_slope({0.1, 0.2, 0.4}, {2e-3, 1.6e-2, 1.28e-1}), 3.0, 1e-12);
  EXPECT_THROW(loglog_slope({0.1}, {1.0}), ConfigError);
  EXPECT_THROW(loglog_slope({0.1, 0.2}, {0.0, 1.0}), RangeError);
}

TEST(ConvergenceOrder, LinearSystemIsExact) {
  const auto cfg = coarse_config();
  const auto spec = rcm::testing::linear_spec();
  const auto p = rcm::testing::shared_path(2, cfg.h, 14.0);
  const auto e = build_expansion(spec, kGrid, p.ou, p.ou, cfg);
  for (double eps : {0.0, 0.1, 0.2}) {
    EXPECT_EQ(oracle_at(spec, p.ou, p.ou, eps, v1(0.5), cfg).H(0), evaluate_expansion(e, v1(0.5), eps)(0));
  }
}

TEST(ConvergenceOrder, ZeroEpsRowAndDivergentOracle) {
  const auto cfg = coarse_config();
  const auto spec = builtin_example<1, 1>();
  const auto p = rcm::testing::shared_path(2, cfg.h, 14.0);
  const auto e = build_expansion(spec, kGrid, p.ou, p.ou, cfg);
  const OrderStudy st = convergence_order(spec, p.ou, p.ou, e, v1(0.7), {0.0, 0.2, 0.1, 0.05}, cfg);
  ASSERT_EQ(st.rows.size(), 4u);
  EXPECT_LE(st.rows[0].err_full, 5.0 * cfg.fp_tol + 1e-12);
  EXPECT_GT(st.slope_full, 2.5);
  auto starved = cfg;
  starved.fp_max_iters = 1;
  EXPECT_THROW(convergence_order(spec, p.ou, p.ou, e, v1(0.7), {0.2, 0.1, 0.05}, starved), DivergenceError);
  EXPECT_THROW(convergence_order(spec, p.ou, p.ou, e, v1(0.7), {0.2, 0.1}, cfg), ConfigError);
}
