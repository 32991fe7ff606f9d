#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"

using namespace rcm;

TEST(WienerPath, AnchoredAtZeroWithConsistentIncrements) {
  const TimeGrid g = TimeGrid::from_step(3.0, 2.0, 0.01);
  const WienerPath w = generate_wiener(7, g);
  EXPECT_EQ(w.values[g.zero_index()], 0.0);
  for (std::size_t k = 0; k < g.n_steps(); ++k) {
    EXPECT_EQ(w.values[k + 1] - w.values[k], w.increments[k]);
  }
}

TEST(WienerPath, SameSeedSameIncrementsWhateverTheExtent) {
  const WienerPath a = generate_wiener(11, TimeGrid::from_step(2.0, 1.0, 0.01));
  const WienerPath b = generate_wiener(11, TimeGrid::from_step(5.0, 3.0, 0.01));
  const std::size_t shift = b.grid.zero_index() - a.grid.zero_index();
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    EXPECT_NEAR(a.values[k], b.values[k + shift], 1e-12);
  }
}

TEST(WienerPath, ChannelsAndSeedsDiffer) {
  const TimeGrid g = TimeGrid::from_step(1.0, 1.0, 0.01);
  EXPECT_NE(generate_wiener(1, g, 0).values.front(), generate_wiener(1, g, 1).values.front());
  EXPECT_NE(generate_wiener(1, g, 0).values.front(), generate_wiener(2, g, 0).values.front());
}

TEST(WienerPath, IncrementVarianceMatchesStep) {
  const TimeGrid g = TimeGrid::from_step(100.0, 100.0, 0.01);
  const WienerPath w = generate_wiener(3, g);
  double sum = 0.0, sq = 0.0;
  for (double d : w.increments) {
    sum += d;
    sq += d * d;
  }
  const double n = static_cast<double>(w.increments.size());
  EXPECT_NEAR(sum / n, 0.0, 4.0 * std::sqrt(0.01 / n));
  EXPECT_NEAR(sq / n / 0.01, 1.0, 0.05);
}

TEST(Coarsen, KeepsNodeValues) {
  const TimeGrid g = TimeGrid::from_step(2.0, 1.0, 0.01);
  const WienerPath w = generate_wiener(5, g);
  const WienerPath c = coarsen(w, 2);
  ASSERT_EQ(c.grid.n_steps(), g.n_steps() / 2);
  EXPECT_NEAR(c.grid.step(), 0.02, 1e-15);
  for (std::size_t k = 0; k < c.values.size(); ++k) EXPECT_EQ(c.values[k], w.values[2 * k]);
  EXPECT_THROW(coarsen(w, 7), ConfigError);
  EXPECT_THROW(coarsen(w, 0), ConfigError);
}

TEST(OUPath, StationaryVarianceIsOneHalf) {
  const TimeGrid g = TimeGrid::from_step(1.0, 4000.0, 0.01);
  const OUPath ou = ou_from_wiener(generate_wiener(9, g), OuInit::stationary_sample);
  double sq = 0.0;
  for (double z : ou.z) sq += z * z;
  EXPECT_NEAR(sq / static_cast<double>(ou.z.size()), 0.5, 0.05);
}

TEST(OUPath, ZeroInitStartsAtZero) {
  const TimeGrid g = TimeGrid::from_step(1.0, 1.0, 0.01);
  const OUPath ou = ou_from_wiener(generate_wiener(9, g), OuInit::zero);
  EXPECT_EQ(ou.z.front(), 0.0);
  EXPECT_NE(ou.z.back(), 0.0);
}

TEST(OUPath, ZeroIncrementsDecayExponentially) {
  const TimeGrid g = TimeGrid::from_step(1.0, 1.0, 0.01);
  WienerPath w = generate_wiener(1, g);
  std::fill(w.increments.begin(), w.increments.end(), 0.0);
  const OUPath ou = ou_from_wiener(w, OuInit::stationary_sample);
  ASSERT_NE(ou.z.front(), 0.0);
  EXPECT_NEAR(ou.z.back(), ou.z.front() * std::exp(-2.0), 1e-12);
}

TEST(IntegrateZ, ConstantPathAndAntisymmetry) {
  const TimeGrid g = TimeGrid::from_step(2.0, 2.0, 0.1);
  const OUPath c = OUPath::from_values(g, std::vector<double>(g.size(), 1.5));
  EXPECT_NEAR(integrate_z(c, -1.25, 0.75), 3.0, 1e-12);
  const OUPath ou = ou_from_wiener(generate_wiener(4, g), OuInit::stationary_sample);
  EXPECT_NEAR(integrate_z(ou, -1.3, 0.4), -integrate_z(ou, 0.4, -1.3), 1e-14);
  EXPECT_NEAR(integrate_z(ou, -1.3, 0.4), integrate_z(ou, -1.3, 0.0) + integrate_z(ou, 0.0, 0.4), 1e-13);
  EXPECT_THROW(integrate_z(ou, -5.0, 0.0), RangeError);
}

namespace {

// O(N^2) reference sums over i < j in the window.
double brute_inner_exp(const WienerPath& w, double a) {
  const std::size_t first = w.grid.node_of(a);
  const std::size_t last = w.grid.zero_index();
  double s = 0.0;
  for (std::size_t j = first; j < last; ++j) {
    for (std::size_t i = first; i < j; ++i) s += std::exp(w.grid.time(i)) * w.increments[i] * w.increments[j];
  }
  return s;
}

double brute_wedge(const WienerPath& w, double a) {
  const std::size_t first = w.grid.node_of(a);
  const std::size_t last = w.grid.zero_index();
  double s = 0.0;
  for (std::size_t j = first; j < last; ++j) {
    for (std::size_t i = first; i < j; ++i) {
      const double v = w.grid.time(i);
      const double u = w.grid.time(j);
      s += std::exp(v) * (u - v) * w.increments[i] * w.increments[j];
    }
  }
  return s;
}

}  // namespace

TEST(IteratedIntegrals, MatchDirectDoubleSums) {
  const TimeGrid g = TimeGrid::from_step(4.0, 1.0, 0.02);
  const WienerPath w = generate_wiener(21, g);
  EXPECT_NEAR(ito_double_integral(w, IteratedKernel::inner_exp, -3.0), brute_inner_exp(w, -3.0), 1e-12);
  EXPECT_NEAR(ito_double_integral(w, IteratedKernel::wedge, -3.0), brute_wedge(w, -3.0), 1e-12);
}

TEST(IteratedIntegrals, ZeroPathGivesZero) {
  const TimeGrid g = TimeGrid::from_step(2.0, 1.0, 0.1);
  WienerPath w = generate_wiener(1, g);
  std::fill(w.increments.begin(), w.increments.end(), 0.0);
  EXPECT_EQ(ito_double_integral(w, IteratedKernel::inner_exp, -2.0), 0.0);
  EXPECT_EQ(ito_double_integral(w, IteratedKernel::wedge, -2.0), 0.0);
  EXPECT_EQ(exp_integral(w, -2.0), 0.0);
}

TEST(IteratedIntegrals, ItoSumsHaveZeroMeanAndExpIntegralHasIsometryVariance) {
  const TimeGrid g = TimeGrid::from_step(8.0, 0.0 + 0.1, 0.05);
  double inner = 0.0, e = 0.0, e2 = 0.0;
  const int seeds = 400;
  for (int s = 0; s < seeds; ++s) {
    const WienerPath w = generate_wiener(static_cast<std::uint64_t>(s) + 100, g);
    inner += ito_double_integral(w, IteratedKernel::inner_exp, -8.0);
    const double x = exp_integral(w, -8.0);
    e += x;
    e2 += x * x;
  }
  // Variances: inner_exp ~ 1/4, exp integral 1/2.
  EXPECT_NEAR(inner / seeds, 0.0, 4.0 * std::sqrt(0.25 / seeds));
  EXPECT_NEAR(e / seeds, 0.0, 4.0 * std::sqrt(0.5 / seeds));
  EXPECT_NEAR(e2 / seeds, 0.5, 0.12);
}

TEST(IteratedIntegrals, KernelParsingAndWindowChecks) {
  EXPECT_EQ(parse_kernel("inner_exp"), IteratedKernel::inner_exp);
  EXPECT_EQ(parse_kernel("wedge"), IteratedKernel::wedge);
  EXPECT_THROW(parse_kernel("levy"), ConfigError);
  const WienerPath w = generate_wiener(1, TimeGrid::from_step(1.0, 1.0, 0.1));
  EXPECT_THROW(ito_double_integral(w, IteratedKernel::wedge, 0.5), RangeError);
  EXPECT_THROW(exp_integral(w, -3.0), RangeError);
}

TEST(WritePaths, ColumnarFormat) {
  const TimeGrid g = TimeGrid::from_step(0.2, 0.1, 0.1);
  const WienerPath w = generate_wiener(2, g);
  const OUPath ou = ou_from_wiener(w, OuInit::zero);
  std::ostringstream os;
  write_paths(os, w, ou);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t w z");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(CounterNormal, DeterministicAndStandard) {
  const CounterNormal a(42, 0), b(42, 0), c(42, 1);
  EXPECT_EQ(a(-17), b(-17));
  EXPECT_NE(a(-17), c(-17));
  double s = 0.0, s2 = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = a(i);
    s += x;
    s2 += x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 0.02);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(TimeGrid, NodeAtZeroAndValidation) {
  const TimeGrid g = TimeGrid::from_step(1.0, 0.5, 0.1);
  EXPECT_EQ(g.time(g.zero_index()), 0.0);
  EXPECT_EQ(g.node_of(-0.3), g.zero_index() - 3);
  EXPECT_THROW(TimeGrid(0.5, 1.0, 10), ConfigError);
  EXPECT_THROW(g.locate(0.7), RangeError);
}
