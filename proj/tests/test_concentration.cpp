#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hardy/concentration.hpp"

using namespace hardy;
using namespace hardy::concentration;

namespace {
const Measure1D& exp_measure() {
  static const Measure1D m = normalize(PotentialSpec::exp());
  return m;
}

// n = 2 oracle: min over a fine grid of y1 of g(y1) + g(D - y1)
double halfspace_oracle_2(double D, double r) {
  double best = std::numeric_limits<double>::infinity();
  const int steps = 200000;
  for (int i = 0; i <= steps; ++i) {
    const double y = D * i / steps;
    best = std::min(best, g1(y, r) + g1(D - y, r));
  }
  return best;
}
}  // namespace

TEST(Bounds, TwoLevel) {
  EXPECT_DOUBLE_EQ(two_level_bound(1, 1.5, 1, 1, 0), 2.0);
  EXPECT_NEAR(two_level_bound(1, 1.5, 1, 1, 1), 2.0 * std::exp(-0.5), 1e-15);
  EXPECT_NEAR(two_level_bound(1, 1.5, 1, 1, 9), 2.0 * std::exp(-13.5), 1e-20);
  // C = 4, A = 2, B = 3, r = 1.2, t = 5: min{25/16, 5^1.2 / (4^0.2 3^1.2)}
  const double want = 2.0 * std::exp(-0.5 * std::min(25.0 / 16.0, std::pow(5.0, 1.2) /
                                                                       (std::pow(4.0, 0.2) *
                                                                        std::pow(3.0, 1.2))));
  EXPECT_NEAR(two_level_bound(4, 1.2, 2, 3, 5), want, 1e-15);
  EXPECT_EQ(two_level_bound(1, 1.5, 0, 0, 1), 0.0);
  EXPECT_THROW(two_level_bound(0, 1.5, 1, 1, 1), DomainError);
}

TEST(Costs, GAndPointSets) {
  EXPECT_DOUBLE_EQ(g_cost({0.5}, 1.5), 0.25);
  EXPECT_NEAR(g_cost({3.0, 0.5}, 1.5), std::pow(3.0, 1.5) + 0.25, 1e-14);
  EXPECT_NEAR(f_a_cost({3.0, 0.5}, {{0.0, 0.0}}, 1.5), 5.4462, 1e-4);
  EXPECT_EQ(f_a_cost({1.0, 2.0}, {{5.0, 5.0}, {1.0, 2.0}}, 1.5), 0.0);
  EXPECT_THROW(f_a_cost({1.0}, {}, 1.5), DomainError);
}

TEST(Costs, HalfspaceAgainstOracle) {
  EXPECT_EQ(f_a_halfspace({0.2, -1.0}, 0.0, 1.5), 0.0);
  EXPECT_NEAR(f_a_halfspace({3.0}, 1.0, 1.5), std::pow(2.0, 1.5), 1e-14);
  for (double r : {1.2, 1.5, 1.8})
    for (double D : {0.3, 1.0, 1.9, 2.5, 4.0, 11.0}) {
      const double v = f_a_halfspace({D, 0.0}, 0.0, r);
      const double o = halfspace_oracle_2(D, r);
      EXPECT_LE(v, o + 1e-9) << r << " " << D;
      EXPECT_GE(v, o - 1e-6) << r << " " << D;
    }
}

TEST(Costs, HalfspaceUpperBoundsThreeDims) {
  // A discretized to 100^2 points on its boundary plane a3 = c - a1 - a2
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  const double c = -0.5, r = 1.5;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> x = {U(gen), U(gen), U(gen)};
    std::vector<std::vector<double>> A;
    for (int i = 0; i < 100; ++i)
      for (int j = 0; j < 100; ++j) {
        const double a1 = x[0] - 4.0 + 0.08 * i, a2 = x[1] - 4.0 + 0.08 * j;
        A.push_back({a1, a2, c - a1 - a2});
      }
    const double brute = f_a_cost(x, A, r);
    const double v = f_a_halfspace(x, c, r);
    if (x[0] + x[1] + x[2] <= c) {
      EXPECT_EQ(v, 0.0);
      continue;
    }
    EXPECT_LE(v, brute + 1e-12);         // discretized A is a subset of the halfspace
    EXPECT_GE(v, brute - 0.35) << k;     // grid resolution 0.08 per coordinate
  }
}

TEST(Costs, PointSetInsideHalfspaceCostsMore) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  std::vector<std::vector<double>> A = {{0, 0}, {-1, 0.5}, {0.3, -2}};
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> x = {U(gen), U(gen)};
    EXPECT_GE(f_a_cost(x, A, 1.5), f_a_halfspace(x, 0.0, 1.5) - 1e-12);
  }
}

TEST(Deviation, ZeroStatistic) {
  auto rep = deviation_experiment(exp_measure(), 4, StatisticSpec::parse("zero"), {0.5, 1.0}, 1000,
                                  1, 1.0, 1.5);
  for (double p : rep.empirical_tail) EXPECT_EQ(p, 0.0);
  for (double b : rep.bound_tail) EXPECT_EQ(b, 0.0);
}

TEST(Deviation, OneDimensionalExponential) {
  auto rep = deviation_experiment(exp_measure(), 1, StatisticSpec::parse("mean_scaled"),
                                  {0.5, 1.0, 2.0, 4.0}, 200000, 7, 10.0, 1.5);
  for (std::size_t i = 0; i < rep.t_grid.size(); ++i) {
    const double want = 2.0 * exp_measure().tail(rep.t_grid[i]);
    EXPECT_NEAR(rep.empirical_tail[i], want, rep.radius[i]) << rep.t_grid[i];
    if (i > 0) {
      EXPECT_LE(rep.empirical_tail[i], rep.empirical_tail[i - 1]);
    }
    EXPECT_GE(rep.empirical_tail[i], 0.0);
    EXPECT_LE(rep.empirical_tail[i], 1.0);
  }
}

TEST(Deviation, DeterministicInSeed) {
  auto st = StatisticSpec::parse("softmax:2");
  auto a = deviation_experiment(exp_measure(), 8, st, {0.5, 1.0}, 5000, 42, 5.0, 1.5);
  auto b = deviation_experiment(exp_measure(), 8, st, {0.5, 1.0}, 5000, 42, 5.0, 1.5);
  auto c = deviation_experiment(exp_measure(), 8, st, {0.5, 1.0}, 5000, 43, 5.0, 1.5);
  EXPECT_EQ(a.empirical_tail, b.empirical_tail);
  EXPECT_EQ(a.constants.at("mean"), b.constants.at("mean"));
  EXPECT_NE(a.constants.at("mean"), c.constants.at("mean"));
  EXPECT_EQ(st.label(), "softmax(2.000000)");
  EXPECT_THROW(StatisticSpec::parse("median"), DomainError);
}

TEST(Deviation, TwoSidedIsSumOfOneSided) {
  const std::size_t count = 100000;
  auto rep = deviation_experiment(exp_measure(), 1, StatisticSpec::parse("mean_scaled"), {1.5},
                                  count, 3, 10.0, 1.5);
  auto xs = sample(exp_measure(), 3, count);
  const double mean = rep.constants.at("mean");
  double up = 0, down = 0;
  for (double x : xs) {
    up += x - mean >= 1.5;
    down += mean - x >= 1.5;
  }
  EXPECT_NEAR(rep.empirical_tail[0], (up + down) / count, 1e-12);
}

TEST(Deviation, LipschitzConstants) {
  auto [a, b] = StatisticSpec::parse("mean_scaled").lipschitz(64, 1.5);
  EXPECT_EQ(a, 1.0);
  EXPECT_NEAR(b, std::pow(64.0, 1.0 / 3.0 - 0.5), 1e-15);
  EXPECT_EQ(StatisticSpec::parse("max").lipschitz(64, 1.5).second, 1.0);
}

TEST(Enlargement, HalfMassAtZero) {
  auto rep = enlargement_experiment(exp_measure(), 4, {0.0, 1.0, 3.0}, 20000, 5, 4.0, 1.5);
  EXPECT_LE(rep.empirical_tail[0], 0.5 + rep.radius[0]);
  EXPECT_GE(rep.empirical_tail[0], 0.5 - rep.radius[0]);
  EXPECT_NEAR(rep.constants.at("K"), std::min(0.25, 0.5) / 32.0, 1e-15);
  EXPECT_LE(rep.empirical_tail[2], rep.empirical_tail[1]);
}

TEST(Gradient, RatiosWithinOne) {
  for (double r : {1.2, 1.5, 1.8})
    for (double t : {0.5, 2.0, 10.0}) {
      auto g = lipschitz_gradient_check(r, t, 2000, 17, 3.0);
      EXPECT_EQ(g.points, 2000u);
      EXPECT_LE(g.worst_l2, 1.0 + 1e-9);
      EXPECT_LE(g.worst_rprime, 1.0 + 1e-9);
    }
}

TEST(Gradient, InnerCubeIsExact) {
  // inside |x_i| < 1: sum |grad|^2 = 4 G
  std::vector<double> x = {0.3, -0.7, 0.1};
  double s = 0;
  for (double v : x) s += 4 * v * v;
  EXPECT_NEAR(s, 4 * g_cost(x, 1.5), 1e-15);
  auto far = lipschitz_gradient_check(1.5, 1e6, 500, 1, 2.0);
  EXPECT_LT(far.worst_l2, 1e-4);
}

TEST(Transport, SinPowerPositive) {
  const auto m = normalize(PotentialSpec::sinpower(1.5, 1));
  auto tc = transport_check(m, 1.5);
  EXPECT_GT(tc.b_alpha_inf, 0.01);
  EXPECT_NE(tc.x, tc.y);
  EXPECT_THROW(transport_check(exp_measure(), 1.0), DomainError);
  // adjacent grid pairs: numerator >= 1, step 80/399 < 1
  auto g = symmetric_grid();
  EXPECT_GE((1.0 + 0.0) / std::pow(g[1] - g[0], 1.5), 1.0);
}
