#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "hardy/criteria.hpp"

using namespace hardy;
using namespace hardy::criteria;

namespace {
const double pi = std::numbers::pi;

const Measure1D& M(const PotentialSpec& s) {
  static std::map<std::string, Measure1D> cache;
  auto it = cache.find(s.label());
  if (it == cache.end()) it = cache.emplace(s.label(), normalize(s)).first;
  return it->second;
}
}  // namespace

TEST(Classify, FlatSequenceIsBounded) {
  std::vector<double> xs = {25, 50, 100, 200, 400, 800};
  std::vector<double> ls(xs.size(), 1.5);
  auto v = classify(xs, ls, 0.05, 0.02);
  EXPECT_EQ(v.label, Label::Bounded);
  EXPECT_NEAR(v.plateau_ratio, 1.0, 1e-15);
  EXPECT_NEAR(*v.growth_exponent, 0.0, 1e-12);
}

TEST(Classify, PowerGrowthRecoversExponent) {
  std::vector<double> xs = {25, 50, 100, 200, 400, 800}, ls;
  for (double x : xs) ls.push_back(0.3 * std::log(x) + 2.0);
  auto v = classify(xs, ls, 0.05, 0.02);
  EXPECT_EQ(v.label, Label::Divergent);
  EXPECT_NEAR(*v.growth_exponent, 0.3, 1e-12);
  EXPECT_LE(v.ci_lo, 0.3 + 1e-12);
  EXPECT_GE(v.ci_hi, 0.3 - 1e-12);
}

TEST(Classify, SlowCreepIsInconclusive) {
  std::vector<double> xs = {25, 50, 100, 200, 400, 800}, ls;
  for (double x : xs) ls.push_back(0.01 * std::log(x) + 0.03 * std::sin(x));
  auto v = classify(xs, ls, 0.005, 0.02);
  EXPECT_EQ(v.label, Label::Inconclusive);
}

TEST(Criteria, ExponentialPoincareBracket) {
  auto res = bp(M(PotentialSpec::exp()));
  EXPECT_EQ(res.verdict.label, Label::Bounded);
  // n^{-1} int_0^x e^{t} (tail mass e^{-x}) -> 1 - e^{-x}
  EXPECT_NEAR(res.final_sup(), 1.0, 1e-6);
  ASSERT_TRUE(res.bracket);
  EXPECT_NEAR(res.bracket->first, res.final_sup(), 1e-15);
  EXPECT_NEAR(res.bracket->second, 4.0 * res.final_sup(), 1e-12);
}

TEST(Criteria, GaussianPoincareAgainstDirectSup) {
  // Oracle: S = sup_x Phi(-x) int_0^x e^{t^2/2} dt, brute force by Simpson.
  double best = 0.0, acc = 0.0, prev = 1.0;
  const double h = 1e-4;
  for (double x = h; x < 8.0; x += h) {
    const double mid = std::exp((x - h / 2) * (x - h / 2) / 2), cur = std::exp(x * x / 2);
    acc += h / 6 * (prev + 4 * mid + cur);
    prev = cur;
    best = std::max(best, 0.5 * std::erfc(x / std::sqrt(2.0)) * acc * std::sqrt(2 * pi));
  }
  auto res = bp(M(PotentialSpec::gauss()));
  EXPECT_EQ(res.verdict.label, Label::Bounded);
  EXPECT_NEAR(res.final_sup(), best, 1e-6 * best);
}

TEST(Criteria, LogSobolevSplit) {
  EXPECT_EQ(bls(M(PotentialSpec::gauss())).verdict.label, Label::Bounded);
  auto e = bls(M(PotentialSpec::exp()));
  EXPECT_EQ(e.verdict.label, Label::Divergent);
  EXPECT_NEAR(*e.verdict.growth_exponent, 1.0, 0.05);
  auto p = bls(M(PotentialSpec::power(1.5)));
  EXPECT_EQ(p.verdict.label, Label::Divergent);
  EXPECT_NEAR(*p.verdict.growth_exponent, 0.5, 0.05);
}

TEST(Criteria, SinPowerThreshold) {
  const auto& m = M(PotentialSpec::sinpower(2, 1));
  EXPECT_EQ(blo(m, 1.15).verdict.label, Label::Bounded);
  EXPECT_EQ(bmls(m, 1.15).verdict.label, Label::Bounded);
  auto d = blo(m, 1.3);
  EXPECT_EQ(d.verdict.label, Label::Divergent);
  EXPECT_NEAR(*d.verdict.growth_exponent, 2.0 * (2.0 / dual(1.3) - 1.0 / 3.0), 0.1);
  EXPECT_EQ(bmls(m, 1.3).verdict.label, Label::Divergent);
}

TEST(Criteria, FloorPotential) {
  const auto& m = M(PotentialSpec::floor());
  EXPECT_EQ(bp(m).verdict.label, Label::Bounded);
  for (double r : {1.2, 1.5, 1.8}) EXPECT_EQ(blo(m, r).verdict.label, Label::Divergent) << r;
}

TEST(Criteria, WeightedCriterionRequiresEvenMeasure) {
  const auto& m = M(PotentialSpec::expr("abs(x)^2/2 + x", false));
  EXPECT_THROW(bweighted(m, 1.5), DomainError);
}

TEST(Criteria, RangeChecks) {
  const auto& m = M(PotentialSpec::exp());
  EXPECT_THROW(blo(m, 1.0), DomainError);
  EXPECT_THROW(bmls(m, 2.0), DomainError);
  ScanOptions o;
  o.horizons = {10};
  EXPECT_THROW(bp(m, o), DomainError);
  o.horizons = {20, 10};
  EXPECT_THROW(bp(m, o), DomainError);
}

TEST(Criteria, PartialSupsAreMonotone) {
  for (auto s : {PotentialSpec::sinpower(2, 2), PotentialSpec::floor(), PotentialSpec::power(1.5)}) {
    auto res = bp(M(s));
    for (std::size_t i = 1; i < res.log_partial_sups.size(); ++i)
      EXPECT_GE(res.log_partial_sups[i], res.log_partial_sups[i - 1]) << s.label();
  }
}

TEST(Criteria, SidesAgreeForEvenMeasures) {
  auto res = bp(M(PotentialSpec::power(1.5)));
  for (std::size_t i = 0; i < res.horizons.size(); ++i)
    EXPECT_NEAR(res.log_sups_plus[i], res.log_sups_minus[i], 1e-9);
}

TEST(Criteria, PoincareBelowLOOverLog2) {
  // B_LO(r) includes the factor log^{2/r'}(1 + 1/(2 mu)) >= log^{2/r'}(2)
  for (auto s : {PotentialSpec::exp(), PotentialSpec::gauss(), PotentialSpec::power(1.5),
                 PotentialSpec::sinpower(2, 1)}) {
    const auto& m = M(s);
    auto p = bp(m);
    for (double r : {1.2, 1.5, 1.8}) {
      auto l = blo(m, r);
      const double c = std::pow(std::log(2.0), 2.0 / dual(r));
      for (std::size_t i = 0; i < p.horizons.size(); ++i)
        EXPECT_LE(p.log_partial_sups[i], l.log_partial_sups[i] - std::log(c) + 1e-9)
            << s.label() << " r=" << r << " X=" << p.horizons[i];
    }
  }
}

TEST(Criteria, MlsBracketUsesConstructiveChain) {
  const auto& m = M(PotentialSpec::power(1.5));
  auto p = bp(m);
  auto res = bmls(m, 1.5);
  ASSERT_EQ(res.verdict.label, Label::Bounded);
  ASSERT_TRUE(res.bracket);
  EXPECT_EQ(res.bracket->first, 0.0);
  EXPECT_NEAR(res.bracket->second, 235.0 * 4.0 * p.final_sup() + 16.0 * res.final_sup(),
              1e-9 * res.bracket->second);
  EXPECT_NEAR(constructive_mls_constant(m, 1.5), res.bracket->second, 1e-9 * res.bracket->second);
}

TEST(Diagnostics, HypothesisRatios) {
  // ratio e^{(r-1)x} / int_0^x e^{(r-1)t} -> r - 1
  auto e = hyp_mls_check(M(PotentialSpec::exp()), 1.5, 0.1);
  EXPECT_TRUE(e.holds);
  EXPECT_NEAR(e.worst_ratio, 0.5, 0.02);
  // floor: each unit step the integrand jumps; the left limit gives 1 - e^{-1/2}
  auto f = hyp_mls_check(M(PotentialSpec::floor()), 1.5, 0.1);
  EXPECT_TRUE(f.holds);
  EXPECT_NEAR(f.worst_ratio, 1.0 - std::exp(-0.5), 0.02);
  EXPECT_FALSE(hyp_mls_check(M(PotentialSpec::floor()), 1.5, 0.5).holds);
}

TEST(Diagnostics, AsymptoticRatiosForPower) {
  // V = x^2 / 2, r = 1.5: V/V'^3 = 1/(2x), V/(x^{1/2} x^2) = 1/(2 sqrt x), V''/V'^2 = 1/x^2
  auto a = asymptotic_ratios_at(make_potential(PotentialSpec::gauss()), 1.5, {4.0, 16.0});
  EXPECT_NEAR(a.br_ratio[0], 1.0 / 8.0, 1e-12);
  EXPECT_NEAR(a.weighted_ratio[1], 1.0 / 8.0, 1e-12);
  EXPECT_NEAR(a.vpp_ratio[0], 1.0 / 16.0, 1e-6);
  EXPECT_THROW(asymptotic_ratios_at(make_potential(PotentialSpec::floor()), 1.5, {1.0}),
               DomainError);
}

TEST(Diagnostics, TailScale) {
  auto V = make_potential(PotentialSpec::exp());
  auto [th, capped] = tail_scale(V, 5.0);
  EXPECT_NEAR(th, 1.0, 1e-12);
  EXPECT_FALSE(capped);
  auto rows = tail_asymptotics(M(PotentialSpec::gauss()), {5.0, 10.0});
  ASSERT_EQ(rows.size(), 2u);
  // Mills ratio: int_x^inf e^{-t^2/2} ~ e^{-x^2/2} / x
  EXPECT_NEAR(*rows[1].ratio_deriv, 1.0, 0.02);
  EXPECT_TRUE(tail_scale(make_potential(PotentialSpec::expr("0*x")), 1.0).second);
}

TEST(Diagnostics, Threshold) {
  EXPECT_DOUBLE_EQ(r0(2.0), 1.2);
  EXPECT_DOUBLE_EQ(r0(1.0), 1.0);
  for (double a : {1.25, 1.5, 2.0, 3.0}) EXPECT_LT(r0(a), 1.5);
}
