#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hardy/measure.hpp"
#include "hardy/sampling.hpp"

using namespace hardy;

namespace {
const double pi = std::numbers::pi;

const Measure1D& exp_measure() {
  static const Measure1D m = normalize(PotentialSpec::exp());
  return m;
}
const Measure1D& gauss_measure() {
  static const Measure1D m = normalize(PotentialSpec::gauss());
  return m;
}
}  // namespace

TEST(Potential, BuiltinValues) {
  EXPECT_DOUBLE_EQ(make_potential(PotentialSpec::exp())(1.0), 1.0);
  EXPECT_NEAR(make_potential(PotentialSpec::sinpower(2, 1))(pi), pi * pi, 1e-12);
  EXPECT_DOUBLE_EQ(make_potential(PotentialSpec::floor())(-2.5), 2.0);
  EXPECT_DOUBLE_EQ(make_potential(PotentialSpec::gauss())(2.0), 2.0);
  const double x = pi / 2;
  EXPECT_NEAR(make_potential(PotentialSpec::expr("abs(x + sin(x))^2"))(x), (x + 1) * (x + 1),
              1e-13);
}

TEST(Potential, ParseSpecStrings) {
  auto s = PotentialSpec::parse("sinpower:2,1");
  EXPECT_EQ(s.family, Family::SinPower);
  EXPECT_EQ(s.params.size(), 2u);
  EXPECT_EQ(PotentialSpec::parse("sinpower:1.5").params[1], 1.0);
  EXPECT_EQ(PotentialSpec::parse("expr:\"x^2\"").expression, "x^2");
  EXPECT_EQ(PotentialSpec::parse("cattiaux:1.5,1.9").label(), "cattiaux:1.5,1.9");
  EXPECT_THROW(PotentialSpec::parse("nosuch"), DomainError);
  EXPECT_THROW(PotentialSpec::parse("power:abc"), DomainError);
  EXPECT_THROW(PotentialSpec::parse("expr:x^"), ParseError);
}

TEST(Potential, ParameterRanges) {
  EXPECT_THROW(make_potential(PotentialSpec::power(0.5)), DomainError);
  EXPECT_THROW(make_potential(PotentialSpec::sinpower(1.0, 1.0)), DomainError);
  EXPECT_THROW(make_potential(PotentialSpec::sinpower(2.0, -0.1)), DomainError);
  EXPECT_THROW(make_potential(PotentialSpec::cattiaux(2.0, 2.5)), DomainError);
  EXPECT_THROW(make_potential(PotentialSpec::cattiaux(1.5, 1.7)), DomainError);  // beta-1 < r-1/r
  EXPECT_THROW(make_potential(PotentialSpec::cattiaux(1.5, 2.6)), DomainError);
  EXPECT_NO_THROW(make_potential(PotentialSpec::cattiaux(1.5, 1.9)));
  const auto floor_with_param = PotentialSpec::builtin(Family::Floor, {1.0});
  EXPECT_THROW(make_potential(floor_with_param), DomainError);
}

TEST(Potential, DerivativesMatchFiniteDifferences) {
  const PotentialSpec specs[] = {PotentialSpec::exp(),           PotentialSpec::gauss(),
                                 PotentialSpec::power(1.5),      PotentialSpec::sinpower(2, 1),
                                 PotentialSpec::sinpower(1.5, 2), PotentialSpec::cattiaux(1.5, 1.9),
                                 PotentialSpec::expr("abs(x + sin(x))^3")};
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> U(-50.0, 50.0);
  for (const auto& spec : specs) {
    const Potential V = make_potential(spec);
    ASSERT_TRUE(V.has_derivative()) << spec.label();
    int checked = 0;
    while (checked < 100) {
      const double x = U(gen);
      if (std::abs(x) < 1e-2) continue;  // kink at 0
      const double h = 1e-6 * std::abs(x);
      const double fd = (V(x + h) - V(x - h)) / (2 * h);
      EXPECT_NEAR(V.derivative(x), fd, 1e-5 * std::max(1.0, std::abs(fd)))
          << spec.label() << " at " << x;
      ++checked;
    }
  }
  EXPECT_FALSE(make_potential(PotentialSpec::floor()).has_derivative());
  EXPECT_THROW(make_potential(PotentialSpec::floor()).derivative(1.0), DomainError);
}

TEST(Potential, SinPowerWithZeroLambdaIsPower) {
  const Potential a = make_potential(PotentialSpec::sinpower(1.7, 0.0));
  const Potential b = make_potential(PotentialSpec::power(1.7));
  for (double x = -30; x <= 30; x += 0.37) EXPECT_DOUBLE_EQ(a(x), b(x));
  EXPECT_EQ(a.split_period(), 0.0);
}

TEST(Potential, TableInterpolation) {
  const Potential V = make_potential(PotentialSpec::table({0, 1, 2}, {0, 1, 3}, true));
  EXPECT_DOUBLE_EQ(V(0.5), 0.5);
  EXPECT_DOUBLE_EQ(V(-1.5), 2.0);
  EXPECT_DOUBLE_EQ(V(4.0), 7.0);  // last slope 2
  EXPECT_TRUE(V.extrapolated(4.0));
  EXPECT_FALSE(V.extrapolated(-1.5));
  EXPECT_THROW(make_potential(PotentialSpec::table({0, 0}, {1, 2})), DomainError);
}

TEST(Truncation, Points) {
  const double X_exp = truncation_point(make_potential(PotentialSpec::exp()), 1e-12);
  // oracle: e^{-X} = eps (1 - e^{-X})
  EXPECT_NEAR(X_exp, std::log1p(1e12), 1.0);
  const double X_gauss = truncation_point(make_potential(PotentialSpec::gauss()), 1e-12);
  EXPECT_NEAR(X_gauss, 7.3, 0.5);
  const double X_v2 = truncation_point(make_potential(PotentialSpec::sinpower(2, 1)), 1e-12);
  EXPECT_GE(X_v2, 5.0);
  EXPECT_LE(X_v2, 9.0);
  EXPECT_THROW(truncation_point(make_potential(PotentialSpec::exp()), 1.5), DomainError);
}

TEST(Measure, NonIntegrableDiagnostic) {
  EXPECT_THROW(normalize(PotentialSpec::expr("0.5*log(1 + x^2)")), NonIntegrableError);
}

TEST(Measure, NormalizationConstants) {
  EXPECT_NEAR(exp_measure().z(), 2.0, 1e-10);
  EXPECT_NEAR(gauss_measure().z(), std::sqrt(2.0 * pi), 1e-10);
  // mu_r with r = 2 has Z = 2 Gamma(3/2) = sqrt(pi)
  EXPECT_NEAR(normalize(PotentialSpec::power(2.0)).z(), 2.0 * std::tgamma(1.5), 1e-10);
  EXPECT_NEAR(normalize(PotentialSpec::power(1.5)).z(), 2.0 * std::tgamma(1.0 + 1.0 / 1.5), 1e-10);
  EXPECT_EQ(exp_measure().median(), 0.0);
  EXPECT_EQ(normalize(PotentialSpec::sinpower(2, 1)).median(), 0.0);
}

TEST(Measure, TruncationDefect) {
  for (const Measure1D* m : {&exp_measure(), &gauss_measure()}) {
    const double X = m->truncation();
    const double inside = std::exp(m->log_raw_mass(-X, X) - m->log_z());
    EXPECT_LE(1.0 - inside, 2.0 * m->eps_trunc() + 1e-14);
  }
}

TEST(Measure, Tails) {
  EXPECT_NEAR(exp_measure().tail(0.0), 0.5, 1e-12);
  EXPECT_NEAR(exp_measure().tail(1.0), std::exp(-1.0) / 2.0, 1e-12);
  EXPECT_NEAR(gauss_measure().tail(1.0), 0.5 * std::erfc(1.0 / std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(gauss_measure().tail(-1.0), 1.0 - 0.5 * std::erfc(1.0 / std::sqrt(2.0)), 1e-12);
  // deep tail in log space
  EXPECT_NEAR(exp_measure().log_tail(800.0), -800.0 - std::log(2.0), 1e-9);
  auto deep = exp_measure().tail_checked(800.0);
  EXPECT_TRUE(deep.underflow);
  EXPECT_EQ(deep.value, 0.0);
}

TEST(Measure, TailSymmetryAndMonotonicity) {
  const Measure1D m = normalize(PotentialSpec::sinpower(2, 1));
  double prev = 1.0;
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    const double t = m.tail(x);
    EXPECT_NEAR(m.tail(-x), 1.0 - t, 1e-11);
    EXPECT_LE(t, prev + 1e-14);
    prev = t;
  }
}

TEST(Measure, MedianOfAsymmetricPotential) {
  const Measure1D m = normalize(PotentialSpec::expr("(x-1)^2/2"));
  EXPECT_NEAR(m.median(), 1.0, 1e-9);
  EXPECT_NEAR(m.tail(m.median()), 0.5, 1e-10);
  EXPECT_NEAR(m.z(), std::sqrt(2.0 * pi), 1e-9);
}

TEST(Measure, Quantiles) {
  EXPECT_EQ(gauss_measure().quantile(0.5), 0.0);
  EXPECT_NEAR(exp_measure().quantile(0.75), std::log(2.0), 1e-10);
  EXPECT_THROW(exp_measure().quantile(0.0), DomainError);
  EXPECT_THROW(exp_measure().quantile(1.0), DomainError);
  for (const Measure1D* m : {&exp_measure(), &gauss_measure()})
    for (int i = 1; i <= 99; ++i) {
      const double p = i / 100.0;
      EXPECT_NEAR(m->cdf(m->quantile(p)), p, 1e-10) << p;
    }
  // extreme probability round trip
  EXPECT_NEAR(exp_measure().quantile(1e-9), std::log(2e-9), 1e-6);
}

TEST(Measure, NProfile) {
  EXPECT_EQ(exp_measure().n_profile(0.0), 0.0);
  EXPECT_NEAR(exp_measure().n_profile(1.0), 1.0, 1e-10);
  const Measure1D nu2 = normalize(PotentialSpec::sinpower(2, 1));
  const double V20 = nu2.potential()(20.0);
  EXPECT_GE(nu2.n_profile(20.0), 0.9 * V20);
  double prev = 0.0;
  for (double t = 0.5; t < 30; t += 0.5) {
    const double n = nu2.n_profile(t);
    EXPECT_GE(n, prev - 1e-9);
    prev = n;
  }
  const Measure1D shifted = normalize(PotentialSpec::expr("(x-1)^2"));
  EXPECT_THROW(shifted.n_profile(1.0), DomainError);
}

TEST(Sampling, CounterRngIsDeterministicAndOpen) {
  CounterRng a(42), b(42), c(43);
  EXPECT_EQ(a.bits(17), b.bits(17));
  EXPECT_NE(a.bits(17), c.bits(17));
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const double u = a.uniform(i);
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Sampling, ExponentialMoments) {
  const auto xs = sample(exp_measure(), 2024, 1000000);
  double s = 0, s2 = 0;
  for (double x : xs) {
    s += x;
    s2 += x * x;
  }
  const double mean = s / xs.size();
  EXPECT_NEAR(mean, 0.0, 0.005);
  EXPECT_NEAR(s2 / xs.size() - mean * mean, 2.0, 0.02);
}

TEST(Sampling, Deterministic) {
  EXPECT_EQ(sample(gauss_measure(), 5, 1000), sample(gauss_measure(), 5, 1000));
  EXPECT_NE(sample(gauss_measure(), 5, 1000), sample(gauss_measure(), 6, 1000));
  // sub-ranges of the counter stream are reproducible on their own
  Sampler s(gauss_measure());
  CounterRng rng(5);
  const auto all = s.draw(rng, 1000);
  const auto tail = s.draw(rng, 500, 500);
  EXPECT_TRUE(std::equal(tail.begin(), tail.end(), all.begin() + 500));
}

TEST(Sampling, KolmogorovSmirnovBand) {
  auto ks = [](const Measure1D& m, std::vector<double> xs, auto cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = xs.size();
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double F = cdf(xs[i]);
      d = std::max({d, (i + 1) / n - F, F - i / n});
    }
    (void)m;
    return d;
  };
  const double band = 1.63 / std::sqrt(1e5);
  EXPECT_LE(ks(exp_measure(), sample(exp_measure(), 99, 100000),
               [](double x) { return x < 0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x); }),
            band);
  EXPECT_LE(ks(gauss_measure(), sample(gauss_measure(), 99, 100000),
               [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }),
            band);
}

TEST(Sampling, InverseMatchesQuantile) {
  Sampler s(exp_measure());
  for (double u : {1e-6, 0.01, 0.3, 0.5, 0.75, 0.999, 1 - 1e-7}) {
    const double exact = u < 0.5 ? std::log(2 * u) : -std::log(2 * (1 - u));
    EXPECT_NEAR(s.inverse(u), exact, 1e-7) << u;
  }
}
