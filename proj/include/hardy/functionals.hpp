#pragma once
// Young-type transforms (H, H*, F_r, Phi) and quadrature evaluators for both
// sides of the Poincare, log-Sobolev, LO, mLS, weighted, F_r-Sobolev and
// I(tau) inequalities on a one-dimensional measure.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/expression.hpp"
#include "hardy/measure.hpp"
#include "hardy/quad.hpp"

namespace hardy::functionals {

// ---------------------------------------------------------------------------
// closed forms

/// H_{r'}(t) = max{t^2, |t|^{r'}}.
inline double h(double r_prime, double t) {
  if (!(r_prime >= 2.0)) throw DomainError("h: r' must be >= 2");
  return std::max(t * t, std::pow(std::abs(t), r_prime));
}

/// Legendre transform of H_{r'}.
inline double h_star(double r_prime, double t) {
  if (!(r_prime > 2.0)) throw DomainError("h_star: r' must be > 2");
  const double a = std::abs(t);
  const double r = r_prime / (r_prime - 1.0);
  if (a <= 2.0) return 0.25 * t * t;
  if (a <= r_prime) return a - 1.0;
  return std::pow(a / r_prime, r) / (r - 1.0);
}

/// max over a uniform s-grid of t s - g(s).
template <class G>
double legendre_numeric(G&& g, double t, double s_lo, double s_hi, std::size_t steps) {
  if (!(s_lo < s_hi) || steps < 2) throw DomainError("legendre_numeric: bad s-grid");
  double best = -std::numeric_limits<double>::infinity();
  const double ds = (s_hi - s_lo) / static_cast<double>(steps - 1);
  for (std::size_t i = 0; i < steps; ++i) {
    const double s = s_lo + ds * static_cast<double>(i);
    best = std::max(best, t * s - g(s));
  }
  return best;
}

/// F_r(t) = log^{2/r'}(1+t) - log^{2/r'}(2).
inline double f_r(double r, double t) {
  if (!(r > 1.0 && r < 2.0)) throw DomainError("f_r: r must lie in (1,2)");
  if (!(t >= 0.0)) throw DomainError("f_r: t must be >= 0");
  const double p = 2.0 * (r - 1.0) / r;
  return std::pow(std::log1p(t), p) - std::pow(std::log(2.0), p);
}

/// Phi(x) = x^2 log^{1-2/r'}(e + x^2).
inline double phi(double r, double x) {
  if (!(r > 1.0 && r < 2.0)) throw DomainError("phi: r must lie in (1,2)");
  const double p = 1.0 - 2.0 * (r - 1.0) / r;
  const double x2 = x * x;
  return x2 * std::pow(std::log(std::numbers::e + x2), p);
}

// ---------------------------------------------------------------------------
// test functions

struct TestFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  bool positive = false;
  std::string label;

  double operator()(double x) const { return value(x); }

  static TestFunction from_expression(const std::string& src, bool positive = false) {
    auto e = std::make_shared<const expr::Expression>(src);
    return {[e](double x) { return (*e)(x); }, [e](double x) { return e->derivative(x); },
            positive, src};
  }
  static TestFunction constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, c > 0.0,
            "const:" + std::to_string(c)};
  }
  static TestFunction linear() {
    return {[](double x) { return x; }, [](double) { return 1.0; }, false, "x"};
  }
  TestFunction scaled(double c) const {
    return {[f = value, c](double x) { return c * f(x); },
            [d = derivative, c](double x) { return c * d(x); }, positive && c > 0.0,
            std::to_string(c) + "*(" + label + ")"};
  }
};

// ---------------------------------------------------------------------------
// expectations

namespace detail {

/// Integral of g e^{-V} over the line: [-T, T] split at 0 and the median,
/// extended outward by doubling chunks until they stop contributing.
template <class G>
double raw_integral(const Measure1D& m, G&& g) {
  const auto& V = m.potential();
  const auto& cfg = m.quad_config();
  const double shift = V(m.median());  // keeps e^{-V} in range
  auto f = [&](double x) {
    const double d = std::exp(shift - V(x));
    return d == 0.0 ? 0.0 : g(x) * d;
  };
  const double T = std::max(m.truncation(), std::abs(m.median()) + 1.0);
  std::vector<double> br = {-T, std::min(0.0, m.median()), std::max(0.0, m.median()), T};
  br.erase(std::unique(br.begin(), br.end()), br.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i)
    total += quad::integrate(f, br[i], br[i + 1], cfg, V.split_period()).value;
  for (double s : {1.0, -1.0}) {
    double a = T, w = 1.0;
    for (int k = 0;; ++k) {
      if (a > kSearchLimit)
        throw NumericalError("expectation does not converge: integrand persists beyond |x| = 1e6");
      const double lo = s > 0 ? a : -(a + w), hi = s > 0 ? a + w : -a;
      const double c = quad::integrate(f, lo, hi, cfg, V.split_period()).value;
      total += c;
      a += w;
      w *= 2.0;
      if (k >= 2 && std::abs(c) <= 1e-17 * std::abs(total)) break;
      if (k >= 2 && c == 0.0) break;
    }
  }
  return total * std::exp(-shift);
}

}  // namespace detail

/// E_mu[g], normalized by the mass computed with the same rule so that
/// constants come out exact up to rounding.
template <class G>
double expectation(const Measure1D& m, G&& g) {
  const double mass = detail::raw_integral(m, [](double) { return 1.0; });
  return detail::raw_integral(m, g) / mass;
}

inline double variance(const Measure1D& m, const TestFunction& f) {
  const double mean = expectation(m, f.value);
  return expectation(m, [&](double x) {
    const double d = f(x) - mean;
    return d * d;
  });
}

/// Ent_mu(f^2) = int f^2 log(f^2 / int f^2) dmu.
inline double entropy_sq(const Measure1D& m, const TestFunction& f) {
  const double s = expectation(m, [&](double x) { return f(x) * f(x); });
  if (s == 0.0) return 0.0;
  return expectation(m, [&](double x) {
    const double t = f(x) * f(x);
    if (t == 0.0) return 0.0;
    return t * std::log(std::max(t, 1e-300) / s);
  });
}

/// L with int Phi(f / L) dmu = 1, by bisection on L.
inline double luxemburg(const Measure1D& m, const TestFunction& f, double r) {
  const double l2 = std::sqrt(expectation(m, [&](double x) { return f(x) * f(x); }));
  if (l2 == 0.0) return 0.0;
  auto excess = [&](double L) {
    return expectation(m, [&](double x) { return phi(r, f(x) / L); }) - 1.0;
  };
  // Phi(x) >= x^2 gives int Phi(f / l2) >= 1, so L >= l2
  double lo = l2, hi = 2.0 * l2;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6 * l2) throw NumericalError("luxemburg: no bracket up to 1e6 * ||f||_2");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// sup over theta in (1,2) of [int f^2 - (int |f|^theta)^{2/theta}] / (2-theta)^{2(1-1/r)}.
/// Evaluated on theta = 2 - 2^{-j} and theta = 1 + 2^{-j}, j = 1..40, then a
/// parabolic step at the best node. Numerators below 1e-10 int f^2 are
/// treated as quadrature noise.
inline double lo_lhs(const Measure1D& m, const TestFunction& f, double r) {
  if (!(r > 1.0 && r < 2.0)) throw DomainError("lo_lhs: r must lie in (1,2)");
  const double s2 = expectation(m, [&](double x) { return f(x) * f(x); });
  if (s2 == 0.0) return 0.0;
  const double expo = 2.0 * (1.0 - 1.0 / r);
  auto ratio = [&](double theta) {
    const double mt = expectation(m, [&](double x) { return std::pow(std::abs(f(x)), theta); });
    const double num = s2 - std::pow(mt, 2.0 / theta);
    if (num <= 1e-10 * s2) return 0.0;
    return num / std::pow(2.0 - theta, expo);
  };
  std::vector<double> thetas;
  for (int j = 40; j >= 1; --j) thetas.push_back(1.0 + std::ldexp(1.0, -j));
  for (int j = 2; j <= 40; ++j) thetas.push_back(2.0 - std::ldexp(1.0, -j));
  std::vector<double> vals;
  for (double t : thetas) vals.push_back(ratio(t));
  const std::size_t k = static_cast<std::size_t>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  double best = vals[k];
  if (k > 0 && k + 1 < thetas.size()) {
    const double a = thetas[k - 1], b = thetas[k], c = thetas[k + 1];
    const double fa = vals[k - 1], fb = vals[k], fc = vals[k + 1];
    const double num = (b - a) * (b - a) * (fb - fc) - (b - c) * (b - c) * (fb - fa);
    const double den = (b - a) * (fb - fc) - (b - c) * (fb - fa);
    if (den != 0.0) {
      const double t = b - 0.5 * num / den;
      if (t > a && t < c) best = std::max(best, ratio(t));
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// energies

enum class EnergyKind { Dirichlet, MLS, Weighted, ITau, FrSob, DefectiveFrSob };

inline const char* energy_name(EnergyKind k) {
  switch (k) {
    case EnergyKind::Dirichlet: return "dirichlet";
    case EnergyKind::MLS: return "mls";
    case EnergyKind::Weighted: return "weighted";
    case EnergyKind::ITau: return "itau";
    case EnergyKind::FrSob: return "frsob";
    case EnergyKind::DefectiveFrSob: return "defective-frsob";
  }
  return "?";
}

/// Energy functional of the given kind; `param` is r (mls, weighted, frsob
/// kinds) or tau (itau). The F_r-Sobolev kinds return the left-hand side.
inline double energy(const Measure1D& m, const TestFunction& f, EnergyKind kind, double param = 0.0) {
  switch (kind) {
    case EnergyKind::Dirichlet:
      return expectation(m, [&](double x) {
        const double d = f.derivative(x);
        return d * d;
      });
    case EnergyKind::MLS: {
      if (!(param > 1.0 && param < 2.0)) throw DomainError("mls energy: r must lie in (1,2)");
      if (!f.positive) throw DomainError("mls energy requires a test function flagged positive");
      const double rp = param / (param - 1.0);
      return expectation(m, [&](double x) {
        const double v = f(x);
        if (!(v > 0.0))
          throw DomainError("mls energy: test function is not positive at x = " + std::to_string(x));
        return h(rp, f.derivative(x) / v) * v * v;
      });
    }
    case EnergyKind::Weighted: {
      if (!(param > 1.0 && param < 2.0)) throw DomainError("weighted energy: r must lie in (1,2)");
      return expectation(m, [&](double x) {
        const double d = f.derivative(x);
        return d * d * (1.0 + std::pow(std::abs(x), 2.0 - param));
      });
    }
    case EnergyKind::ITau: {
      if (!(param > 0.0 && param < 1.0)) throw DomainError("itau energy: tau must lie in (0,1)");
      const double s = expectation(m, [&](double x) { return f(x) * f(x); });
      return expectation(m, [&](double x) {
        const double d = f.derivative(x);
        const double q = s > 0.0 ? f(x) * f(x) / s : 0.0;
        return d * d * std::pow(std::log(std::numbers::e + q), 1.0 - param);
      });
    }
    case EnergyKind::FrSob:
    case EnergyKind::DefectiveFrSob: {
      const double s = expectation(m, [&](double x) { return f(x) * f(x); });
      if (s == 0.0) return 0.0;
      return expectation(m, [&](double x) {
        const double g2 = f(x) * f(x);
        return g2 * f_r(param, g2 / s);
      });
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// reports

enum class Inequality { Poincare, LogSobolev, MLS, LO, FSob, DefectiveFSob, Weighted, ITau };

inline const char* inequality_name(Inequality k) {
  switch (k) {
    case Inequality::Poincare: return "poincare";
    case Inequality::LogSobolev: return "log-sobolev";
    case Inequality::MLS: return "mls";
    case Inequality::LO: return "lo";
    case Inequality::FSob: return "frsob";
    case Inequality::DefectiveFSob: return "defective-frsob";
    case Inequality::Weighted: return "weighted";
    case Inequality::ITau: return "itau";
  }
  return "?";
}

struct InequalityReport {
  Inequality kind = Inequality::Poincare;
  double param = 0.0;  // r, or tau for I(tau)
  double lhs = 0.0;
  double rhs_energy = 0.0;
  double ratio = 0.0;
  std::vector<std::pair<std::string, double>> components;
};

/// Pairs the left-hand side of an inequality with its energy. The ratio is
/// a lower bound on the best constant; 0 when the left-hand side vanishes.
inline InequalityReport ratio_report(const Measure1D& m, const TestFunction& f, Inequality kind,
                                     double param = 0.0) {
  InequalityReport rep;
  rep.kind = kind;
  rep.param = param;
  switch (kind) {
    case Inequality::Poincare:
      rep.lhs = variance(m, f);
      rep.rhs_energy = energy(m, f, EnergyKind::Dirichlet);
      break;
    case Inequality::LogSobolev:
      rep.lhs = entropy_sq(m, f);
      rep.rhs_energy = energy(m, f, EnergyKind::Dirichlet);
      break;
    case Inequality::MLS:
      rep.lhs = entropy_sq(m, f);
      rep.rhs_energy = energy(m, f, EnergyKind::MLS, param);
      break;
    case Inequality::LO:
      rep.lhs = lo_lhs(m, f, param);
      rep.rhs_energy = energy(m, f, EnergyKind::Dirichlet);
      break;
    case Inequality::FSob:
      rep.lhs = energy(m, f, EnergyKind::FrSob, param);
      rep.rhs_energy = energy(m, f, EnergyKind::Dirichlet);
      break;
    case Inequality::DefectiveFSob:
      rep.lhs = energy(m, f, EnergyKind::DefectiveFrSob, param);
      rep.rhs_energy = energy(m, f, EnergyKind::Dirichlet);
      rep.components = {{"l2_mass", expectation(m, [&](double x) { return f(x) * f(x); })},
                        {"dirichlet", rep.rhs_energy}};
      break;
    case Inequality::Weighted:
      rep.lhs = entropy_sq(m, f);
      rep.rhs_energy = energy(m, f, EnergyKind::Weighted, param);
      break;
    case Inequality::ITau:
      rep.lhs = entropy_sq(m, f);
      rep.rhs_energy = energy(m, f, EnergyKind::ITau, param);
      rep.components = {{"l2_mass", expectation(m, [&](double x) { return f(x) * f(x); })},
                        {"itau_energy", rep.rhs_energy}};
      break;
  }
  const double scale = std::max(1.0, std::abs(rep.rhs_energy));
  if (std::abs(rep.lhs) <= 1e-12 * scale) rep.ratio = 0.0;
  else if (rep.rhs_energy > 0.0) rep.ratio = std::max(0.0, rep.lhs / rep.rhs_energy);
  else rep.ratio = std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace hardy::functionals
