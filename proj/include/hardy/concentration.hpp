#pragma once
// Monte Carlo tail experiments on product measures mu^{(x)n}, the cost
// functions G and F_A, and the quantile transport condition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hardy/criteria.hpp"
#include "hardy/error.hpp"
#include "hardy/measure.hpp"
#include "hardy/sampling.hpp"

namespace hardy::concentration {

/// 99% two-sided normal quantile used for every confidence radius.
inline constexpr double kZ99 = 2.5758293035489004;

/// 2 exp(-min{t^2 / (C A^2), t^r / (C^{r-1} B^r)} / 2). A or B equal to 0
/// switches that branch off.
inline double two_level_bound(double C, double r, double A, double B, double t) {
  if (!(C > 0.0)) throw DomainError("two_level_bound: C must be positive");
  if (!(r > 1.0 && r < 2.0)) throw DomainError("two_level_bound: r must lie in (1,2)");
  if (A < 0.0 || B < 0.0) throw DomainError("two_level_bound: A, B must be >= 0");
  const double inf = std::numeric_limits<double>::infinity();
  const double a = A > 0.0 ? t * t / (C * A * A) : (t > 0.0 ? inf : 0.0);
  const double b = B > 0.0 ? std::pow(std::abs(t), r) / (std::pow(C, r - 1.0) * std::pow(B, r))
                           : (t > 0.0 ? inf : 0.0);
  return 2.0 * std::exp(-0.5 * std::min(a, b));
}

// ---------------------------------------------------------------------------
// reports

struct ExperimentReport {
  std::string measure;
  std::size_t n = 0;
  std::string statistic;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<double> t_grid;
  std::vector<double> empirical_tail;
  std::vector<double> radius;  // 99% confidence radius of each empirical value
  std::vector<double> bound_tail;
  std::vector<double> margins;  // bound - (empirical + radius)
  std::map<std::string, double> constants;

  bool passed() const {
    return std::all_of(margins.begin(), margins.end(), [](double m) { return m >= 0.0; });
  }
};

namespace detail {

inline void check_grid(const std::vector<double>& t) {
  if (t.empty()) throw DomainError("t grid is empty");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw DomainError("t grid must be increasing");
}

/// Fraction of |v| >= t (or > t when strict) for a sorted vector of |v|.
inline double tail_fraction(const std::vector<double>& sorted_abs, double t, bool strict) {
  const auto it = strict ? std::upper_bound(sorted_abs.begin(), sorted_abs.end(), t)
                         : std::lower_bound(sorted_abs.begin(), sorted_abs.end(), t);
  return static_cast<double>(sorted_abs.end() - it) / static_cast<double>(sorted_abs.size());
}

inline double binomial_radius(double p, std::size_t count) {
  const double nn = static_cast<double>(count);
  return kZ99 * std::sqrt(std::max(p * (1.0 - p), 1.0 / nn) / nn);
}

inline void finish(ExperimentReport& rep) {
  rep.margins.clear();
  for (std::size_t i = 0; i < rep.t_grid.size(); ++i)
    rep.margins.push_back(rep.bound_tail[i] - (rep.empirical_tail[i] + rep.radius[i]));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// deviation of Lipschitz statistics

enum class Statistic { MeanScaled, Max, SoftMax, Zero };

struct StatisticSpec {
  Statistic kind = Statistic::MeanScaled;
  double beta = 1.0;  // softmax temperature

  std::string label() const {
    switch (kind) {
      case Statistic::MeanScaled: return "mean_scaled";
      case Statistic::Max: return "max";
      case Statistic::SoftMax: return "softmax(" + std::to_string(beta) + ")";
      case Statistic::Zero: return "zero";
    }
    return "?";
  }
  static StatisticSpec parse(const std::string& s) {
    if (s == "mean_scaled") return {Statistic::MeanScaled, 1.0};
    if (s == "max") return {Statistic::Max, 1.0};
    if (s == "zero") return {Statistic::Zero, 1.0};
    if (s.rfind("softmax", 0) == 0) {
      double beta = 1.0;
      const auto open = s.find('(');
      const auto colon = s.find(':');
      if (open != std::string::npos) beta = std::stod(s.substr(open + 1));
      else if (colon != std::string::npos) beta = std::stod(s.substr(colon + 1));
      if (!(beta > 0.0)) throw DomainError("softmax temperature must be positive");
      return {Statistic::SoftMax, beta};
    }
    throw DomainError("unknown statistic '" + s + "' (mean_scaled, max, softmax:beta, zero)");
  }

  double operator()(const double* x, std::size_t n) const {
    switch (kind) {
      case Statistic::MeanScaled: {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s / std::sqrt(static_cast<double>(n));
      }
      case Statistic::Max: return *std::max_element(x, x + n);
      case Statistic::SoftMax: {
        const double mx = *std::max_element(x, x + n);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::exp(beta * (x[i] - mx));
        return mx + std::log(s) / beta;
      }
      case Statistic::Zero: return 0.0;
    }
    return 0.0;
  }

  /// Euclidean and l^{r'} Lipschitz constants.
  std::pair<double, double> lipschitz(std::size_t n, double r) const {
    switch (kind) {
      case Statistic::MeanScaled:
        return {1.0, std::pow(static_cast<double>(n), 1.0 / criteria::dual(r) - 0.5)};
      case Statistic::Max:
      case Statistic::SoftMax: return {1.0, 1.0};
      case Statistic::Zero: return {0.0, 0.0};
    }
    return {1.0, 1.0};
  }
};

/// Two-sided tails of |f - mean f| for count draws of mu^{(x)n}. Draw j uses
/// RNG counters [j n, (j + 1) n). The radius adds the binomial 99% term and
/// the tail change over one 99% standard error of the empirical mean.
inline ExperimentReport deviation_experiment(const Measure1D& m, std::size_t n,
                                             const StatisticSpec& stat,
                                             const std::vector<double>& t_grid, std::size_t count,
                                             std::uint64_t seed, double C, double r) {
  if (n < 1) throw DomainError("deviation_experiment: n must be >= 1");
  if (count < 2) throw DomainError("deviation_experiment: count must be >= 2");
  detail::check_grid(t_grid);
  Sampler sampler(m);
  CounterRng rng(seed);
  std::vector<double> vals(count), x(n);
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t i = 0; i < n; ++i) x[i] = sampler.inverse(rng.uniform(j * n + i));
    vals[j] = stat(x.data(), n);
  }
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= static_cast<double>(count - 1);
  const double shift = kZ99 * std::sqrt(var / static_cast<double>(count));
  for (double& v : vals) v = std::abs(v - mean);
  std::sort(vals.begin(), vals.end());

  const auto [A, B] = stat.lipschitz(n, r);
  ExperimentReport rep;
  rep.measure = m.label();
  rep.n = n;
  rep.statistic = stat.label();
  rep.count = count;
  rep.seed = seed;
  rep.t_grid = t_grid;
  for (double t : t_grid) {
    const double p = detail::tail_fraction(vals, t, false);
    const double p_wide = detail::tail_fraction(vals, std::max(0.0, t - shift), false);
    rep.empirical_tail.push_back(p);
    rep.radius.push_back(detail::binomial_radius(p, count) + (p_wide - p));
    rep.bound_tail.push_back(std::min(1.0, two_level_bound(C, r, A, B, t)));
  }
  rep.constants = {{"C", C}, {"r", r}, {"A", A}, {"B", B}, {"mean", mean}, {"center_shift", shift}};
  detail::finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// costs

inline double g1(double y, double r) {
  const double a = std::abs(y);
  return a <= 1.0 ? a * a : std::pow(a, r);
}

/// G(x) = sum_i min{x_i^2, |x_i|^r}.
inline double g_cost(const std::vector<double>& x, double r) {
  double s = 0.0;
  for (double v : x) s += g1(v, r);
  return s;
}

/// inf over a in A of G(x - a), A a finite point set.
inline double f_a_cost(const std::vector<double>& x, const std::vector<std::vector<double>>& A,
                       double r) {
  if (A.empty()) throw DomainError("f_a_cost: A is empty");
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> d(x.size());
  for (const auto& a : A) {
    if (a.size() != x.size()) throw DomainError("f_a_cost: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - a[i];
    best = std::min(best, g_cost(d, r));
  }
  return best;
}

/// F_A for the halfspace A = {sum a_i <= c}. With D = sum x - c > 0 this is
/// the minimum of sum g(y_i) subject to sum y_i >= D. Since g is convex on
/// [0,1] and concave beyond, minimizers have n-1 equal coordinates u and at
/// most one larger coordinate; the remaining 1D problem in u is searched on a
/// grid with golden refinement. Every candidate is feasible, so the result
/// is an upper bound (and exact up to the 1D search).
inline double f_a_halfspace(const std::vector<double>& x, double c, double r) {
  if (x.empty()) throw DomainError("f_a_halfspace: empty point");
  double s = 0.0;
  for (double v : x) s += v;
  const double D = s - c;
  if (D <= 0.0) return 0.0;
  const double n = static_cast<double>(x.size());
  if (x.size() == 1) return g1(D, r);
  const double k = n - 1.0;
  auto cost = [&](double u) { return k * g1(u, r) + g1(D - k * u, r); };
  const double umax = D / k;
  double best = std::min(cost(0.0), n * g1(D / n, r));
  const int grid = 256;
  int bi = 0;
  double bv = cost(0.0);
  for (int i = 1; i <= grid; ++i) {
    const double v = cost(umax * i / grid);
    if (v < bv) {
      bv = v;
      bi = i;
    }
  }
  double lo = umax * std::max(0, bi - 1) / grid, hi = umax * std::min(grid, bi + 1) / grid;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double p = hi - gr * (hi - lo), q = lo + gr * (hi - lo);
  double fp = cost(p), fq = cost(q);
  for (int it = 0; it < 60; ++it) {
    if (fp < fq) {
      hi = q;
      q = p;
      fq = fp;
      p = hi - gr * (hi - lo);
      fp = cost(p);
    } else {
      lo = p;
      p = q;
      fp = fq;
      q = lo + gr * (hi - lo);
      fq = cost(q);
    }
  }
  return std::min({best, bv, fp, fq});
}

/// Strict tails P(F_A > t) for A = {sum x_i <= c}, c the empirical median of
/// sum x_i, against e^{-K t} with K = min{1/C, 1/C^{r-1}} / 32.
inline ExperimentReport enlargement_experiment(const Measure1D& m, std::size_t n,
                                               const std::vector<double>& t_grid,
                                               std::size_t count, std::uint64_t seed, double C,
                                               double r) {
  if (n < 1) throw DomainError("enlargement_experiment: n must be >= 1");
  if (count < 2) throw DomainError("enlargement_experiment: count must be >= 2");
  if (!(C > 0.0)) throw DomainError("enlargement_experiment: C must be positive");
  criteria::check_r(r);
  detail::check_grid(t_grid);
  Sampler sampler(m);
  CounterRng rng(seed);
  std::vector<double> pts(count * n), sums(count);
  for (std::size_t j = 0; j < count; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += pts[j * n + i] = sampler.inverse(rng.uniform(j * n + i));
    sums[j] = s;
  }
  std::vector<double> sorted = sums;
  const std::size_t mid = count / 2;
  std::nth_element(sorted.begin(), sorted.begin() + mid, sorted.end());
  const double c = sorted[mid];
  std::vector<double> costs(count), x(n);
  for (std::size_t j = 0; j < count; ++j) {
    std::copy(pts.begin() + j * n, pts.begin() + (j + 1) * n, x.begin());
    costs[j] = f_a_halfspace(x, c, r);
  }
  std::sort(costs.begin(), costs.end());
  const double K = std::min(1.0 / C, 1.0 / std::pow(C, r - 1.0)) / 32.0;
  ExperimentReport rep;
  rep.measure = m.label();
  rep.n = n;
  rep.statistic = "F_A(halfspace)";
  rep.count = count;
  rep.seed = seed;
  rep.t_grid = t_grid;
  for (double t : t_grid) {
    const double p = detail::tail_fraction(costs, t, true);
    rep.empirical_tail.push_back(p);
    rep.radius.push_back(detail::binomial_radius(p, count));
    rep.bound_tail.push_back(std::min(1.0, std::exp(-K * t)));
  }
  rep.constants = {{"C", C}, {"r", r}, {"K", K}, {"c", c}};
  detail::finish(rep);
  return rep;
}

// ---------------------------------------------------------------------------
// gradient bounds for g = min(G, t)

struct GradCheck {
  double worst_l2 = 0.0;      // max sum |grad_i g|^2 / (4 t)
  double worst_rprime = 0.0;  // max sum |grad_i g|^{r'} / (2^{r'} t)
  std::size_t points = 0;
};

/// Points are uniform in [-box, box]^n, pulled toward 0 by a uniform factor
/// of the radius where G reaches t, so that every point has G < t.
inline GradCheck lipschitz_gradient_check(double r, double t, std::size_t count, std::uint64_t seed,
                                          double box, std::size_t n = 8) {
  criteria::check_r(r);
  if (!(t > 0.0)) throw DomainError("lipschitz_gradient_check: t must be positive");
  if (!(box > 0.0)) throw DomainError("lipschitz_gradient_check: box must be positive");
  const double rp = criteria::dual(r);
  CounterRng rng(seed);
  GradCheck out;
  std::vector<double> x(n), y(n);
  std::uint64_t ctr = 0;
  while (out.points < count) {
    for (auto& v : x) v = box * (2.0 * rng.uniform(ctr++) - 1.0);
    const double u = rng.uniform(ctr++);
    double hi = 1.0;
    auto G_at = [&](double s) {
      for (std::size_t i = 0; i < n; ++i) y[i] = s * x[i];
      return g_cost(y, r);
    };
    if (G_at(1.0) >= t) {
      double lo = 0.0;
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (G_at(mid) < t ? lo : hi) = mid;
      }
      hi = lo;
    }
    if (G_at(u * hi) >= t) continue;
    bool kink = false;
    double l2 = 0.0, lr = 0.0;
    for (double v : y) {
      const double a = std::abs(v);
      if (a == 1.0) kink = true;
      const double g = a < 1.0 ? 2.0 * a : r * std::pow(a, r - 1.0);
      l2 += g * g;
      lr += std::pow(g, rp);
    }
    if (kink) continue;
    out.worst_l2 = std::max(out.worst_l2, l2 / (4.0 * t));
    out.worst_rprime = std::max(out.worst_rprime, lr / (std::pow(2.0, rp) * t));
    ++out.points;
  }
  return out;
}

// ---------------------------------------------------------------------------
// transport quantile condition

struct TransportCheck {
  double b_alpha_inf = 0.0;
  double x = 0.0, y = 0.0;  // minimizing pair
};

inline std::vector<double> symmetric_grid(double half_width = 40.0, std::size_t points = 400) {
  if (points < 2) throw DomainError("grid needs at least two points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = -half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(points - 1);
  return g;
}

/// inf over grid pairs of (1 + |N(|x|) sgn x - N(|y|) sgn y|) / |x - y|^alpha.
inline TransportCheck transport_check(const Measure1D& m, double alpha,
                                      const std::vector<double>& grid = symmetric_grid()) {
  if (!m.is_even()) throw DomainError("transport_check requires an even measure");
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("transport_check: alpha must lie in (1,2]");
  std::vector<double> q(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    q[i] = std::copysign(m.n_profile(std::abs(grid[i])), grid[i]);
  TransportCheck out;
  out.b_alpha_inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double d = std::abs(grid[i] - grid[j]);
      if (d == 0.0) continue;
      const double v = (1.0 + std::abs(q[i] - q[j])) / std::pow(d, alpha);
      if (v < out.b_alpha_inf) {
        out.b_alpha_inf = v;
        out.x = grid[i];
        out.y = grid[j];
      }
    }
  return out;
}

}  // namespace hardy::concentration
