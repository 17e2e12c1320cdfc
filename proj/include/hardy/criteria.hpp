#pragma once
// Hardy-type criteria (Muckenhoupt, Bobkov-Goetze, Barthe-Roberto and the
// weighted variant) scanned over increasing horizons, with a boundedness
// verdict and, where available, a bracket for the associated constant.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "hardy/error.hpp"
#include "hardy/measure.hpp"
#include "hardy/quad.hpp"

namespace hardy::criteria {

enum class Kind { BP, BLS, BLO, BmLS, BW };
enum class Side { Plus, Minus, Max };
enum class Label { Bounded, Divergent, Inconclusive };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::BP: return "bp";
    case Kind::BLS: return "bls";
    case Kind::BLO: return "blo";
    case Kind::BmLS: return "bmls";
    case Kind::BW: return "bweighted";
  }
  return "?";
}
inline const char* side_name(Side s) {
  return s == Side::Plus ? "plus" : s == Side::Minus ? "minus" : "max";
}
inline const char* label_name(Label l) {
  return l == Label::Bounded ? "bounded" : l == Label::Divergent ? "divergent" : "inconclusive";
}
inline bool needs_r(Kind k) { return k == Kind::BLO || k == Kind::BmLS || k == Kind::BW; }

inline double dual(double r) { return r / (r - 1.0); }

inline void check_r(double r) {
  if (!(r > 1.0 && r < 2.0)) throw DomainError("r must lie in (1,2)");
}

struct Verdict {
  Label label = Label::Inconclusive;
  std::optional<double> growth_exponent;
  double ci_lo = 0.0, ci_hi = 0.0;  // confidence interval of the exponent
  double plateau_ratio = 1.0;
};

struct ScanOptions {
  std::vector<double> horizons = {25, 50, 100, 200, 400, 800};
  double step = std::numbers::pi / 8.0;
  Side side = Side::Max;
  double plateau_tol = 0.05;
  double slope_threshold = 0.02;
  double confidence = 0.95;
  int golden_iters = 60;

  void validate() const {
    if (horizons.size() < 2) throw DomainError("at least two horizons are required");
    for (std::size_t i = 1; i < horizons.size(); ++i)
      if (!(horizons[i] > horizons[i - 1])) throw DomainError("horizons must be increasing");
    if (!(step > 0.0)) throw DomainError("scan step must be positive");
    if (!(plateau_tol > 0.0)) throw DomainError("plateau tolerance must be positive");
    if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0,1)");
  }
};

struct CriterionResult {
  Kind kind = Kind::BP;
  double r = 0.0;  // 0 for kinds without a parameter
  Side side = Side::Max;
  std::vector<double> horizons;
  std::vector<double> log_partial_sups;
  std::vector<double> argmax;  // signed location of the running sup
  std::vector<double> log_sups_plus, log_sups_minus;
  Verdict verdict;
  std::optional<std::pair<double, double>> bracket;

  std::vector<double> partial_sups() const {
    std::vector<double> out;
    for (double l : log_partial_sups) out.push_back(std::exp(l));
    return out;
  }
  double final_sup() const { return std::exp(log_partial_sups.back()); }
};

/// Classifies a sequence of partial sups: plateau ratio between the last
/// horizon and the middle one, and a least-squares slope of log S against
/// log X over the last half of the horizons with a Student-t interval.
inline Verdict classify(const std::vector<double>& horizons, const std::vector<double>& log_sups,
                        double plateau_tol, double slope_threshold, double confidence = 0.95) {
  const std::size_t k = horizons.size();
  const std::size_t mid = (k + 1) / 2 - 1;  // 0-based index of X_{ceil(k/2)}
  Verdict v;
  v.plateau_ratio = std::exp(log_sups[k - 1] - log_sups[mid]);

  std::vector<double> xs, ys;
  for (std::size_t i = mid; i < k; ++i) {
    xs.push_back(std::log(horizons[i]));
    ys.push_back(log_sups[i]);
  }
  const double n = static_cast<double>(xs.size());
  if (xs.size() >= 3) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    double sse = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - my - slope * (xs[i] - mx);
      sse += e * e;
    }
    const double se = std::sqrt(sse / (n - 2.0) / sxx);
    boost::math::students_t dist(n - 2.0);
    const double tq = boost::math::quantile(dist, 0.5 + confidence / 2.0);
    v.growth_exponent = slope;
    v.ci_lo = slope - tq * se;
    v.ci_hi = slope + tq * se;
  } else {
    // two points: exact slope, no interval
    const double slope = (ys.back() - ys.front()) / (xs.back() - xs.front());
    v.growth_exponent = slope;
    v.ci_lo = v.ci_hi = slope;
  }
  if (v.ci_lo > slope_threshold) v.label = Label::Divergent;
  else if (v.plateau_ratio <= 1.0 + plateau_tol) v.label = Label::Bounded;
  else v.label = Label::Inconclusive;
  return v;
}

namespace detail {

/// log(log^{p}(1 + e^{l}/2)) for l = log(1/mu) >= 0, stable for large l.
inline double log_lo_factor(double l, double p) {
  const double inner = l > 30.0 ? l - std::log(2.0) + std::log1p(2.0 * std::exp(-l))
                                : std::log1p(0.5 * std::exp(l));
  return p * std::log(inner);
}

/// One side of a scan in reflected coordinates t = s x, starting at the
/// (reflected) median, or at 0 for the weighted criterion.
class SideScan {
 public:
  SideScan(const Measure1D& m, Kind kind, double r, double s, double t_max, double step)
      : m_(m), kind_(kind), r_(r), s_(s), cfg_(m.quad_config()) {
    t0_ = kind == Kind::BW ? 0.0 : s * m.median();
    const int cells = std::max(1, static_cast<int>(std::ceil((t_max - t0_) / step)));
    t_.resize(cells + 1);
    for (int j = 0; j <= cells; ++j) t_[j] = t0_ + j * step;
    t_.back() = std::max(t_.back(), t_max);
    const std::size_t n = t_.size();
    head_.assign(n, quad::kNegInf);
    tail_.assign(n, quad::kNegInf);
    for (std::size_t j = 1; j < n; ++j)
      head_[j] = quad::log_add(head_[j - 1], log_head_cell(t_[j - 1], t_[j]));
    tail_[n - 1] = hardy::detail::log_raw_tail(m.potential(), t_[n - 1], s_, cfg_);
    for (std::size_t j = n - 1; j-- > 0;)
      tail_[j] = quad::log_add(tail_[j + 1], log_tail_cell(t_[j], t_[j + 1]));
  }

  const std::vector<double>& grid() const { return t_; }

  /// log of the criterion integrand at grid node j (j >= 1).
  double at_node(std::size_t j) const { return combine(head_[j], tail_[j]); }

  /// log of the integrand at an arbitrary t in (t_{j-1}, t_{j+1}).
  double at(double t, std::size_t j) const {
    double head, tail;
    if (t >= t_[j]) {
      head = quad::log_add(head_[j], log_head_cell(t_[j], t));
      tail = quad::log_add(tail_[j + 1], log_tail_cell(t, t_[j + 1]));
    } else {
      head = quad::log_add(head_[j - 1], log_head_cell(t_[j - 1], t));
      tail = quad::log_add(tail_[j], log_tail_cell(t, t_[j]));
    }
    return combine(head, tail);
  }

  /// Golden-section maximization of the integrand on [a, b] around node j.
  std::pair<double, double> refine(std::size_t j, double b_limit, int iters) const {
    const double a = t_[std::max<std::size_t>(j, 1) - 1];
    const double b = std::min(j + 1 < t_.size() ? t_[j + 1] : t_[j], b_limit);
    std::size_t base = std::clamp<std::size_t>(j, 1, t_.size() - 2);
    auto f = [&](double t) {
      // pick the node whose neighbourhood contains t
      std::size_t k = base;
      if (t < t_[k - 1]) k = k - 1;
      if (k + 1 < t_.size() && t > t_[k + 1]) k = k + 1;
      k = std::clamp<std::size_t>(k, 1, t_.size() - 2);
      return at(t, k);
    };
    double best_t = t_[j], best = at_node(j);
    if (!(b > a) || t_.size() < 3) return {best_t, best};
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = a, hi = b;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++i) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + g * (hi - lo);
        f2 = f(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - g * (hi - lo);
        f1 = f(x1);
      }
    }
    for (auto [x, y] : {std::pair{x1, f1}, std::pair{x2, f2}})
      if (y > best) {
        best = y;
        best_t = x;
      }
    return {best_t, best};
  }

  double s() const { return s_; }

 private:
  double W(double t) const { return m_.potential()(s_ * t); }

  double log_head_integrand(double t) const {
    switch (kind_) {
      case Kind::BmLS: return (r_ - 1.0) * W(t);
      case Kind::BW: return W(t) - std::log1p(std::pow(std::abs(t), 2.0 - r_));
      default: return W(t);
    }
  }
  double log_head_cell(double a, double b) const {
    if (!(a < b)) return quad::kNegInf;
    return quad::log_integral([&](double t) { return log_head_integrand(t); }, a, b, cfg_,
                              m_.split_period());
  }
  double log_tail_cell(double a, double b) const {
    if (!(a < b)) return quad::kNegInf;
    return quad::log_integral([&](double t) { return -W(t); }, a, b, cfg_, m_.split_period());
  }

  double combine(double head, double raw_tail) const {
    const double L = std::min(raw_tail - m_.log_z(), 0.0);  // log mu([x, inf))
    const double ell = -L;
    const double lz = m_.log_z();
    switch (kind_) {
      case Kind::BP: return L + lz + head;
      case Kind::BLS: return L + std::log(ell) + lz + head;
      case Kind::BLO: return L + log_lo_factor(ell, 2.0 / dual(r_)) + lz + head;
      case Kind::BmLS: return L + std::log(ell) + lz + head / (r_ - 1.0);
      case Kind::BW: return L + std::log(ell) + lz + head;
    }
    return quad::kNegInf;
  }

  const Measure1D& m_;
  Kind kind_;
  double r_, s_;
  quad::QuadConfig cfg_;
  double t0_ = 0.0;
  std::vector<double> t_, head_, tail_;
};

struct SideResult {
  std::vector<double> log_sups;
  std::vector<double> argmax;  // in original coordinates
};

inline SideResult scan_side(const Measure1D& m, Kind kind, double r, double s,
                            const ScanOptions& o) {
  SideScan sc(m, kind, r, s, o.horizons.back(), o.step);
  const auto& t = sc.grid();
  SideResult out;
  double run = quad::kNegInf, run_at = t[0];
  for (double X : o.horizons) {
    // horizons are absolute positions; on the minus side they bound -x
    std::size_t best_j = 0;
    double best = quad::kNegInf;
    for (std::size_t i = 1; i < t.size() && t[i] <= X + 1e-12; ++i) {
      const double v = sc.at_node(i);
      if (v > best) {
        best = v;
        best_j = i;
      }
    }
    if (best_j > 0) {
      auto [tx, val] = sc.refine(best_j, X, o.golden_iters);
      if (val > run) {
        run = val;
        run_at = tx;
      }
    }
    out.log_sups.push_back(run);
    out.argmax.push_back(s * run_at);
  }
  return out;
}

}  // namespace detail

/// Generic scan of one criterion over the horizons of `o`.
inline CriterionResult scan(const Measure1D& m, Kind kind, double r, const ScanOptions& o) {
  o.validate();
  if (needs_r(kind)) check_r(r);
  if (kind == Kind::BW && !m.is_even()) throw DomainError("bweighted requires an even measure");
  CriterionResult res;
  res.kind = kind;
  res.r = needs_r(kind) ? r : 0.0;
  res.side = o.side;
  res.horizons = o.horizons;
  const bool plus = o.side != Side::Minus, minus = o.side != Side::Plus;
  detail::SideResult P, M;
  if (plus) P = detail::scan_side(m, kind, r, 1.0, o);
  if (minus) M = detail::scan_side(m, kind, r, -1.0, o);
  res.log_sups_plus = P.log_sups;
  res.log_sups_minus = M.log_sups;
  for (std::size_t i = 0; i < o.horizons.size(); ++i) {
    if (plus && (!minus || P.log_sups[i] >= M.log_sups[i])) {
      res.log_partial_sups.push_back(P.log_sups[i]);
      res.argmax.push_back(P.argmax[i]);
    } else {
      res.log_partial_sups.push_back(M.log_sups[i]);
      res.argmax.push_back(M.argmax[i]);
    }
  }
  res.verdict = classify(res.horizons, res.log_partial_sups, o.plateau_tol, o.slope_threshold,
                         o.confidence);
  return res;
}

/// Poincare criterion; bracket [S, 4S] when the scan plateaus.
inline CriterionResult bp(const Measure1D& m, const ScanOptions& o = {}) {
  auto res = scan(m, Kind::BP, 0.0, o);
  if (res.verdict.label == Label::Bounded) {
    const double S = res.final_sup();
    res.bracket = std::pair{S, 4.0 * S};
  }
  return res;
}

/// Log-Sobolev criterion; no bracket (the comparison constants are unspecified).
inline CriterionResult bls(const Measure1D& m, const ScanOptions& o = {}) {
  return scan(m, Kind::BLS, 0.0, o);
}

/// Latala-Oleszkiewicz criterion with 1/(2 mu) inside the logarithm.
inline CriterionResult blo(const Measure1D& m, double r, const ScanOptions& o = {}) {
  return scan(m, Kind::BLO, r, o);
}

/// Modified log-Sobolev criterion. When both this scan and the Poincare scan
/// plateau, the bracket is [0, 235 * 4 S_P + 2^{r'+1} S].
inline CriterionResult bmls(const Measure1D& m, double r, const ScanOptions& o = {},
                            bool with_bracket = true) {
  auto res = scan(m, Kind::BmLS, r, o);
  if (with_bracket && res.verdict.label == Label::Bounded) {
    const auto p = bp(m, o);
    if (p.bracket) {
      const double upper = 235.0 * p.bracket->second + std::pow(2.0, dual(r) + 1.0) * res.final_sup();
      res.bracket = std::pair{0.0, upper};
    }
  }
  return res;
}

/// Weighted log-Sobolev criterion with W = V - log(1 + |t|^{2-r}), from 0.
inline CriterionResult bweighted(const Measure1D& m, double r, const ScanOptions& o = {}) {
  return scan(m, Kind::BW, r, o);
}

/// Constructive mLS constant 235 C_P + 2^{r'+1} S_mLS, from the two scans.
inline double constructive_mls_constant(const Measure1D& m, double r, const ScanOptions& o = {}) {
  const auto res = bmls(m, r, o, true);
  if (!res.bracket) throw NumericalError("mLS bracket unavailable: criteria did not plateau");
  return res.bracket->second;
}

// ---------------------------------------------------------------------------
// auxiliary diagnostics

struct HypCheck {
  bool holds = false;
  double worst_ratio = 0.0;
  double worst_at = 0.0;
};

/// Checks n(x)^{-(r-1)} >= eps * int_m^x n^{-(r-1)} on the scan grid.
inline HypCheck hyp_mls_check(const Measure1D& m, double r, double eps, const ScanOptions& o = {}) {
  check_r(r);
  o.validate();
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const auto& V = m.potential();
  const auto& cfg = m.quad_config();
  HypCheck out;
  out.worst_ratio = std::numeric_limits<double>::infinity();
  for (double s : {1.0, -1.0}) {
    if (s < 0 && m.is_even()) break;
    const double t0 = s * m.median();
    const double X = o.horizons.back();
    double head = quad::kNegInf;
    for (double a = t0; a < X - 1e-12; a += o.step) {
      const double b = std::min(a + o.step, X);
      head = quad::log_add(head, quad::log_integral([&](double t) { return (r - 1.0) * V(s * t); },
                                                    a, b, cfg, V.split_period()));
      // left limit of n^{-(r-1)} at b covers downward jumps at the cell end
      const double vb = std::min(V(s * b), V(s * (b - 1e-9 * std::max(1.0, std::abs(b)))));
      const double ratio = std::exp((r - 1.0) * vb - head);
      if (ratio < out.worst_ratio) {
        out.worst_ratio = ratio;
        out.worst_at = s * b;
      }
    }
  }
  out.holds = out.worst_ratio >= eps;
  return out;
}

struct AsymptoticScan {
  std::vector<double> x, br_ratio, weighted_ratio, vpp_ratio;
  double br_tail_max = 0.0, weighted_tail_max = 0.0, vpp_tail_max = 0.0;
};

/// Pointwise ratios V/V'^{r'}, V/(|x|^{2-r} V'^2) and V''/V'^2 (V'' by
/// central differences of V').
inline AsymptoticScan asymptotic_ratios_at(const Potential& V, double r,
                                           const std::vector<double>& xs) {
  check_r(r);
  if (!V.has_derivative())
    throw DomainError("asymptotic conditions need V' but " + V.spec().label() + " has none");
  const double rp = dual(r);
  AsymptoticScan out;
  for (double x : xs) {
    const double v = V(x), d = V.derivative(x);
    const double h = 1e-4 * std::max(1.0, std::abs(x));
    const double dd = (V.derivative(x + h) - V.derivative(x - h)) / (2.0 * h);
    out.x.push_back(x);
    out.br_ratio.push_back(v / std::pow(std::abs(d), rp));
    out.weighted_ratio.push_back(v / (std::pow(std::abs(x), 2.0 - r) * d * d));
    out.vpp_ratio.push_back(dd / (d * d));
  }
  return out;
}

/// Scans the three ratios on [1, X_max] with the criteria grid step; the
/// tail summaries are maxima over [X_max / 2, X_max].
inline AsymptoticScan asymptotic_conditions(const Measure1D& m, double r,
                                            const ScanOptions& o = {}) {
  o.validate();
  const double X = o.horizons.back();
  std::vector<double> xs;
  for (double x = 1.0; x <= X + 1e-12; x += o.step) xs.push_back(x);
  auto out = asymptotic_ratios_at(m.potential(), r, xs);
  out.br_tail_max = out.weighted_tail_max = out.vpp_tail_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < X / 2.0) continue;
    out.br_tail_max = std::max(out.br_tail_max, out.br_ratio[i]);
    out.weighted_tail_max = std::max(out.weighted_tail_max, out.weighted_ratio[i]);
    out.vpp_tail_max = std::max(out.vpp_tail_max, std::abs(out.vpp_ratio[i]));
  }
  return out;
}

struct TailScaleRow {
  double x = 0.0;
  double theta = 0.0;
  bool theta_capped = false;
  double ratio_theta = 0.0;              // int_x^inf e^{-V} / (theta e^{-V(x)})
  std::optional<double> ratio_deriv;     // int_x^inf e^{-V} / (e^{-V(x)} / V'(x))
};

/// theta(x) = inf{h > 0 : V(x+h) >= V(x) + 1}, capped at 10.
inline std::pair<double, bool> tail_scale(const Potential& V, double x) {
  const double target = V(x) + 1.0;
  const double cap = 10.0, dh = 1e-3;
  double prev = 0.0;
  for (double h = dh; h <= cap + 1e-12; h += dh) {
    if (V(x + h) >= target) {
      double lo = prev, hi = h;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (V(x + mid) >= target ? hi : lo) = mid;
      }
      return {hi, false};
    }
    prev = h;
  }
  return {cap, true};
}

inline std::vector<TailScaleRow> tail_asymptotics(const Measure1D& m, const std::vector<double>& xs) {
  if (!m.is_even()) throw DomainError("tail_asymptotics requires an even measure");
  const auto& V = m.potential();
  std::vector<TailScaleRow> rows;
  for (double x : xs) {
    TailScaleRow row;
    row.x = x;
    std::tie(row.theta, row.theta_capped) = tail_scale(V, x);
    const double lt = hardy::detail::log_raw_tail(V, x, 1.0, m.quad_config());
    row.ratio_theta = std::exp(lt + V(x) - std::log(row.theta));
    if (V.has_derivative()) {
      const double d = V.derivative(x);
      if (d > 0.0) row.ratio_deriv = std::exp(lt + V(x) + std::log(d));
    }
    rows.push_back(row);
  }
  return rows;
}

/// Threshold r_0(alpha) = 3 alpha / (2 alpha + 1) for the sin-perturbed powers.
inline double r0(double alpha) { return 3.0 * alpha / (2.0 * alpha + 1.0); }

}  // namespace hardy::criteria
