#pragma once
// Adaptive Gauss-Kronrod quadrature with a log-space variant for integrands
// of the form exp(+-V) that leave the floating range.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hardy/error.hpp"

namespace hardy::quad {

enum class Rule { GK15, GK21 };

inline const char* rule_name(Rule r) { return r == Rule::GK15 ? "gk15" : "gk21"; }

inline Rule parse_rule(const std::string& s) {
  if (s == "gk15") return Rule::GK15;
  if (s == "gk21") return Rule::GK21;
  throw DomainError("unknown quadrature rule '" + s + "' (expected gk15 or gk21)");
}

struct QuadConfig {
  double rel_tol = 1e-11;
  double abs_tol = 1e-15;
  int max_depth = 60;
  Rule panel_rule = Rule::GK15;
  std::size_t max_panels = 400000;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw DomainError("QuadConfig: rel_tol and abs_tol must be positive");
    if (max_depth < 10) throw DomainError("QuadConfig: max_depth must be >= 10");
  }
};

struct Integral {
  double value = 0.0;
  double error_estimate = 0.0;
  int panels_used = 0;
  /// Set by integrate_log: log of the integral (-inf for an exact zero).
  std::optional<double> log_value;
  /// error_estimate / |value|, kept separately because value may overflow.
  double relative_error = 0.0;
};

// ---------------------------------------------------------------------------
// log-space helpers

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

/// log(exp(a) - exp(b)) for a >= b.
inline double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  if (b >= a) return kNegInf;
  return a + std::log1p(-std::exp(b - a));
}

inline double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

namespace detail {

struct RuleTable {
  // Kronrod abscissae in decreasing order; last entry is the centre.
  std::span<const double> xk;
  std::span<const double> wk;
  // Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, ...).
  std::span<const double> wg;
  bool gauss_has_centre;
};

inline constexpr std::array<double, 8> kXk15 = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWk15 = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg7 = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr std::array<double, 11> kXk21 = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kWk21 = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208980626405, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg10 = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

inline RuleTable table(Rule r) {
  if (r == Rule::GK15) return {kXk15, kWk15, kWg7, true};
  return {kXk21, kWk21, kWg10, false};
}

/// Raw panel estimate: integral = exp(scale) * value.
struct PanelEstimate {
  double scale = 0.0;
  double value = 0.0;
  double error = 0.0;
  double resabs = 0.0;
  // Log mode: error implied by rounding in log f itself, ~eps * |log f|.
  double noise = 0.0;
};

/// Evaluates one panel. In log mode `g` returns log f and values are
/// shifted by the panel maximum before exponentiation.
template <bool LogMode, class G>
PanelEstimate estimate_panel(G& g, double a, double b, const RuleTable& t) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const std::size_t nk = t.xk.size();
  // node order: centre, then +-x pairs
  std::array<double, 21> vals{};
  std::size_t idx = 0;
  auto eval = [&](double x) {
    double y = g(x);
    if (std::isnan(y) || (LogMode ? y == std::numeric_limits<double>::infinity()
                                  : !std::isfinite(y)))
      throw NumericalError("integrand is not finite at x = " + std::to_string(x));
    return y;
  };
  vals[idx++] = eval(centre);
  for (std::size_t j = 0; j + 1 < nk; ++j) {
    const double dx = half * t.xk[j];
    vals[idx++] = eval(centre - dx);
    vals[idx++] = eval(centre + dx);
  }

  PanelEstimate est;
  if constexpr (LogMode) {
    double m = kNegInf;
    for (std::size_t i = 0; i < idx; ++i) m = std::max(m, vals[i]);
    if (m == kNegInf) {
      est.scale = kNegInf;
      return est;
    }
    for (std::size_t i = 0; i < idx; ++i) vals[i] = std::exp(vals[i] - m);
    est.scale = m;
  }

  const double fc = vals[0];
  double resk = t.wk[nk - 1] * fc;
  double resg = t.gauss_has_centre ? t.wg[t.wg.size() - 1] * fc : 0.0;
  double resabs = std::abs(resk);
  for (std::size_t j = 0; j + 1 < nk; ++j) {
    const double f1 = vals[1 + 2 * j], f2 = vals[2 + 2 * j];
    resk += t.wk[j] * (f1 + f2);
    resabs += t.wk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) resg += t.wg[j / 2] * (f1 + f2);
  }
  const double mean = 0.5 * resk;
  double resasc = t.wk[nk - 1] * std::abs(fc - mean);
  for (std::size_t j = 0; j + 1 < nk; ++j)
    resasc += t.wk[j] * (std::abs(vals[1 + 2 * j] - mean) + std::abs(vals[2 + 2 * j] - mean));

  double err = std::abs((resk - resg) * half);
  resasc *= half;
  resabs *= half;
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * resabs, err);

  if constexpr (LogMode) {
    est.noise = 50.0 * eps * std::max(1.0, std::abs(est.scale)) * resabs;
    err = std::max(err, est.noise);
  }
  est.value = resk * half;
  est.error = err;
  est.resabs = resabs;
  return est;
}

struct Panel {
  double a, b;
  PanelEstimate est;
  int depth;
  double key() const {
    if (est.error <= 0.0 || est.scale == kNegInf) return kNegInf;
    return est.scale + std::log(est.error);
  }
};

inline std::vector<double> initial_breaks(double a, double b, double period) {
  std::vector<double> br{a};
  if (period > 0.0) {
    const double k0 = std::floor(a / period) + 1.0;
    const double k1 = std::ceil(b / period) - 1.0;
    if (k1 - k0 + 1.0 <= 4096.0) {
      for (double k = k0; k <= k1; k += 1.0) {
        const double x = k * period;
        const double gap = 1e-9 * std::max(1.0, std::abs(x));
        if (x > a + gap && x < b - gap) br.push_back(x);
      }
    }
  }
  br.push_back(b);
  return br;
}

struct AdaptiveResult {
  double log_or_value;  // log of integral (log mode) or the value (plain)
  double error;         // absolute error in log mode is relative error
  int panels;
};

template <bool LogMode, class G>
AdaptiveResult adaptive(G& g, double a, double b, const QuadConfig& cfg, double period) {
  cfg.validate();
  if (!(a < b)) throw DomainError("integrate: require a < b");
  const RuleTable tab = table(cfg.panel_rule);

  std::vector<Panel> panels;
  std::vector<char> alive;
  const auto br = initial_breaks(a, b, period);
  for (std::size_t i = 0; i + 1 < br.size(); ++i)
    panels.push_back({br[i], br[i + 1], estimate_panel<LogMode>(g, br[i], br[i + 1], tab), 0});
  alive.assign(panels.size(), 1);

  auto cmp = [&](std::size_t i, std::size_t j) { return panels[i].key() < panels[j].key(); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> heap(cmp);
  for (std::size_t i = 0; i < panels.size(); ++i) heap.push(i);

  // Totals relative to a reference log scale (always 0 in plain mode).
  double ref = 0.0, sum_val = 0.0, sum_err = 0.0, sum_abs = 0.0, sum_noise = 0.0;
  auto recompute = [&]() {
    ref = 0.0;
    if constexpr (LogMode) {
      ref = kNegInf;
      for (std::size_t i = 0; i < panels.size(); ++i)
        if (alive[i]) ref = std::max(ref, panels[i].est.scale);
    }
    sum_val = sum_err = sum_abs = sum_noise = 0.0;
    if (ref == kNegInf) return;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      if (!alive[i]) continue;
      const double w = LogMode ? std::exp(panels[i].est.scale - ref) : 1.0;
      sum_val += w * panels[i].est.value;
      sum_err += w * panels[i].est.error;
      sum_abs += w * panels[i].est.resabs;
      sum_noise += w * panels[i].est.noise;
    }
  };
  recompute();

  constexpr double eps = std::numeric_limits<double>::epsilon();
  auto converged = [&]() {
    double tol = std::max({cfg.rel_tol * std::abs(sum_val), 100.0 * eps * sum_abs, 2.0 * sum_noise});
    if constexpr (!LogMode) tol = std::max(tol, cfg.abs_tol);
    return sum_err <= tol;
  };

  std::size_t iter = 0;
  while (!converged()) {
    if (heap.empty()) break;
    const std::size_t worst = heap.top();
    heap.pop();
    Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    // a panel at floating-point resolution cannot be refined further; keep it
    if (!(mid > p.a && mid < p.b)) continue;
    if (p.depth >= cfg.max_depth || panels.size() + 2 > cfg.max_panels) {
      double err_out = p.est.error;
      if constexpr (LogMode) err_out = std::exp(p.est.scale - ref) * p.est.error / std::abs(sum_val);
      throw QuadratureError("adaptive quadrature exhausted its depth", p.a, p.b, err_out);
    }
    alive[worst] = 0;
    Panel left{p.a, mid, estimate_panel<LogMode>(g, p.a, mid, tab), p.depth + 1};
    Panel right{mid, p.b, estimate_panel<LogMode>(g, mid, p.b, tab), p.depth + 1};
    panels.push_back(left);
    alive.push_back(1);
    heap.push(panels.size() - 1);
    panels.push_back(right);
    alive.push_back(1);
    heap.push(panels.size() - 1);

    if ((++iter % 64) == 0) {
      recompute();
      continue;
    }
    if constexpr (LogMode) {
      const double new_ref = std::max({ref, left.est.scale, right.est.scale});
      if (new_ref > ref) {
        const double s = ref == kNegInf ? 0.0 : std::exp(ref - new_ref);
        sum_val *= s;
        sum_err *= s;
        sum_abs *= s;
        sum_noise *= s;
        ref = new_ref;
      }
      auto w = [&](double sc) { return sc == kNegInf ? 0.0 : std::exp(sc - ref); };
      const double wp = w(p.est.scale), wl = w(left.est.scale), wr = w(right.est.scale);
      sum_val += wl * left.est.value + wr * right.est.value - wp * p.est.value;
      sum_err += wl * left.est.error + wr * right.est.error - wp * p.est.error;
      sum_abs += wl * left.est.resabs + wr * right.est.resabs - wp * p.est.resabs;
      sum_noise += wl * left.est.noise + wr * right.est.noise - wp * p.est.noise;
      sum_err = std::max(sum_err, 0.0);
    } else {
      sum_val += left.est.value + right.est.value - p.est.value;
      sum_err += left.est.error + right.est.error - p.est.error;
      sum_abs += left.est.resabs + right.est.resabs - p.est.resabs;
      sum_err = std::max(sum_err, 0.0);
    }
  }
  recompute();

  int n_alive = 0;
  for (char c : alive) n_alive += c;
  AdaptiveResult out{};
  out.panels = n_alive;
  if constexpr (LogMode) {
    if (ref == kNegInf || sum_val <= 0.0) {
      out.log_or_value = kNegInf;
      out.error = 0.0;
    } else {
      out.log_or_value = ref + std::log(sum_val);
      out.error = sum_err / sum_val;
    }
  } else {
    out.log_or_value = sum_val;
    out.error = sum_err;
  }
  return out;
}

}  // namespace detail

/// Integrates f over [a, b]. When split_period > 0 the interval is first cut
/// at the multiples of split_period it contains.
template <class F>
Integral integrate(F&& f, double a, double b, const QuadConfig& cfg = {},
                   double split_period = 0.0) {
  auto r = detail::adaptive<false>(f, a, b, cfg, split_period);
  Integral out;
  out.value = r.log_or_value;
  out.error_estimate = r.error;
  out.panels_used = r.panels;
  out.relative_error = out.value != 0.0 ? r.error / std::abs(out.value) : 0.0;
  return out;
}

/// Integrates exp(log_f) over [a, b], accumulating in log space. log_f may
/// return -inf where the integrand vanishes.
template <class F>
Integral integrate_log(F&& log_f, double a, double b, const QuadConfig& cfg = {},
                       double split_period = 0.0) {
  auto r = detail::adaptive<true>(log_f, a, b, cfg, split_period);
  Integral out;
  out.log_value = r.log_or_value;
  out.value = std::exp(r.log_or_value);
  out.relative_error = r.error;
  out.error_estimate = r.error * out.value;
  out.panels_used = r.panels;
  return out;
}

/// Convenience: log of the integral of exp(log_f) over [a, b]; -inf if a >= b.
template <class F>
double log_integral(F&& log_f, double a, double b, const QuadConfig& cfg = {},
                    double split_period = 0.0) {
  if (!(a < b)) return kNegInf;
  return *integrate_log(log_f, a, b, cfg, split_period).log_value;
}

}  // namespace hardy::quad
