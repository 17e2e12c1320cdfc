#pragma once
// End-to-end acceptance scenarios. Each returns its checks, a one-line
// summary and a report; tolerances are pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "hardy/concentration.hpp"
#include "hardy/criteria.hpp"
#include "hardy/functionals.hpp"
#include "hardy/measure.hpp"
#include "hardy/report.hpp"
#include "hardy/spectral.hpp"

namespace hardy::scenarios {

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct Outcome {
  int id = 0;
  std::string name;
  std::vector<Check> checks;
  report::Report report;
  double seconds = 0.0;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return !checks.empty();
  }
  std::string summary() const {
    std::string s;
    for (const auto& c : checks) {
      if (!s.empty()) s += "; ";
      s += (c.ok ? "" : "FAILED ") + c.name + " " + c.detail;
    }
    return s;
  }
};

namespace detail {

inline std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}
inline std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}
inline std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

inline void check(Outcome& o, std::string name, bool ok, std::string detail) {
  o.checks.push_back({std::move(name), ok, std::move(detail)});
}

inline std::vector<double> legendre_t_grid() {
  std::vector<double> ts;
  for (int i = 0; i <= 400; ++i) ts.push_back(-20.0 + 0.1 * i);
  return ts;
}

inline const std::vector<double> kRPrimes = {3.0, 13.0 / 3.0, 6.0};

}  // namespace detail

// 1 ------------------------------------------------------------------------
inline Outcome legendre_closed_form() {
  constexpr double kTol = 1e-4, kBranchTol = 1e-12;
  constexpr double kSLo = -4.0, kSHi = 4.0;  // maximizers lie in |s| <= 2.6 for |t| <= 20
  constexpr std::size_t kSteps = 400001;      // step 2e-5, s = +-1 on the grid
  Outcome o{1, "legendre-closed-form", {}, {}, 0.0};
  double worst = 0.0, worst_branch = 0.0;
  for (double rp : detail::kRPrimes) {
    const double r = rp / (rp - 1.0);
    auto H = [rp](double s) { return functionals::h(rp, s); };
    std::vector<double> diffs;
    for (double t : detail::legendre_t_grid()) {
      const double d = std::abs(functionals::h_star(rp, t) -
                                functionals::legendre_numeric(H, t, kSLo, kSHi, kSteps));
      worst = std::max(worst, d);
      diffs.push_back(d);
    }
    o.report.add("max_abs_diff.rprime=" + std::to_string(rp), *std::max_element(diffs.begin(), diffs.end()));
    // branch formulas evaluated at their common breakpoints
    const double at2_quad = 0.25 * 4.0, at2_lin = 2.0 - 1.0;
    const double atr_lin = rp - 1.0, atr_pow = std::pow(rp / rp, r) / (r - 1.0);
    worst_branch = std::max({worst_branch, std::abs(at2_quad - at2_lin), std::abs(atr_lin - atr_pow)});
    for (double b : {2.0, rp}) {
      const double jump = std::abs(functionals::h_star(rp, std::nextafter(b, 0.0)) -
                                   functionals::h_star(rp, std::nextafter(b, 100.0)));
      worst_branch = std::max(worst_branch, jump);
    }
  }
  detail::check(o, "h*=legendre", worst <= kTol, detail::fmt("max|diff| %.2e <= 1e-4", worst));
  detail::check(o, "branch continuity", worst_branch <= kBranchTol,
                detail::fmt("max jump %.2e <= 1e-12", worst_branch));
  o.report.add("max_abs_diff", worst);
  o.report.add("max_branch_jump", worst_branch);
  return o;
}

// 2 ------------------------------------------------------------------------
inline Outcome legendre_lower_bound() {
  constexpr double kSlack = 1e-12;
  Outcome o{2, "legendre-lower-bound", {}, {}, 0.0};
  double worst = std::numeric_limits<double>::infinity();
  for (double rp : detail::kRPrimes) {
    const double r = rp / (rp - 1.0);
    for (double t : detail::legendre_t_grid()) {
      const double lb = 0.25 * std::min(t * t, std::pow(std::abs(t), r));
      worst = std::min(worst, functionals::h_star(rp, t) - lb);
    }
  }
  detail::check(o, "h* >= min{t^2,|t|^r}/4", worst >= -kSlack,
                detail::fmt("min(h* - bound) %.3e >= -1e-12", worst));
  o.report.add("min_gap", worst);
  return o;
}

// 3 ------------------------------------------------------------------------
inline Outcome poincare_bracket() {
  constexpr double kRayleighSlack = 0.01;  // discretization of 1/gap
  constexpr double kExpGapTol = 0.05, kExpSbpTol = 0.01, kGaussGapTol = 0.02;
  Outcome o{3, "poincare-bracket", {}, {}, 0.0};
  using functionals::TestFunction;
  struct Item {
    PotentialSpec spec;
    double X;
    std::size_t N;
  };
  const std::vector<Item> corpus = {{PotentialSpec::exp(), 100.0, 16000},
                                    {PotentialSpec::gauss(), 8.0, 4000},
                                    {PotentialSpec::power(1.5), 0.0, 4000},
                                    {PotentialSpec::sinpower(2, 1), 0.0, 4000}};
  std::vector<TestFunction> fs = {TestFunction::from_expression("x"),
                                  TestFunction::from_expression("sin(x)"),
                                  TestFunction::from_expression("x^3")};
  // sign(x)(e^{|x|/2} - 1), capped at |x| = 100 so that it stays in L^2 of e^{-|x|}
  TestFunction capped{
      [](double x) { return std::copysign(std::expm1(std::min(std::abs(x), 100.0) / 2.0), x); },
      [](double x) { return std::abs(x) < 100.0 ? 0.5 * std::exp(std::abs(x) / 2.0) : 0.0; }, false,
      "capped-exp"};
  for (const auto& it : corpus) {
    const auto m = normalize(it.spec);
    const double X = it.X > 0.0 ? it.X : m.truncation();
    const double inv_gap = 1.0 / spectral::spectral_gap(spectral::discretize(m, X, it.N));
    const double sbp = criteria::bp(m).final_sup();
    double best = 0.0;
    for (const auto& f : fs) best = std::max(best, spectral::rayleigh(m, f));
    if (it.spec.family == Family::Exp) best = std::max(best, spectral::rayleigh(m, capped));
    const std::string L = it.spec.label();
    detail::check(o, L + " triangle", best <= inv_gap * (1.0 + kRayleighSlack) && inv_gap <= 4.0 * sbp,
                  detail::fmt("%.4f <= %.4f <= %.4f", best, inv_gap, 4.0 * sbp));
    if (it.spec.family == Family::Exp) {
      detail::check(o, "exp 1/gap", std::abs(inv_gap - 4.0) <= kExpGapTol,
                    detail::fmt("%.4f = 4 +- 0.05", inv_gap));
      detail::check(o, "exp S_BP", std::abs(sbp - 1.0) <= kExpSbpTol,
                    detail::fmt("%.5f = 1 +- 0.01", sbp));
    }
    if (it.spec.family == Family::Gauss)
      detail::check(o, "gauss 1/gap", std::abs(inv_gap - 1.0) <= kGaussGapTol,
                    detail::fmt("%.4f = 1 +- 0.02", inv_gap));
    o.report.add(L + ".rayleigh_best", best);
    o.report.add(L + ".inv_gap", inv_gap);
    o.report.add(L + ".four_S_BP", 4.0 * sbp);
  }
  return o;
}

// 4 ------------------------------------------------------------------------
inline Outcome threshold_alpha2() {
  constexpr double kExponentRelTol = 0.5;
  Outcome o{4, "threshold-alpha2", {}, {}, 0.0};
  const double alpha = 2.0;
  const auto m = normalize(PotentialSpec::sinpower(alpha, 1));
  const auto lo = criteria::blo(m, 1.15), hi = criteria::blo(m, 1.3);
  const auto mlo = criteria::bmls(m, 1.15), mhi = criteria::bmls(m, 1.3);
  const double target = 2.0 * (alpha / criteria::dual(1.3) - (alpha - 1.0) / 3.0);
  const double got = hi.verdict.growth_exponent.value_or(std::nan(""));
  using criteria::Label;
  detail::check(o, "blo(1.15) bounded", lo.verdict.label == Label::Bounded,
                criteria::label_name(lo.verdict.label));
  detail::check(o, "blo(1.3) divergent", hi.verdict.label == Label::Divergent,
                criteria::label_name(hi.verdict.label));
  detail::check(o, "exponent", std::abs(got - target) <= kExponentRelTol * target,
                detail::fmt("%.4f vs %.4f +-50%%", got, target));
  detail::check(o, "bmls agrees",
                mlo.verdict.label == lo.verdict.label && mhi.verdict.label == hi.verdict.label,
                std::string(criteria::label_name(mlo.verdict.label)) + "/" +
                    criteria::label_name(mhi.verdict.label));
  report::add_criterion(o.report, hi);
  o.report.add("target_exponent", target);
  o.report.add("r0", criteria::r0(alpha));
  return o;
}

// 5 ------------------------------------------------------------------------
inline Outcome counterexample() {
  constexpr double kBrTailMax = 0.05, kWeightedGrowth = 10.0;
  Outcome o{5, "counterexample", {}, {}, 0.0};
  const double r = 1.5, beta = 1.9, pi = std::numbers::pi;
  const auto m = normalize(PotentialSpec::cattiaux(r, beta));
  const auto asym = criteria::asymptotic_conditions(m, r);
  std::vector<double> xs;
  for (int k = 10; k <= 40; ++k) xs.push_back(k * pi - pi / 4.0);
  const auto w = criteria::asymptotic_ratios_at(m.potential(), r, xs).weighted_ratio;
  bool monotone = true;
  for (std::size_t i = 1; i < w.size(); ++i) monotone = monotone && w[i] > w[i - 1];
  const double growth = w.back() / w.front();
  const auto bw = criteria::bweighted(m, r);
  const auto bm = criteria::bmls(m, r);
  using criteria::Label;
  detail::check(o, "br_ratio tail", asym.br_tail_max <= kBrTailMax,
                detail::fmt("max %.4f <= 0.05", asym.br_tail_max));
  detail::check(o, "weighted_ratio", monotone && growth >= kWeightedGrowth,
                detail::fmt("monotone=%g growth x%.3f (need >= 10)", monotone ? 1.0 : 0.0, growth));
  detail::check(o, "bweighted divergent", bw.verdict.label == Label::Divergent,
                criteria::label_name(bw.verdict.label));
  detail::check(o, "bmls bounded", bm.verdict.label == Label::Bounded,
                criteria::label_name(bm.verdict.label));
  o.report.add("x", report::nums(xs));
  o.report.add("weighted_ratio", report::nums(w));
  o.report.add("br_tail_max", asym.br_tail_max);
  report::add_criterion(o.report, bw);
  report::add_criterion(o.report, bm);
  return o;
}

// 6 ------------------------------------------------------------------------
inline Outcome poincare_failure() {
  constexpr double kGrowth = 10.0;
  Outcome o{6, "poincare-failure", {}, {}, 0.0};
  const double pi = std::numbers::pi;
  const auto m = normalize(PotentialSpec::sinpower(2, 2));
  criteria::ScanOptions opt;
  opt.horizons.clear();
  for (int k = 3; k <= 10; ++k) opt.horizons.push_back((2 * k + 1) * pi);
  const auto b = criteria::bp(m, opt);
  const double ratio = std::exp(b.log_partial_sups.back() - b.log_partial_sups.front());
  detail::check(o, "S(x10)/S(x3)", ratio >= kGrowth, detail::fmt("%.3e >= 10", ratio));
  detail::check(o, "bp divergent", b.verdict.label == criteria::Label::Divergent,
                criteria::label_name(b.verdict.label));
  std::vector<double> gaps;
  bool decreasing = true;
  for (double X : {20.0, 40.0, 80.0}) {
    gaps.push_back(spectral::spectral_gap(spectral::discretize(m, X, static_cast<std::size_t>(200 * X))));
    if (gaps.size() > 1) decreasing = decreasing && gaps.back() < gaps[gaps.size() - 2];
  }
  detail::check(o, "gap decreasing", decreasing,
                detail::fmt("%.3e > %.3e > %.3e", gaps[0], gaps[1], gaps[2]));
  report::add_criterion(o.report, b);
  o.report.add("gaps_X20_40_80", report::nums(gaps));
  return o;
}

// 7 ------------------------------------------------------------------------
inline Outcome floor_split() {
  Outcome o{7, "floor-split", {}, {}, 0.0};
  const auto m = normalize(PotentialSpec::floor());
  const auto b = criteria::bp(m);
  detail::check(o, "bp bounded", b.verdict.label == criteria::Label::Bounded,
                criteria::label_name(b.verdict.label));
  report::add_criterion(o.report, b);
  for (double r : {1.2, 1.5, 1.8}) {
    const auto l = criteria::blo(m, r);
    detail::check(o, detail::fmt("blo(%.1f) divergent", r), l.verdict.label == criteria::Label::Divergent,
                  detail::fmt("exponent %.3f", l.verdict.growth_exponent.value_or(std::nan(""))));
    report::add_criterion(o.report, l);
  }
  return o;
}

// 8 ------------------------------------------------------------------------
inline Outcome concentration_mc(std::uint64_t seed = 20240601) {
  Outcome o{8, "concentration-mc", {}, {}, 0.0};
  const double r = 1.5;
  const auto m = normalize(PotentialSpec::power(r));
  const double C = criteria::constructive_mls_constant(m, r);
  const auto dev = concentration::deviation_experiment(
      m, 64, concentration::StatisticSpec::parse("mean_scaled"), {1.0, 2.0, 3.0}, 1000000, seed, C, r);
  const auto enl = concentration::enlargement_experiment(m, 16, {2.0, 4.0, 8.0}, 200000, seed + 1, C, r);
  auto min_margin = [](const concentration::ExperimentReport& e) {
    return *std::min_element(e.margins.begin(), e.margins.end());
  };
  detail::check(o, "deviation", dev.passed(),
                detail::fmt("C=%.2f min margin %.4f", C, min_margin(dev)));
  detail::check(o, "enlargement", enl.passed(), detail::fmt("min margin %.4f", min_margin(enl)));
  o.report.add("C", C);
  o.report.add("deviation.empirical_tail", report::nums(dev.empirical_tail));
  o.report.add("deviation.bound_tail", report::nums(dev.bound_tail));
  o.report.add("deviation.margins", report::nums(dev.margins));
  o.report.add("enlargement.empirical_tail", report::nums(enl.empirical_tail));
  o.report.add("enlargement.bound_tail", report::nums(enl.bound_tail));
  o.report.add("enlargement.margins", report::nums(enl.margins));
  return o;
}

// 9 ------------------------------------------------------------------------
inline Outcome gradient_bounds(std::uint64_t seed = 7) {
  constexpr double kTol = 1e-9;
  Outcome o{9, "gradient-bounds", {}, {}, 0.0};
  double worst = 0.0;
  for (double r : {1.2, 1.5, 1.8})
    for (double t : {0.5, 2.0, 10.0}) {
      const auto g = concentration::lipschitz_gradient_check(r, t, 100000, seed, 3.0, 8);
      worst = std::max({worst, g.worst_l2, g.worst_rprime});
      o.report.add(detail::fmt("r=%.1f,t=%g", r, t),
                   report::json::array({report::num(g.worst_l2), report::num(g.worst_rprime)}));
    }
  detail::check(o, "ratios", worst <= 1.0 + kTol, detail::fmt("worst %.6f <= 1 + 1e-9", worst));
  return o;
}

// 10 -----------------------------------------------------------------------
inline Outcome transport() {
  constexpr double kLo = 0.9, kHi = 1.5;
  Outcome o{10, "transport", {}, {}, 0.0};
  const auto m = normalize(PotentialSpec::sinpower(1.5, 1));
  const auto tc = concentration::transport_check(m, 1.5);
  detail::check(o, "b_alpha_inf > 0", tc.b_alpha_inf > 0.0,
                detail::fmt("%.4f at (%.2f, %.2f)", tc.b_alpha_inf, tc.x, tc.y));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double t = 10.0; t <= 40.0 + 1e-9; t += 0.25) {
    const double q = m.n_profile(t) / m.potential()(t);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  detail::check(o, "N/V in [0.9,1.5]", lo >= kLo && hi <= kHi, detail::fmt("[%.4f, %.4f]", lo, hi));
  o.report.results.push_back({"b_alpha_inf", report::num(tc.b_alpha_inf), {}, {}, tc.x});
  o.report.add("N_over_V_range", report::json::array({report::num(lo), report::num(hi)}));
  return o;
}

// 11 -----------------------------------------------------------------------
inline Outcome criteria_ordering() {
  constexpr double kLogSlack = 1e-9, kLoRelTol = 0.05;
  Outcome o{11, "criteria-ordering", {}, {}, 0.0};
  double worst = -std::numeric_limits<double>::infinity();
  for (auto s : {PotentialSpec::exp(), PotentialSpec::gauss(), PotentialSpec::power(1.5),
                 PotentialSpec::sinpower(2, 1)}) {
    const auto m = normalize(s);
    const auto p = criteria::bp(m);
    for (double r : {1.2, 1.5, 1.8}) {
      const auto l = criteria::blo(m, r);
      const double c = std::log(std::pow(std::log(2.0), 2.0 / criteria::dual(r)));
      for (std::size_t i = 0; i < p.horizons.size(); ++i)
        worst = std::max(worst, p.log_partial_sups[i] - (l.log_partial_sups[i] - c));
    }
  }
  detail::check(o, "S_BP <= S_BLO/log^{2/r'}2", worst <= kLogSlack,
                detail::fmt("max log excess %.3e <= 1e-9", worst));
  const auto e = normalize(PotentialSpec::exp());
  const auto f = functionals::TestFunction::linear();
  const double lo = functionals::lo_lhs(e, f, 1.01), var = functionals::variance(e, f);
  detail::check(o, "lo_lhs(1.01) ~ Var", std::abs(lo - var) <= kLoRelTol * var,
                detail::fmt("%.4f vs %.4f +-5%%", lo, var));
  o.report.add("max_log_excess", worst);
  o.report.add("lo_lhs_r1.01", lo);
  o.report.add("variance", var);
  return o;
}

// 12 -----------------------------------------------------------------------
inline Outcome luxemburg_machinery() {
  constexpr double kHomTol = 1e-8, kResTol = 1e-8;
  Outcome o{12, "luxemburg", {}, {}, 0.0};
  using functionals::TestFunction;
  const double r = 1.5;
  const auto e = normalize(PotentialSpec::exp());
  const auto g = normalize(PotentialSpec::gauss());
  const auto p = normalize(PotentialSpec::power(1.5));
  const std::vector<std::pair<const Measure1D*, std::string>> cases = {
      {&e, "x"}, {&e, "sin(x)"}, {&g, "x^3"}, {&g, "exp(x/2)"}, {&p, "1 + x^2"}};
  double hom = 0.0, res = 0.0, l2gap = std::numeric_limits<double>::infinity();
  for (const auto& [m, src] : cases) {
    const auto f = TestFunction::from_expression(src);
    const double L = functionals::luxemburg(*m, f, r);
    for (double c : {3.0, -0.5})
      hom = std::max(hom, std::abs(functionals::luxemburg(*m, f.scaled(c), r) - std::abs(c) * L) /
                              (std::abs(c) * L));
    res = std::max(res, std::abs(functionals::expectation(
                                     *m, [&](double x) { return functionals::phi(r, f(x) / L); }) -
                                 1.0));
    const double l2 = functionals::expectation(*m, [&](double x) { return f(x) * f(x); });
    l2gap = std::min(l2gap, L * L - l2);
    o.report.add(m->label() + ":" + src + ".L", L);
  }
  detail::check(o, "homogeneity", hom <= kHomTol, detail::fmt("rel %.2e <= 1e-8", hom));
  detail::check(o, "fixed point", res <= kResTol, detail::fmt("|int Phi - 1| %.2e <= 1e-8", res));
  detail::check(o, "L^2 >= int f^2", l2gap >= 0.0, detail::fmt("min gap %.4f", l2gap));
  return o;
}

// ---------------------------------------------------------------------------

struct Entry {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

inline const std::vector<Entry>& registry() {
  static const std::vector<Entry> all = {
      {1, "legendre-closed-form", legendre_closed_form},
      {2, "legendre-lower-bound", legendre_lower_bound},
      {3, "poincare-bracket", poincare_bracket},
      {4, "threshold-alpha2", threshold_alpha2},
      {5, "counterexample", counterexample},
      {6, "poincare-failure", poincare_failure},
      {7, "floor-split", floor_split},
      {8, "concentration-mc", [] { return concentration_mc(); }},
      {9, "gradient-bounds", [] { return gradient_bounds(); }},
      {10, "transport", transport},
      {11, "criteria-ordering", criteria_ordering},
      {12, "luxemburg", luxemburg_machinery},
  };
  return all;
}

/// Runs a scenario by number ("3") or name ("poincare-bracket").
inline Outcome run(const std::string& key) {
  for (const auto& e : registry()) {
    if (key == e.name || key == std::to_string(e.id)) {
      const auto t0 = std::chrono::steady_clock::now();
      Outcome o = e.run();
      o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      o.report.kind = std::string("repro:") + e.name;
      o.report.config = {{"scenario", e.name}, {"id", e.id}};
      return o;
    }
  }
  std::string names;
  for (const auto& e : registry()) names += std::string(names.empty() ? "" : ", ") + e.name;
  throw DomainError("unknown scenario '" + key + "' (" + names + ")");
}

}  // namespace hardy::scenarios
