// hardy: command-line front end. Every subcommand prints one JSON report
// (or writes it to --output); --csv PREFIX also writes one CSV per curve.
// Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hardy/hardy.hpp"

namespace {

using hardy::report::json;
using hardy::report::Report;

struct Common {
  std::string potential = "exp";
  bool even = false;
  double rel_tol = 1e-11;
  double abs_tol = 1e-15;
  std::string rule = "gk15";
  std::size_t max_panels = 400000;
  int max_depth = 60;
  double eps_trunc = 1e-12;
  std::string output;
  std::string csv;

  hardy::quad::QuadConfig quad() const {
    hardy::quad::QuadConfig c;
    c.rel_tol = rel_tol;
    c.abs_tol = abs_tol;
    c.panel_rule = hardy::quad::parse_rule(rule);
    c.max_panels = max_panels;
    c.max_depth = max_depth;
    c.validate();
    return c;
  }
  hardy::Measure1D measure() const {
    auto spec = hardy::PotentialSpec::parse(potential, even);
    return hardy::normalize(spec, quad(), eps_trunc);
  }
};

struct Scan {
  std::vector<double> horizons = {25, 50, 100, 200, 400, 800};
  double step = 0.39269908169872414;  // pi / 8
  std::string side = "max";
  double plateau_tol = 0.05;
  double slope_threshold = 0.02;

  hardy::criteria::ScanOptions options() const {
    hardy::criteria::ScanOptions o;
    o.horizons = horizons;
    o.step = step;
    if (side == "plus") o.side = hardy::criteria::Side::Plus;
    else if (side == "minus") o.side = hardy::criteria::Side::Minus;
    else if (side == "max") o.side = hardy::criteria::Side::Max;
    else throw hardy::DomainError("--side must be plus, minus or max");
    o.plateau_tol = plateau_tol;
    o.slope_threshold = slope_threshold;
    o.validate();
    return o;
  }
};

void add_common(CLI::App* app, Common& c, bool with_potential = true) {
  if (with_potential) {
    app->add_option("--potential,-p", c.potential,
                    "family:p1,p2 | expr:\"...\" | table:path (families: exp, gauss, power:r, "
                    "sinpower:alpha[,lambda], cattiaux:r,beta, floor)")
        ->capture_default_str();
    app->add_flag("--even", c.even, "evaluate an expr/table potential as V(|x|)");
    app->add_option("--eps-trunc", c.eps_trunc, "relative tail mass defining the truncation point")
        ->capture_default_str()
        ->check(CLI::Range(1e-300, 0.5));
  }
  app->add_option("--rel-tol", c.rel_tol, "quadrature relative tolerance")->capture_default_str();
  app->add_option("--abs-tol", c.abs_tol, "quadrature absolute tolerance")->capture_default_str();
  app->add_option("--rule", c.rule, "panel rule")->capture_default_str()->check(CLI::IsMember({"gk15", "gk21"}));
  app->add_option("--max-panels", c.max_panels, "quadrature panel budget")->capture_default_str();
  app->add_option("--max-depth", c.max_depth, "quadrature bisection depth")->capture_default_str();
  app->add_option("--output,-o", c.output, "write the JSON report here instead of stdout");
  app->add_option("--csv", c.csv, "also write one CSV per curve as PREFIX.<curve>.csv");
}

void add_scan(CLI::App* app, Scan& s) {
  app->add_option("--horizons", s.horizons, "increasing scan horizons")->capture_default_str()->delimiter(',');
  app->add_option("--step", s.step, "scan grid step (default pi/8)")->default_str("0.39269908169872414");
  app->add_option("--side", s.side, "plus | minus | max")->capture_default_str();
  app->add_option("--plateau-tol", s.plateau_tol, "bounded if S(X_k)/S(X_k/2) <= 1 + tol")->capture_default_str();
  app->add_option("--slope-threshold", s.slope_threshold, "divergent if the exponent CI lies above")
      ->capture_default_str();
}

/// Every option of the invoked subcommand chain, as given or defaulted.
json run_config(const CLI::App& root) {
  json cfg = json::object();
  std::vector<std::string> chain;
  const CLI::App* app = &root;
  while (app) {
    for (const CLI::Option* opt : app->get_options()) {
      if (opt == app->get_help_ptr() || opt == app->get_help_all_ptr()) continue;
      const std::string key = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
      if (opt->get_items_expected_max() == 0) {
        cfg[key] = opt->count() > 0;
        continue;
      }
      std::string text = opt->get_default_str();
      if (opt->count() > 0) {
        const auto& r = opt->results();
        text.clear();
        for (std::size_t i = 0; i < r.size(); ++i) text += (i ? "," : "") + r[i];
        if (r.size() > 1) text = "[" + text + "]";
      }
      // numbers and numeric lists are stored typed, everything else verbatim
      cfg[key] = json::accept(text) ? json::parse(text) : json(text);
    }
    const auto subs = app->get_subcommands();
    if (subs.empty()) break;
    app = subs.front();
    chain.push_back(app->get_name());
  }
  std::string cmd;
  for (const auto& c : chain) cmd += (cmd.empty() ? "" : " ") + c;
  json out = {{"subcommand", cmd}};
  out.update(cfg);
  return out;
}

void emit(const Report& rep, const Common& c) {
  const std::string text = rep.to_json().dump(2);
  if (c.output.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream f(c.output);
    if (!f) throw hardy::Error("cannot open " + c.output);
    f << text << "\n";
  }
}

void csv(const Common& c, const std::string& curve, const std::vector<std::string>& header,
         const std::vector<std::vector<double>>& cols) {
  if (c.csv.empty()) return;
  hardy::report::write_csv(c.csv + "." + curve + ".csv", header, cols);
}

hardy::criteria::Kind parse_kind(const std::string& k) {
  using hardy::criteria::Kind;
  if (k == "bp") return Kind::BP;
  if (k == "bls") return Kind::BLS;
  if (k == "blo") return Kind::BLO;
  if (k == "bmls") return Kind::BmLS;
  if (k == "bweighted") return Kind::BW;
  throw hardy::DomainError("unknown criterion kind '" + k + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardy-type criteria, functional inequality evaluators and concentration experiments "
               "for one-dimensional measures e^{-V}/Z"};
  app.require_subcommand(1);
  Common c;
  Scan s;
  Report rep;

  // measure info -----------------------------------------------------------
  auto* measure = app.add_subcommand("measure", "measure utilities");
  measure->require_subcommand(1);
  auto* info = measure->add_subcommand("info", "normalizing constant, median, truncation point, tails");
  add_common(info, c);
  std::vector<double> info_x = {1, 2, 5, 10};
  info->add_option("--x", info_x, "points at which to report tails")->delimiter(',')->capture_default_str();

  // criteria ---------------------------------------------------------------
  auto* crit = app.add_subcommand("criteria", "Hardy-type criteria and diagnostics");
  add_common(crit, c);
  add_scan(crit, s);
  std::string kind = "bp";
  double r = 1.5, eps_hyp = 0.1;
  std::vector<double> tail_x = {5, 10, 20, 40, 80};
  crit->add_option("--kind,-k", kind, "bp | bls | blo | bmls | bweighted | hyp | asymptotics | tailscale")
      ->required()
      ->check(CLI::IsMember({"bp", "bls", "blo", "bmls", "bweighted", "hyp", "asymptotics", "tailscale"}));
  crit->add_option("--r", r, "exponent r in (1,2)")->capture_default_str();
  crit->add_option("--eps", eps_hyp, "threshold for the hyp check")->capture_default_str();
  crit->add_option("--x", tail_x, "points for tailscale")->delimiter(',')->capture_default_str();

  // spectral ---------------------------------------------------------------
  auto* spec = app.add_subcommand("spectral", "spectral gap of the discretized generator");
  add_common(spec, c);
  double X = 0.0;
  std::size_t N = 4000;
  std::vector<std::string> rayleigh_fs;
  spec->add_option("--X", X, "half-width of the grid (default: truncation point)");
  spec->add_option("--N", N, "number of grid intervals")->capture_default_str()->check(CLI::Range(100, 100000000));
  spec->add_option("--f", rayleigh_fs, "test functions for Rayleigh lower bounds");

  // evaluate ---------------------------------------------------------------
  auto* eval = app.add_subcommand("evaluate", "evaluate both sides of an inequality for a test function");
  add_common(eval, c);
  std::string inequality = "poincare", f_src = "x";
  bool positive = false;
  double param = 1.5;
  eval->add_option("--inequality,-i", inequality,
                   "poincare | log-sobolev | mls | lo | frsob | defective-frsob | weighted | itau")
      ->capture_default_str()
      ->check(CLI::IsMember({"poincare", "log-sobolev", "mls", "lo", "frsob", "defective-frsob", "weighted", "itau"}));
  eval->add_option("--f", f_src, "test function expression in x")->capture_default_str();
  eval->add_flag("--positive", positive, "declare f strictly positive (required by mls)");
  eval->add_option("--r,--tau", param, "r for mls/lo/frsob/weighted, tau for itau")->capture_default_str();

  // legendre ---------------------------------------------------------------
  auto* leg = app.add_subcommand("legendre", "closed-form and numeric Legendre transform of H_{r'}");
  add_common(leg, c, false);
  double rprime = 3.0;
  std::vector<double> leg_t = {2.0};
  std::size_t leg_steps = 1000001;
  double leg_range = 10.0;
  leg->add_option("--rprime", rprime, "r' > 2")->capture_default_str();
  leg->add_option("--t", leg_t, "points")->delimiter(',')->capture_default_str();
  leg->add_option("--steps", leg_steps, "numeric s-grid size")->capture_default_str();
  leg->add_option("--s-range", leg_range, "numeric s-grid half-width")->capture_default_str();

  // threshold-scan ---------------------------------------------------------
  auto* thr = app.add_subcommand("threshold-scan", "verdict matrix over (alpha, r) for sinpower:alpha,1");
  add_common(thr, c, false);
  add_scan(thr, s);
  std::vector<double> alphas = {1.25, 1.5, 2.0, 3.0};
  double r_min = 1.05, r_max = 1.9, r_step = 0.05;
  std::string thr_kind = "blo";
  thr->add_option("--alphas", alphas, "alpha values")->delimiter(',')->capture_default_str();
  thr->add_option("--r-min", r_min)->capture_default_str();
  thr->add_option("--r-max", r_max)->capture_default_str();
  thr->add_option("--r-step", r_step)->capture_default_str();
  thr->add_option("--kind,-k", thr_kind, "blo | bmls")->capture_default_str()->check(CLI::IsMember({"blo", "bmls"}));

  // concentration ----------------------------------------------------------
  auto* conc = app.add_subcommand("concentration", "Monte Carlo and deterministic concentration checks (default potential: power:R)");
  add_common(conc, c);
  std::string experiment = "deviation", statistic = "mean_scaled";
  std::size_t n = 16, count = 100000;
  std::uint64_t seed = 1;
  std::optional<double> C_opt;
  double conc_r = 1.5, box = 3.0, alpha = 1.5;
  std::vector<double> t_grid = {1, 2, 3};
  conc->add_option("experiment", experiment, "deviation | enlargement | gradcheck | transport")
      ->required()
      ->check(CLI::IsMember({"deviation", "enlargement", "gradcheck", "transport"}));
  conc->add_option("--statistic", statistic, "mean_scaled | max | softmax:beta | zero")->capture_default_str();
  conc->add_option("--n", n, "product dimension")->capture_default_str()->check(CLI::PositiveNumber);
  conc->add_option("--count", count, "samples or points")->capture_default_str()->check(CLI::PositiveNumber);
  conc->add_option("--seed", seed, "RNG seed")->capture_default_str();
  conc->add_option("--C", C_opt, "constant C (default: constructive mLS bracket upper end)");
  conc->add_option("--r", conc_r, "exponent r in (1,2)")->capture_default_str();
  conc->add_option("--t-grid", t_grid, "increasing t values")->delimiter(',')->capture_default_str();
  conc->add_option("--box", box, "sampling cube half-width for gradcheck")->capture_default_str();
  conc->add_option("--alpha", alpha, "alpha in (1,2] for transport")->capture_default_str();

  // repro ------------------------------------------------------------------
  auto* repro = app.add_subcommand("repro", "run a named acceptance scenario end to end");
  add_common(repro, c, false);
  std::string scenario;
  std::string names;
  for (const auto& e : hardy::scenarios::registry()) names += std::string(names.empty() ? "" : ", ") + e.name;
  repro->add_option("scenario", scenario, "number or name: " + names)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    rep.config = run_config(app);
    if (*conc && conc->get_option("--potential")->count() == 0) {
      // the default for Monte Carlo runs is the power family at the same r
      std::ostringstream p;
      p << "power:" << conc_r;
      c.potential = p.str();
      rep.config["potential"] = c.potential;
    }
    if (*info) {
      const auto m = c.measure();
      rep.kind = "measure.info";
      rep.config["quad"] = {{"rel_tol", c.rel_tol}, {"abs_tol", c.abs_tol}, {"rule", c.rule}};
      rep.add("label", json(m.label()));
      rep.add("Z", m.z());
      rep.add("log_Z", m.log_z());
      rep.add("median", m.median());
      rep.add("truncation", m.truncation());
      rep.add("even", json(m.is_even()));
      std::vector<double> up, lo;
      for (double x : info_x) {
        up.push_back(m.tail(x));
        lo.push_back(m.cdf(-x));
      }
      rep.add("x", hardy::report::nums(info_x));
      rep.add("upper_tail", hardy::report::nums(up));
      rep.add("lower_tail", hardy::report::nums(lo));
      csv(c, "upper_tail", {"x", "tail"}, {info_x, up});
    } else if (*crit) {
      const auto m = c.measure();
      const auto o = s.options();
      rep.kind = "criteria." + kind;
      rep.config["scan"] = hardy::report::criterion_config(o);
      if (kind == "hyp") {
        const auto h = hardy::criteria::hyp_mls_check(m, r, eps_hyp, o);
        hardy::report::Result res{"worst_ratio", hardy::report::num(h.worst_ratio),
                                  h.holds ? "holds" : "fails", {}, h.worst_at};
        rep.results.push_back(res);
      } else if (kind == "asymptotics") {
        const auto a = hardy::criteria::asymptotic_conditions(m, r, o);
        rep.add("br_tail_max", a.br_tail_max);
        rep.add("weighted_tail_max", a.weighted_tail_max);
        rep.add("vpp_tail_max", a.vpp_tail_max);
        rep.add("x", hardy::report::nums(a.x));
        rep.add("br_ratio", hardy::report::nums(a.br_ratio));
        rep.add("weighted_ratio", hardy::report::nums(a.weighted_ratio));
        rep.add("vpp_ratio", hardy::report::nums(a.vpp_ratio));
        csv(c, "br_ratio", {"x", "br_ratio"}, {a.x, a.br_ratio});
        csv(c, "weighted_ratio", {"x", "weighted_ratio"}, {a.x, a.weighted_ratio});
        csv(c, "vpp_ratio", {"x", "vpp_ratio"}, {a.x, a.vpp_ratio});
      } else if (kind == "tailscale") {
        const auto rows = hardy::criteria::tail_asymptotics(m, tail_x);
        std::vector<double> th, rt, rd;
        for (const auto& row : rows) {
          th.push_back(row.theta);
          rt.push_back(row.ratio_theta);
          rd.push_back(row.ratio_deriv.value_or(std::nan("")));
        }
        rep.add("x", hardy::report::nums(tail_x));
        rep.add("theta", hardy::report::nums(th));
        rep.add("ratio_theta", hardy::report::nums(rt));
        rep.add("ratio_deriv", hardy::report::nums(rd));
        csv(c, "ratio_theta", {"x", "ratio_theta"}, {tail_x, rt});
      } else {
        const auto k = parse_kind(kind);
        hardy::criteria::CriterionResult res;
        switch (k) {
          case hardy::criteria::Kind::BP: res = hardy::criteria::bp(m, o); break;
          case hardy::criteria::Kind::BLS: res = hardy::criteria::bls(m, o); break;
          case hardy::criteria::Kind::BLO: res = hardy::criteria::blo(m, r, o); break;
          case hardy::criteria::Kind::BmLS: res = hardy::criteria::bmls(m, r, o); break;
          case hardy::criteria::Kind::BW: res = hardy::criteria::bweighted(m, r, o); break;
        }
        hardy::report::add_criterion(rep, res);
        csv(c, "partial_sups", {"horizon", "log_partial_sup"}, {res.horizons, res.log_partial_sups});
      }
    } else if (*spec) {
      const auto m = c.measure();
      const double Xg = X > 0.0 ? X : m.truncation();
      const auto g = hardy::spectral::spectral_gap_report(m, Xg, N);
      rep.kind = "spectral";
      rep.config["X_effective"] = Xg;
      rep.add("lambda1", g.lambda1);
      rep.add("inverse_gap", 1.0 / g.lambda1);
      rep.add("ground", g.ground);
      rep.add("matrix_norm", g.matrix_norm);
      rep.add("tail_mass", g.tail_mass);
      for (const auto& src : rayleigh_fs)
        rep.add("rayleigh:" + src, hardy::spectral::rayleigh(m, hardy::functionals::TestFunction::from_expression(src)));
    } else if (*eval) {
      using hardy::functionals::Inequality;
      const auto m = c.measure();
      const Inequality k = inequality == "poincare"          ? Inequality::Poincare
                           : inequality == "log-sobolev"     ? Inequality::LogSobolev
                           : inequality == "mls"             ? Inequality::MLS
                           : inequality == "lo"              ? Inequality::LO
                           : inequality == "frsob"           ? Inequality::FSob
                           : inequality == "defective-frsob" ? Inequality::DefectiveFSob
                           : inequality == "weighted"        ? Inequality::Weighted
                                                             : Inequality::ITau;
      const auto f = hardy::functionals::TestFunction::from_expression(f_src, positive);
      rep.kind = "evaluate." + inequality;
      hardy::report::add_inequality(rep, hardy::functionals::ratio_report(m, f, k, param));
    } else if (*leg) {
      rep.kind = "legendre";
      std::vector<double> closed, numeric;
      auto H = [rprime](double v) { return hardy::functionals::h(rprime, v); };
      for (double t : leg_t) {
        closed.push_back(hardy::functionals::h_star(rprime, t));
        numeric.push_back(hardy::functionals::legendre_numeric(H, t, -leg_range, leg_range, leg_steps));
      }
      if (leg_t.size() == 1) {
        rep.add("h_star", closed.front());
        rep.add("legendre_numeric", numeric.front());
      } else {
        rep.add("t", hardy::report::nums(leg_t));
        rep.add("h_star", hardy::report::nums(closed));
        rep.add("legendre_numeric", hardy::report::nums(numeric));
      }
      csv(c, "h_star", {"t", "h_star"}, {leg_t, closed});
    } else if (*thr) {
      const auto o = s.options();
      rep.kind = "threshold-scan." + thr_kind;
      rep.config["scan"] = hardy::report::criterion_config(o);
      json rows = json::array();
      std::vector<double> ca, cr, cv, ce;
      for (double a : alphas) {
        const auto m = hardy::normalize(hardy::PotentialSpec::sinpower(a, 1.0), c.quad());
        for (int i = 0; r_min + i * r_step <= r_max + 1e-9; ++i) {
          const double rr = std::round((r_min + i * r_step) * 1e9) / 1e9;
          const auto res = thr_kind == "blo" ? hardy::criteria::blo(m, rr, o) : hardy::criteria::bmls(m, rr, o);
          const double ge = res.verdict.growth_exponent.value_or(std::nan(""));
          rows.push_back({{"alpha", a}, {"r", rr}, {"verdict", hardy::criteria::label_name(res.verdict.label)},
                          {"growth_exponent", hardy::report::num(ge)}, {"r0", hardy::criteria::r0(a)}});
          ca.push_back(a);
          cr.push_back(rr);
          cv.push_back(static_cast<double>(res.verdict.label));
          ce.push_back(ge);
        }
      }
      rep.add("rows", rows);
      std::vector<double> acurve, r0curve;
      for (int i = 0; i <= 60; ++i) {
        const double a = 1.0 + 0.05 * i;
        acurve.push_back(a);
        r0curve.push_back(hardy::criteria::r0(a));
      }
      rep.add("r0_curve", json{{"alpha", hardy::report::nums(acurve)}, {"r0", hardy::report::nums(r0curve)}});
      csv(c, "verdicts", {"alpha", "r", "verdict_code", "growth_exponent"}, {ca, cr, cv, ce});
      csv(c, "r0", {"alpha", "r0"}, {acurve, r0curve});
    } else if (*conc) {
      rep.kind = "concentration." + experiment;
      if (experiment == "gradcheck") {
        const auto g = hardy::concentration::lipschitz_gradient_check(conc_r, t_grid.back(), count, seed, box, n);
        rep.add("worst_l2", g.worst_l2);
        rep.add("worst_rprime", g.worst_rprime);
        rep.add("points", json(g.points));
        rep.results.push_back({"passed", json(g.worst_l2 <= 1 + 1e-9 && g.worst_rprime <= 1 + 1e-9),
                               (g.worst_l2 <= 1 + 1e-9 && g.worst_rprime <= 1 + 1e-9) ? "pass" : "fail", {}, {}});
      } else {
        const auto m = c.measure();
        if (experiment == "transport") {
          const auto tc = hardy::concentration::transport_check(m, alpha);
          rep.results.push_back({"b_alpha_inf", hardy::report::num(tc.b_alpha_inf), {}, {}, tc.x});
          rep.add("witness", json::array({tc.x, tc.y}));
        } else {
          const double C = C_opt ? *C_opt : hardy::criteria::constructive_mls_constant(m, conc_r);
          rep.config["C_effective"] = C;
          const auto e =
              experiment == "deviation"
                  ? hardy::concentration::deviation_experiment(
                        m, n, hardy::concentration::StatisticSpec::parse(statistic), t_grid, count, seed, C, conc_r)
                  : hardy::concentration::enlargement_experiment(m, n, t_grid, count, seed, C, conc_r);
          hardy::report::add_experiment(rep, e);
          csv(c, "empirical_tail", {"t", "tail"}, {e.t_grid, e.empirical_tail});
          csv(c, "bound_tail", {"t", "tail"}, {e.t_grid, e.bound_tail});
        }
      }
    } else if (*repro) {
      auto o = hardy::scenarios::run(scenario);
      rep.kind = o.report.kind;
      rep.results = o.report.results;
      rep.config["scenario"] = o.name;
      for (const auto& ch : o.checks)
        rep.results.push_back({"check:" + ch.name, json(ch.detail), ch.ok ? "pass" : "fail", {}, {}});
      rep.results.push_back({"passed", json(o.passed()), o.passed() ? "pass" : "fail", {}, {}});
    }
    emit(rep, c);
  } catch (const hardy::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hardy::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const hardy::Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
