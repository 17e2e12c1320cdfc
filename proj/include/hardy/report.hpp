#pragma once
// JSON and CSV serialization of results. Non-finite numbers become null.

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hardy/concentration.hpp"
#include "hardy/criteria.hpp"
#include "hardy/error.hpp"
#include "hardy/functionals.hpp"

namespace hardy::report {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

inline json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

struct Result {
  std::string name;
  json value;
  std::optional<std::string> verdict;
  std::optional<std::pair<double, double>> bracket;
  std::optional<double> argmax;

  json to_json() const {
    json j = {{"name", name}, {"value", value}};
    if (verdict) j["verdict"] = *verdict;
    if (bracket) j["bracket"] = json::array({num(bracket->first), num(bracket->second)});
    if (argmax) j["argmax"] = num(*argmax);
    return j;
  }
};

struct Report {
  json config = json::object();
  std::string kind;
  std::vector<Result> results;

  void add(std::string name, json value) { results.push_back({std::move(name), std::move(value), {}, {}, {}}); }
  void add(std::string name, double value) { add(std::move(name), num(value)); }

  json to_json() const {
    json res = json::array();
    for (const auto& r : results) res.push_back(r.to_json());
    return {{"config", config}, {"kind", kind}, {"results", res}, {"version", kVersion}};
  }
};

/// Header row then numeric rows; non-finite values are written as nan/inf.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  out.precision(17);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c][r];
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// converters

inline void add_criterion(Report& rep, const criteria::CriterionResult& res) {
  using namespace criteria;
  const std::string k = kind_name(res.kind);
  Result main{k + ".final_sup", num(res.final_sup()), label_name(res.verdict.label), res.bracket,
              res.argmax.back()};
  rep.results.push_back(main);
  rep.add(k + ".log_final_sup", res.log_partial_sups.back());
  rep.add("horizons", nums(res.horizons));
  rep.add(k + ".partial_sups", nums(res.partial_sups()));
  rep.add(k + ".log_partial_sups", nums(res.log_partial_sups));
  rep.add(k + ".argmax", nums(res.argmax));
  if (res.verdict.growth_exponent) rep.add(k + ".growth_exponent", *res.verdict.growth_exponent);
  rep.add(k + ".growth_ci", json::array({num(res.verdict.ci_lo), num(res.verdict.ci_hi)}));
  rep.add(k + ".plateau_ratio", res.verdict.plateau_ratio);
}

inline json criterion_config(const criteria::ScanOptions& o) {
  return {{"horizons", nums(o.horizons)}, {"step", o.step}, {"side", criteria::side_name(o.side)},
          {"plateau_tol", o.plateau_tol}, {"slope_threshold", o.slope_threshold},
          {"confidence", o.confidence}, {"golden_iters", o.golden_iters}};
}

inline void add_experiment(Report& rep, const concentration::ExperimentReport& e) {
  rep.add("measure", json(e.measure));
  rep.add("n", json(e.n));
  rep.add("statistic", json(e.statistic));
  rep.add("count", json(e.count));
  rep.add("seed", json(e.seed));
  rep.add("t_grid", nums(e.t_grid));
  rep.add("empirical_tail", nums(e.empirical_tail));
  rep.add("radius", nums(e.radius));
  rep.add("bound_tail", nums(e.bound_tail));
  rep.add("margins", nums(e.margins));
  for (const auto& [k, v] : e.constants) rep.add("constant." + k, v);
  Result pass{"passed", json(e.passed()), e.passed() ? "pass" : "fail", {}, {}};
  rep.results.push_back(pass);
}

inline void add_inequality(Report& rep, const functionals::InequalityReport& r) {
  const std::string k = functionals::inequality_name(r.kind);
  rep.add(k + ".lhs", r.lhs);
  rep.add(k + ".rhs_energy", r.rhs_energy);
  rep.add(k + ".ratio", r.ratio);
  rep.add(k + ".param", r.param);
  for (const auto& [name, v] : r.components) rep.add(k + "." + name, v);
}

}  // namespace hardy::report
