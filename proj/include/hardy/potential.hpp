#pragma once
// Potentials V and their specifications. A measure is built from e^{-V}.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/expression.hpp"

namespace hardy {

enum class Family { Exp, Gauss, Power, SinPower, Cattiaux, Floor, Expression, Table };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Exp: return "exp";
    case Family::Gauss: return "gauss";
    case Family::Power: return "power";
    case Family::SinPower: return "sinpower";
    case Family::Cattiaux: return "cattiaux";
    case Family::Floor: return "floor";
    case Family::Expression: return "expr";
    case Family::Table: return "table";
  }
  return "?";
}

struct PotentialSpec {
  Family family = Family::Exp;
  std::vector<double> params;
  std::string expression;  // Family::Expression
  std::string table_path;  // Family::Table, informational
  std::vector<double> table_x, table_v;
  bool even = false;  // evaluate at |x|

  static PotentialSpec builtin(Family f, std::vector<double> p = {}) {
    PotentialSpec s;
    s.family = f;
    s.params = std::move(p);
    return s;
  }
  static PotentialSpec exp() { return builtin(Family::Exp); }
  static PotentialSpec gauss() { return builtin(Family::Gauss); }
  static PotentialSpec power(double r) { return builtin(Family::Power, {r}); }
  static PotentialSpec sinpower(double alpha, double lambda = 1.0) {
    return builtin(Family::SinPower, {alpha, lambda});
  }
  static PotentialSpec cattiaux(double r, double beta) {
    return builtin(Family::Cattiaux, {r, beta});
  }
  static PotentialSpec floor() { return builtin(Family::Floor); }
  static PotentialSpec expr(std::string source, bool even = false) {
    PotentialSpec s = builtin(Family::Expression);
    s.expression = std::move(source);
    s.even = even;
    return s;
  }
  static PotentialSpec table(std::vector<double> x, std::vector<double> v, bool even = false) {
    PotentialSpec s = builtin(Family::Table);
    s.table_x = std::move(x);
    s.table_v = std::move(v);
    s.even = even;
    return s;
  }

  /// Parses `family[:p1,p2]`, `expr:<expression>` or `table:<path>`.
  static PotentialSpec parse(const std::string& text, bool even = false);

  void validate() const;
  std::string label() const;
};

namespace detail {

inline std::vector<double> parse_params(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size())
      throw DomainError("bad numeric parameter '" + item + "'");
    out.push_back(v);
  }
  return out;
}

inline void read_table(const std::string& path, std::vector<double>& x, std::vector<double>& v) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open potential table '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ls(line);
    double a, b;
    if (!(ls >> a >> b)) continue;  // header or blank
    x.push_back(a);
    v.push_back(b);
  }
}

inline std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

inline PotentialSpec PotentialSpec::parse(const std::string& text, bool even) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
  PotentialSpec s;
  s.even = even;
  if (head == "expr") {
    s.family = Family::Expression;
    std::string e = rest;
    if (e.size() >= 2 && (e.front() == '"' || e.front() == '\'') && e.back() == e.front())
      e = e.substr(1, e.size() - 2);
    s.expression = e;
  } else if (head == "table") {
    s.family = Family::Table;
    s.table_path = rest;
    detail::read_table(rest, s.table_x, s.table_v);
  } else {
    static const Family builtins[] = {Family::Exp,      Family::Gauss,    Family::Power,
                                      Family::SinPower, Family::Cattiaux, Family::Floor};
    bool found = false;
    for (Family f : builtins)
      if (head == family_name(f)) {
        s.family = f;
        found = true;
      }
    if (!found) throw DomainError("unknown potential family '" + head + "'");
    if (!rest.empty()) s.params = detail::parse_params(rest);
    if (s.family == Family::SinPower && s.params.size() == 1) s.params.push_back(1.0);
  }
  s.validate();
  return s;
}

inline void PotentialSpec::validate() const {
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw DomainError(std::string(family_name(family)) + " expects " + std::to_string(n) +
                        " parameter(s), got " + std::to_string(params.size()));
  };
  switch (family) {
    case Family::Exp:
    case Family::Gauss:
    case Family::Floor: need(0); break;
    case Family::Power:
      need(1);
      if (!(params[0] >= 1.0)) throw DomainError("power(r) needs r >= 1");
      break;
    case Family::SinPower:
      need(2);
      if (!(params[0] > 1.0)) throw DomainError("sinpower(alpha, lambda) needs alpha > 1");
      if (!(params[1] >= 0.0)) throw DomainError("sinpower(alpha, lambda) needs lambda >= 0");
      break;
    case Family::Cattiaux: {
      need(2);
      const double r = params[0], b1 = params[1] - 1.0;
      if (!(r > 1.0 && r < 2.0)) throw DomainError("cattiaux(r, beta) needs r in (1,2)");
      if (!(std::max(r / 2.0, r - 1.0 / r) < b1 && b1 < r - 0.5))
        throw DomainError("cattiaux(r, beta) needs max{r/2, r-1/r} < beta-1 < r-1/2");
      break;
    }
    case Family::Expression:
      expr::parse(expression);
      break;
    case Family::Table: {
      if (table_x.size() < 2 || table_x.size() != table_v.size())
        throw DomainError("table potential needs at least two (x, V) rows");
      for (std::size_t i = 1; i < table_x.size(); ++i)
        if (!(table_x[i] > table_x[i - 1]))
          throw DomainError("table potential abscissae must be strictly increasing");
      for (double v : table_v)
        if (!std::isfinite(v)) throw DomainError("table potential has a non-finite value");
      break;
    }
  }
}

inline std::string PotentialSpec::label() const {
  std::string s = family_name(family);
  if (family == Family::Expression) return s + ":" + expression + (even ? " (even)" : "");
  if (family == Family::Table)
    return s + ":" + (table_path.empty() ? "<inline>" : table_path) + (even ? " (even)" : "");
  for (std::size_t i = 0; i < params.size(); ++i)
    s += (i == 0 ? ":" : ",") + detail::fmt_num(params[i]);
  return s;
}

class Potential {
 public:
  using Fn = std::function<double(double)>;

  Potential() = default;
  Potential(PotentialSpec spec, Fn value, Fn derivative, bool even, double split_period,
            std::vector<double> kinks)
      : spec_(std::move(spec)),
        value_(std::move(value)),
        deriv_(std::move(derivative)),
        even_(even),
        period_(split_period),
        kinks_(std::move(kinks)) {}

  double operator()(double x) const { return value_(x); }
  bool has_derivative() const { return static_cast<bool>(deriv_); }
  double derivative(double x) const {
    if (!deriv_) throw DomainError("potential " + spec_.label() + " has no derivative");
    return deriv_(x);
  }
  const PotentialSpec& spec() const { return spec_; }
  bool is_even() const { return even_; }
  /// Quadrature pre-split period (0 = none).
  double split_period() const { return period_; }
  /// Points where V is not differentiable.
  const std::vector<double>& kinks() const { return kinks_; }
  /// True when a tabulated potential is evaluated outside its grid.
  bool extrapolated(double x) const {
    if (spec_.family != Family::Table) return false;
    const double t = spec_.even ? std::abs(x) : x;
    return t < spec_.table_x.front() || t > spec_.table_x.back();
  }

 private:
  PotentialSpec spec_;
  Fn value_, deriv_;
  bool even_ = false;
  double period_ = 0.0;
  std::vector<double> kinks_;
};

namespace detail {

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// Wraps f so that it is evaluated at |x|; derivative picks up sign(x).
inline void make_even(Potential::Fn& v, Potential::Fn& d) {
  v = [f = v](double x) { return f(std::abs(x)); };
  if (d) d = [g = d](double x) { return sgn(x) * g(std::abs(x)); };
}

}  // namespace detail

inline Potential make_potential(const PotentialSpec& spec) {
  spec.validate();
  using detail::sgn;
  Potential::Fn v, d;
  bool even = true;
  double period = 0.0;
  std::vector<double> kinks;
  const auto& p = spec.params;
  switch (spec.family) {
    case Family::Exp:
      v = [](double x) { return std::abs(x); };
      d = [](double x) { return sgn(x); };
      kinks = {0.0};
      break;
    case Family::Gauss:
      v = [](double x) { return 0.5 * x * x; };
      d = [](double x) { return x; };
      break;
    case Family::Power: {
      const double r = p[0];
      v = [r](double x) { return std::pow(std::abs(x), r); };
      d = [r](double x) { return r * sgn(x) * std::pow(std::abs(x), r - 1.0); };
      if (r < 2.0) kinks = {0.0};
      break;
    }
    case Family::SinPower: {
      const double a = p[0], l = p[1];
      v = [a, l](double x) { return std::pow(std::abs(x + l * std::sin(x)), a); };
      d = [a, l](double x) {
        const double u = x + l * std::sin(x);
        return a * sgn(u) * std::pow(std::abs(u), a - 1.0) * (1.0 + l * std::cos(x));
      };
      if (l > 0.0) period = std::numbers::pi;
      if (a < 2.0) kinks = {0.0};
      break;
    }
    case Family::Cattiaux: {
      const double r = p[0], b = p[1];
      v = [r, b](double x) {
        const double t = std::abs(x), s = std::sin(t);
        return std::pow(t, r + 1.0) + (r + 1.0) * std::pow(t, r) * s * s + std::pow(t, b);
      };
      d = [r, b](double x) {
        const double t = std::abs(x);
        if (t == 0.0) return 0.0;
        const double s = std::sin(t);
        const double dp = (r + 1.0) * (1.0 + std::sin(2.0 * t)) * std::pow(t, r) +
                          (r + 1.0) * r * std::pow(t, r - 1.0) * s * s +
                          b * std::pow(t, b - 1.0);
        return sgn(x) * dp;
      };
      period = std::numbers::pi;
      kinks = {0.0};
      break;
    }
    case Family::Floor:
      v = [](double x) { return std::floor(std::abs(x)); };
      period = 1.0;
      break;
    case Family::Expression: {
      auto e = std::make_shared<const expr::Expression>(spec.expression);
      v = [e](double x) { return (*e)(x); };
      const bool has_floor = e->uses(expr::Fn::Floor);
      if (!has_floor) d = [e](double x) { return e->derivative(x); };
      if (e->uses(expr::Fn::Sin) || e->uses(expr::Fn::Cos)) period = std::numbers::pi;
      else if (has_floor) period = 1.0;
      even = spec.even;
      if (even) detail::make_even(v, d);
      break;
    }
    case Family::Table: {
      auto xs = std::make_shared<const std::vector<double>>(spec.table_x);
      auto vs = std::make_shared<const std::vector<double>>(spec.table_v);
      auto locate = [xs](double x) {
        const auto& g = *xs;
        auto it = std::upper_bound(g.begin(), g.end(), x);
        std::size_t i = it == g.begin() ? 0 : static_cast<std::size_t>(it - g.begin()) - 1;
        return std::min(i, g.size() - 2);
      };
      v = [xs, vs, locate](double x) {
        const std::size_t i = locate(x);
        const double s = ((*vs)[i + 1] - (*vs)[i]) / ((*xs)[i + 1] - (*xs)[i]);
        return (*vs)[i] + s * (x - (*xs)[i]);
      };
      d = [xs, vs, locate](double x) {
        const std::size_t i = locate(x);
        return ((*vs)[i + 1] - (*vs)[i]) / ((*xs)[i + 1] - (*xs)[i]);
      };
      kinks = spec.table_x;
      even = spec.even;
      if (even) {
        detail::make_even(v, d);
        kinks.push_back(0.0);
      }
      break;
    }
  }
  return Potential(spec, std::move(v), std::move(d), even, period, std::move(kinks));
}

}  // namespace hardy
