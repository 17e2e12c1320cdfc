#pragma once
// Recursive-descent parser for scalar expressions in one variable x.
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := base ('^' factor)?          '^' is right-associative
//   base   := number | 'x' | '(' expr ')' | fn '(' expr ')'
//   fn     := abs | sin | cos | exp | log | floor | sqrt
//
// Parsed trees can be differentiated symbolically and are compiled to a
// flat postfix program for fast repeated evaluation.

#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hardy/error.hpp"

namespace hardy::expr {

// Sign is internal: it appears only in derivatives of abs.
enum class Fn { Abs, Sin, Cos, Exp, Log, Floor, Sqrt, Sign };

inline const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Abs: return "abs";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Floor: return "floor";
    case Fn::Sqrt: return "sqrt";
    case Fn::Sign: return "sign";
  }
  return "?";
}

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind;
  double value = 0.0;
  Fn fn = Fn::Abs;
  NodePtr lhs, rhs;
};

namespace detail {

inline NodePtr node(Node::Kind k, double v = 0.0, Fn f = Fn::Abs, NodePtr a = {}, NodePtr b = {}) {
  return std::make_shared<Node>(Node{k, v, f, std::move(a), std::move(b)});
}
inline NodePtr num(double v) { return node(Node::Kind::Num, v); }
inline NodePtr var() { return node(Node::Kind::Var); }
inline bool is_num(const NodePtr& n, double v) {
  return n->kind == Node::Kind::Num && n->value == v;
}
inline bool is_const(const NodePtr& n) {
  switch (n->kind) {
    case Node::Kind::Num: return true;
    case Node::Kind::Var: return false;
    case Node::Kind::Neg:
    case Node::Kind::Call: return is_const(n->lhs);
    default: return is_const(n->lhs) && is_const(n->rhs);
  }
}

double eval_tree(const NodePtr& n, double x);

inline NodePtr fold(NodePtr n) {
  if (n->kind != Node::Kind::Num && is_const(n)) return num(eval_tree(n, 0.0));
  return n;
}
inline NodePtr neg(NodePtr a) {
  if (a->kind == Node::Kind::Num) return num(-a->value);
  if (a->kind == Node::Kind::Neg) return a->lhs;
  return node(Node::Kind::Neg, 0.0, Fn::Abs, std::move(a));
}
inline NodePtr bin(Node::Kind k, NodePtr a, NodePtr b) {
  return fold(node(k, 0.0, Fn::Abs, std::move(a), std::move(b)));
}
inline NodePtr add(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  return bin(Node::Kind::Add, std::move(a), std::move(b));
}
inline NodePtr sub(NodePtr a, NodePtr b) {
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return neg(std::move(b));
  return bin(Node::Kind::Sub, std::move(a), std::move(b));
}
inline NodePtr mul(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  return bin(Node::Kind::Mul, std::move(a), std::move(b));
}
inline NodePtr div(NodePtr a, NodePtr b) {
  if (is_num(a, 0.0)) return num(0.0);
  if (is_num(b, 1.0)) return a;
  return bin(Node::Kind::Div, std::move(a), std::move(b));
}
inline NodePtr pow(NodePtr a, NodePtr b) {
  if (is_num(b, 1.0)) return a;
  if (is_num(b, 0.0)) return num(1.0);
  return bin(Node::Kind::Pow, std::move(a), std::move(b));
}
inline NodePtr call(Fn f, NodePtr a) {
  return fold(node(Node::Kind::Call, 0.0, f, std::move(a)));
}

inline double apply(Fn f, double v) {
  switch (f) {
    case Fn::Abs: return std::abs(v);
    case Fn::Sin: return std::sin(v);
    case Fn::Cos: return std::cos(v);
    case Fn::Exp: return std::exp(v);
    case Fn::Log: return std::log(v);
    case Fn::Floor: return std::floor(v);
    case Fn::Sqrt: return std::sqrt(v);
    case Fn::Sign: return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  }
  return 0.0;
}

inline double eval_tree(const NodePtr& n, double x) {
  switch (n->kind) {
    case Node::Kind::Num: return n->value;
    case Node::Kind::Var: return x;
    case Node::Kind::Neg: return -eval_tree(n->lhs, x);
    case Node::Kind::Add: return eval_tree(n->lhs, x) + eval_tree(n->rhs, x);
    case Node::Kind::Sub: return eval_tree(n->lhs, x) - eval_tree(n->rhs, x);
    case Node::Kind::Mul: return eval_tree(n->lhs, x) * eval_tree(n->rhs, x);
    case Node::Kind::Div: return eval_tree(n->lhs, x) / eval_tree(n->rhs, x);
    case Node::Kind::Pow: return std::pow(eval_tree(n->lhs, x), eval_tree(n->rhs, x));
    case Node::Kind::Call: return apply(n->fn, eval_tree(n->lhs, x));
  }
  return 0.0;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = add(lhs, term());
      else if (accept('-')) lhs = sub(lhs, term());
      else return lhs;
    }
  }
  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = mul(lhs, unary());
      else if (accept('/')) lhs = bin(Node::Kind::Div, lhs, unary());
      else return lhs;
    }
  }
  NodePtr unary() {
    if (accept('-')) return neg(unary());
    return factor();
  }
  NodePtr factor() {
    NodePtr b = base();
    if (accept('^')) return bin(Node::Kind::Pow, b, factor());
    return b;
  }
  NodePtr base() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (accept('(')) {
      NodePtr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view word = s_.substr(start, pos_ - start);
      if (word == "x") return var();
      static constexpr std::array<Fn, 7> fns = {Fn::Abs, Fn::Sin, Fn::Cos, Fn::Exp,
                                                Fn::Log, Fn::Floor, Fn::Sqrt};
      for (Fn f : fns) {
        if (word == fn_name(f)) {
          expect('(');
          NodePtr arg = expr();
          expect(')');
          return call(f, arg);
        }
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }
  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    if (pos_ - start == 1 && s_[start] == '.') {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        while (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) ++p;
        pos_ = p;
      }
    }
    return num(std::strtod(std::string(s_.substr(start, pos_ - start)).c_str(), nullptr));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline NodePtr parse(std::string_view source) { return detail::Parser(source).parse(); }

inline NodePtr derivative(const NodePtr& n) {
  using namespace detail;
  using K = Node::Kind;
  switch (n->kind) {
    case K::Num: return num(0.0);
    case K::Var: return num(1.0);
    case K::Neg: return neg(derivative(n->lhs));
    case K::Add: return add(derivative(n->lhs), derivative(n->rhs));
    case K::Sub: return sub(derivative(n->lhs), derivative(n->rhs));
    case K::Mul:
      return add(mul(derivative(n->lhs), n->rhs), mul(n->lhs, derivative(n->rhs)));
    case K::Div:
      return div(sub(mul(derivative(n->lhs), n->rhs), mul(n->lhs, derivative(n->rhs))),
                 pow(n->rhs, num(2.0)));
    case K::Pow: {
      const NodePtr& u = n->lhs;
      const NodePtr& v = n->rhs;
      if (is_const(v)) {
        const double c = eval_tree(v, 0.0);
        return mul(mul(num(c), pow(u, num(c - 1.0))), derivative(u));
      }
      if (is_const(u)) return mul(mul(n, call(Fn::Log, u)), derivative(v));
      return mul(n, add(mul(derivative(v), call(Fn::Log, u)),
                        div(mul(v, derivative(u)), u)));
    }
    case K::Call: {
      const NodePtr& u = n->lhs;
      const NodePtr du = derivative(u);
      switch (n->fn) {
        case Fn::Abs: return mul(call(Fn::Sign, u), du);
        case Fn::Sin: return mul(call(Fn::Cos, u), du);
        case Fn::Cos: return neg(mul(call(Fn::Sin, u), du));
        case Fn::Exp: return mul(n, du);
        case Fn::Log: return div(du, u);
        case Fn::Floor:
        case Fn::Sign: return num(0.0);
        case Fn::Sqrt: return div(du, mul(num(2.0), n));
      }
    }
  }
  return num(0.0);
}

inline void print(std::ostream& os, const NodePtr& n) {
  using K = Node::Kind;
  switch (n->kind) {
    case K::Num: os << n->value; return;
    case K::Var: os << 'x'; return;
    case K::Neg: os << "(-"; print(os, n->lhs); os << ')'; return;
    case K::Call: os << fn_name(n->fn) << '('; print(os, n->lhs); os << ')'; return;
    default: break;
  }
  const char op = n->kind == K::Add ? '+' : n->kind == K::Sub ? '-' : n->kind == K::Mul ? '*'
                : n->kind == K::Div ? '/' : '^';
  os << '(';
  print(os, n->lhs);
  os << op;
  print(os, n->rhs);
  os << ')';
}

inline std::string to_string(const NodePtr& n) {
  std::ostringstream os;
  os.precision(17);
  print(os, n);
  return os.str();
}

inline bool uses(const NodePtr& n, Fn f) {
  if (!n) return false;
  if (n->kind == Node::Kind::Call && n->fn == f) return true;
  return uses(n->lhs, f) || uses(n->rhs, f);
}

/// Flat postfix program compiled from a tree.
class Program {
 public:
  Program() = default;
  explicit Program(const NodePtr& root) {
    int depth = 0;
    emit(root, depth);
  }

  double operator()(double x) const {
    std::array<double, kStack> st;
    int sp = 0;
    for (const Op& op : ops_) {
      switch (op.code) {
        case Code::Num: st[sp++] = op.value; break;
        case Code::Var: st[sp++] = x; break;
        case Code::Neg: st[sp - 1] = -st[sp - 1]; break;
        case Code::Add: --sp; st[sp - 1] += st[sp]; break;
        case Code::Sub: --sp; st[sp - 1] -= st[sp]; break;
        case Code::Mul: --sp; st[sp - 1] *= st[sp]; break;
        case Code::Div: --sp; st[sp - 1] /= st[sp]; break;
        case Code::Pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
        case Code::Call: st[sp - 1] = detail::apply(op.fn, st[sp - 1]); break;
      }
    }
    return sp == 1 ? st[0] : 0.0;
  }

 private:
  static constexpr int kStack = 64;
  enum class Code { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
  struct Op {
    Code code;
    double value = 0.0;
    Fn fn = Fn::Abs;
  };

  void emit(const NodePtr& n, int& depth) {
    using K = Node::Kind;
    switch (n->kind) {
      case K::Num: push({Code::Num, n->value}, depth, +1); return;
      case K::Var: push({Code::Var}, depth, +1); return;
      case K::Neg: emit(n->lhs, depth); ops_.push_back({Code::Neg}); return;
      case K::Call: emit(n->lhs, depth); ops_.push_back({Code::Call, 0.0, n->fn}); return;
      default: break;
    }
    emit(n->lhs, depth);
    emit(n->rhs, depth);
    const Code c = n->kind == K::Add ? Code::Add : n->kind == K::Sub ? Code::Sub
                 : n->kind == K::Mul ? Code::Mul : n->kind == K::Div ? Code::Div : Code::Pow;
    push({c}, depth, -1);
  }
  void push(Op op, int& depth, int delta) {
    ops_.push_back(op);
    depth += delta;
    if (depth > kStack) throw DomainError("expression too deeply nested");
  }

  std::vector<Op> ops_;
};

/// A parsed expression with its compiled value and derivative programs.
class Expression {
 public:
  Expression() = default;
  explicit Expression(std::string source)
      : source_(std::move(source)),
        tree_(parse(source_)),
        dtree_(expr::derivative(tree_)),
        value_(tree_),
        deriv_(dtree_) {}

  const std::string& source() const { return source_; }
  const NodePtr& tree() const { return tree_; }
  const NodePtr& derivative_tree() const { return dtree_; }
  double operator()(double x) const { return value_(x); }
  double derivative(double x) const { return deriv_(x); }
  bool uses(Fn f) const { return expr::uses(tree_, f); }

 private:
  std::string source_;
  NodePtr tree_, dtree_;
  Program value_, deriv_;
};

}  // namespace hardy::expr
