#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hardy/expression.hpp"

using namespace hardy;
using hardy::expr::Expression;

TEST(Expression, Precedence) {
  EXPECT_DOUBLE_EQ(Expression("1+2*3")(0), 7.0);
  EXPECT_DOUBLE_EQ(Expression("(1+2)*3")(0), 9.0);
  EXPECT_DOUBLE_EQ(Expression("2^3^2")(0), 512.0);  // right-associative
  EXPECT_DOUBLE_EQ(Expression("-2^2")(0), -4.0);
  EXPECT_DOUBLE_EQ(Expression("8/4/2")(0), 1.0);
  EXPECT_DOUBLE_EQ(Expression("1-2-3")(0), -4.0);
  EXPECT_DOUBLE_EQ(Expression("--x")(3.5), 3.5);
  EXPECT_DOUBLE_EQ(Expression("1.5e2 + .5")(0), 150.5);
}

TEST(Expression, Functions) {
  const double x = 0.7;
  EXPECT_DOUBLE_EQ(Expression("abs(x-1)")(x), std::abs(x - 1));
  EXPECT_DOUBLE_EQ(Expression("sin(x)+cos(x)")(x), std::sin(x) + std::cos(x));
  EXPECT_DOUBLE_EQ(Expression("exp(log(x))")(x), std::exp(std::log(x)));
  EXPECT_DOUBLE_EQ(Expression("floor(x*10)")(x), 7.0);
  EXPECT_DOUBLE_EQ(Expression("sqrt(x)")(x), std::sqrt(x));
}

TEST(Expression, SinPowerValue) {
  const double x = std::numbers::pi / 2;
  EXPECT_NEAR(Expression("abs(x + sin(x))^2")(x), (x + 1.0) * (x + 1.0), 1e-14);
}

TEST(Expression, ParseErrorsCarryPosition) {
  auto pos = [](const char* s) {
    try {
      expr::parse(s);
    } catch (const ParseError& e) {
      return static_cast<long>(e.position());
    }
    return -1L;
  };
  EXPECT_EQ(pos("1 + * 2"), 4);
  EXPECT_EQ(pos("sin x"), 4);
  EXPECT_EQ(pos("foo(x)"), 0);
  EXPECT_EQ(pos("(x + 1"), 6);
  EXPECT_EQ(pos("x 2"), 2);
  EXPECT_EQ(pos(""), 0);
  EXPECT_EQ(pos("y"), 0);
  EXPECT_EQ(pos("sign(x)"), 0);  // internal only
}

TEST(Expression, DerivativeMatchesFiniteDifference) {
  const char* corpus[] = {"abs(x + sin(x))^2.5", "x^3 - 2*x", "exp(-x^2/2)*cos(3*x)",
                          "log(1 + x^2)", "sqrt(1 + x^2)", "2^x", "x^x",
                          "sin(x)/(2 + cos(x))", "abs(x)^1.5 + (x+1)^2"};
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(0.3, 4.0);
  for (const char* src : corpus) {
    Expression e(src);
    for (int i = 0; i < 100; ++i) {
      const double x = U(gen);
      const double h = 1e-6 * std::max(1.0, std::abs(x));
      const double fd = (e(x + h) - e(x - h)) / (2 * h);
      EXPECT_NEAR(e.derivative(x), fd, 1e-5 * std::max(1.0, std::abs(fd))) << src << " at " << x;
    }
  }
}

TEST(Expression, DerivativeOfFloorIsZero) {
  Expression e("floor(x) + x");
  EXPECT_DOUBLE_EQ(e.derivative(2.5), 1.0);
  EXPECT_TRUE(e.uses(expr::Fn::Floor));
  EXPECT_FALSE(e.uses(expr::Fn::Sin));
}

TEST(Expression, TreeRoundTrip) {
  Expression e("abs(x + 0.5*sin(x))^1.5");
  Expression again(expr::to_string(e.tree()));
  for (double x : {-3.0, -0.1, 0.0, 2.0, 7.5}) EXPECT_DOUBLE_EQ(e(x), again(x));
}

TEST(Expression, ConstantFolding) {
  auto t = expr::parse("2*3 + x*0");
  EXPECT_EQ(expr::to_string(t), "6");
}
