#include <gtest/gtest.h>

#include <cmath>

#include "stable_sde/coeff_lang.hpp"

using namespace stable_sde;

TEST(CoeffLang, EvaluatesExamples) {
  EXPECT_DOUBLE_EQ(evaluate(parse("1+min(abs(x)^0.666667,5)"), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("1+min(abs(x)^0.666667,5)"), 1.0), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("sign(x)*abs(x)^0.25"), -16.0), -2.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("2^3^2"), 0.0), 512.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("clamp(x,-1,1)"), 3.0), 1.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("abs(x)"), -2.5), 2.5);
  EXPECT_DOUBLE_EQ(evaluate(parse("-2^2"), 0.0), -4.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("2^-1"), 0.0), 0.5);
  EXPECT_DOUBLE_EQ(evaluate(parse(" 1 - 2 - 3 "), 0.0), -4.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("8/2/2"), 0.0), 2.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("pow(x, 2) + exp(0) + log(1)"), 3.0), 10.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("max(x, 1.5e1)"), 3.0), 15.0);
  EXPECT_DOUBLE_EQ(evaluate(parse("(-8)^(1/3*3)"), 0.0), -8.0);
}

TEST(CoeffLang, SyntaxDiagnostics) {
  try {
    parse("1 + * 2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
    EXPECT_EQ(e.offset(), 4u);
    EXPECT_FALSE(e.expected().empty());
  }
  try {
    parse("1 + y");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownIdentifier);
    EXPECT_EQ(e.offset(), 4u);
  }
  for (const char* bad : {"", "(1", "min(1)", "clamp(1,2)", "abs 1", "1 2", "x)", "3..4", "exp()"})
    EXPECT_THROW(parse(bad), ParseError) << bad;
}

TEST(CoeffLang, EvalErrorsAreNeverNaN) {
  auto kind = [](const char* text, double x) {
    try {
      evaluate(parse(text), x);
    } catch (const EvalFailure& e) {
      return e.kind();
    }
    return ErrorKind::IoError;
  };
  EXPECT_EQ(kind("x/x", 0.0), ErrorKind::EvalError);
  EXPECT_EQ(kind("log(x)", 0.0), ErrorKind::EvalError);
  EXPECT_EQ(kind("log(x)", -1.0), ErrorKind::EvalError);
  EXPECT_EQ(kind("x^0.5", -1.0), ErrorKind::EvalError);
  EXPECT_EQ(kind("exp(x)", 1000.0), ErrorKind::EvalError);
  EXPECT_EQ(kind("x^-1", 0.0), ErrorKind::EvalError);
  try {
    evaluate(parse("1 + 1/(x-2)"), 2.0);
    FAIL();
  } catch (const EvalFailure& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
}

TEST(CoeffLang, PrintRoundTrip) {
  for (const char* text : {"1+min(abs(x)^0.666667,5)", "sign(x)*abs(x)^0.25", "2^3^2", "-x^2", "(-x)^2",
                           "1.5-0.5*clamp(sign(x)*abs(x)^(1/4),-1,1)", "exp(-x)/(1+x*x)", "pow(x,3)-1e-300",
                           "0.1*min(abs(x),10)+1", "--x"}) {
    const Expr e = parse(text);
    const std::string printed = print(e);
    const Expr again = parse(printed);
    EXPECT_TRUE(structurally_equal(e, again)) << text << " -> " << printed;
    EXPECT_EQ(print(again), printed);
    for (double x : {-3.0, -0.5, 0.25, 2.0}) {
      if (std::string(text) != "pow(x,3)-1e-300" || x != 0) {
        EXPECT_EQ(evaluate(e, x), evaluate(again, x));
      }
    }
  }
  EXPECT_FALSE(structurally_equal(parse("-x^2"), parse("(-x)^2")));
}

TEST(CoeffLang, DeriveGamma) {
  const auto g = derive_gamma(parse("2"), 0.75);
  EXPECT_NEAR(g(0.3), 1.681792830507429, 1e-15);
  EXPECT_EQ(derive_gamma(parse("0"), 1.5)(4.0), 0.0);
  EXPECT_EQ(derive_gamma(parse("-1"), 1.5)(4.0), -1.0);
  EXPECT_EQ(derive_gamma(parse("-1"), 0.3)(4.0), -1.0);
  EXPECT_THROW(derive_gamma(parse("x"), 1.0), Error);
}

TEST(CoeffLang, GammaSignMatchesSigma) {
  Rng rng(99);
  for (const char* text : {"1+min(abs(x)^0.666667,5)", "x", "sign(x)*abs(x)^0.25 - 0.3", "clamp(x,-1,1)*exp(-x*x)"}) {
    const Expr sigma = parse(text);
    for (double alpha : {0.75, 1.5}) {
      const auto gamma = derive_gamma(sigma, alpha);
      for (int i = 0; i < 10000; ++i) {
        const double x = 20.0 * rng.uniform_open() - 10.0;
        const double s = evaluate(sigma, x), g = gamma(x);
        EXPECT_EQ(sign_of(s), sign_of(g));
      }
    }
  }
}

TEST(HolderEstimate, RecoversKnownIndices) {
  const auto lin = empirical_holder_estimate([](double x) { return x; }, 0.0, 1.0, 4000, 1);
  EXPECT_NEAR(lin.index, 1.0, 0.05);
  EXPECT_NEAR(lin.constant, 1.0, 1e-9);
  const auto root = empirical_holder_estimate(evaluator(parse("abs(x)^0.5")), -1.0, 1.0, 4000, 2);
  EXPECT_NEAR(root.index, 0.5, 0.05);
  EXPECT_FALSE(root.degenerate);
  const auto e1 = empirical_holder_estimate(evaluator(parse("1+min(abs(x)^(2/3),5)")), -2.0, 2.0, 4000, 3, 2.0 / 3);
  EXPECT_NEAR(e1.index, 2.0 / 3.0, 0.05);
  EXPECT_FALSE(e1.contradicts_declared);
  const auto flagged = empirical_holder_estimate(evaluator(parse("abs(x)^0.3")), -1.0, 1.0, 4000, 4, 0.6);
  EXPECT_TRUE(flagged.contradicts_declared);
}

TEST(HolderEstimate, DegenerateAndArguments) {
  const auto flat = empirical_holder_estimate([](double) { return 3.0; }, 0.0, 1.0, 1000, 5);
  EXPECT_TRUE(flat.degenerate);
  EXPECT_TRUE(std::isinf(flat.index));
  EXPECT_THROW(empirical_holder_estimate([](double x) { return x; }, 1.0, 0.0, 1000, 5), Error);
  EXPECT_THROW(empirical_holder_estimate([](double x) { return x; }, 0.0, 1.0, 999, 5), Error);
}
