#include <gtest/gtest.h>

#include <cmath>

#include "thinflow/errors.hpp"
#include "thinflow/expression.hpp"

using namespace thinflow;

TEST(Expression, ArithmeticAndPrecedence) {
    EXPECT_DOUBLE_EQ(parse_expression("1 + 2*3")(0.0), 7.0);
    EXPECT_DOUBLE_EQ(parse_expression("2^3^2")(0.0), 512.0);
    EXPECT_DOUBLE_EQ(parse_expression("-2^2")(0.0), -4.0);
    EXPECT_DOUBLE_EQ(parse_expression("(1 - x) / 4")(0.2), 0.2);
    EXPECT_DOUBLE_EQ(parse_expression("2*x + 2")(0.5), 3.0);
    EXPECT_NEAR(parse_expression("pi")(0.0), M_PI, 1e-15);
    EXPECT_NEAR(parse_expression("1e-3 * x")(2.0), 2e-3, 1e-18);
}

TEST(Expression, Functions) {
    const double x = 0.3;
    EXPECT_NEAR(parse_expression("sin(2*pi*x)")(x), std::sin(2 * M_PI * x), 1e-15);
    EXPECT_NEAR(parse_expression("cos(x) * exp(x)")(x), std::cos(x) * std::exp(x), 1e-15);
    EXPECT_NEAR(parse_expression("log(1 + x) + sqrt(x)")(x), std::log(1 + x) + std::sqrt(x), 1e-15);
}

TEST(Expression, DerivativesAreExact) {
    const SmoothFunction1D f = parse_expression("sin(2*pi*x)");
    const double x = 0.17, w = 2 * M_PI;
    EXPECT_NEAR(f.derivative(x, 1), w * std::cos(w * x), 1e-12);
    EXPECT_NEAR(f.derivative(x, 2), -w * w * std::sin(w * x), 1e-11);
    EXPECT_NEAR(f.derivative(x, 5), std::pow(w, 5) * std::cos(w * x), 1e-8);

    const SmoothFunction1D g = parse_expression("x^3 - 2*x");
    EXPECT_NEAR(g.derivative(2.0, 1), 10.0, 1e-13);
    EXPECT_NEAR(g.derivative(2.0, 3), 6.0, 1e-13);
    EXPECT_NEAR(g.derivative(2.0, 4), 0.0, 1e-13);
}

TEST(Expression, SmoothstepPrimitive) {
    const SmoothFunction1D s = parse_expression("smoothstep(0.2, 0.4, x)");
    EXPECT_EQ(s(0.1), 0.0);
    EXPECT_EQ(s(0.5), 1.0);
    EXPECT_NEAR(s(0.3), 0.5, 1e-15);
    // flat to all orders at the ends
    for (int m = 1; m <= 6; ++m) {
        EXPECT_EQ(s.derivative(0.15, m), 0.0);
        EXPECT_EQ(s.derivative(0.45, m), 0.0);
    }
    EXPECT_GT(s.derivative(0.3, 1), 0.0);
}

TEST(Expression, ConstantsAreDetected) {
    EXPECT_EQ(parse_expression("3").constant_value().value_or(-1.0), 3.0);
    EXPECT_TRUE(parse_expression("0").is_zero());
    EXPECT_FALSE(parse_expression("x").constant_value().has_value());
}

TEST(Expression, MalformedInputThrows) {
    for (const char* bad : {"", "1 +", "sin(x", "foo(x)", "2 ** 3", "y", "smoothstep(1, x)", "((x)"})
        EXPECT_THROW(parse_expression(bad), ValidationError) << bad;
}
