#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "thinflow/expression.hpp"
#include "thinflow/smooth_function.hpp"

using namespace thinflow;

TEST(SmoothFunction, CompositionDerivatives) {
    const SmoothFunction1D x = SmoothFunction1D::identity();
    const SmoothFunction1D f = exp(sin(x));
    const double t = 0.4, s = std::sin(t), c = std::cos(t), e = std::exp(s);
    EXPECT_NEAR(f(t), e, 1e-15);
    EXPECT_NEAR(f.derivative(t, 1), c * e, 1e-14);
    EXPECT_NEAR(f.derivative(t, 2), (c * c - s) * e, 1e-14);
    EXPECT_NEAR(f.derivative(t, 3), (c * c * c - 3 * s * c - c) * e, 1e-13);
}

TEST(SmoothFunction, QuotientAndPower) {
    const SmoothFunction1D x = SmoothFunction1D::identity();
    const SmoothFunction1D f = SmoothFunction1D::constant(1.0) / (2.0 + x);
    EXPECT_NEAR(f.derivative(1.0, 2), 2.0 / 27.0, 1e-15);
    const SmoothFunction1D g = pow(1.0 + x, 1.5);
    EXPECT_NEAR(g.derivative(3.0, 1), 1.5 * 2.0, 1e-14);
}

TEST(SmoothFunction, DerivativeNodeMatchesJet) {
    const SmoothFunction1D f = parse_expression("cos(3*x) * (1 + x^2)");
    const SmoothFunction1D df = f.d(2);
    for (double t : {-0.3, 0.2, 1.1}) EXPECT_NEAR(df(t), f.derivative(t, 2), 1e-12);
}

TEST(SmoothFunction, IntegralAgainstClosedForm) {
    const SmoothFunction1D f = parse_expression("cos(x)");
    const SmoothFunction1D F = integral(f, 0.0, 0.0, 2.0);
    for (double t : {0.0, 0.5, 1.3, 2.0}) EXPECT_NEAR(F(t), std::sin(t), 1e-13);
    EXPECT_NEAR(F.derivative(0.7, 1), std::cos(0.7), 1e-15);
    EXPECT_NEAR(integrate(f, 0.0, 1.0), std::sin(1.0), 1e-14);
    EXPECT_NEAR(integrate([](double t) { return t * t; }, -1.0, 2.0), 3.0, 1e-14);
}

TEST(SmoothFunction, RampProperties) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 1.5);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng);
        const double r = smooth_ramp(0.0, 1.0, x);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0);
        EXPECT_NEAR(r + smooth_ramp(0.0, 1.0, 1.0 - x), 1.0, 1e-15);
        const double q = smoothstep5(0.0, 1.0, x);
        EXPECT_NEAR(q + smoothstep5(0.0, 1.0, 1.0 - x), 1.0, 1e-14);
    }
    EXPECT_EQ(smooth_ramp(0.2, 0.4, 0.2), 0.0);
    EXPECT_EQ(smooth_ramp(0.2, 0.4, 0.4), 1.0);
    EXPECT_EQ(smoothstep5(0.2, 0.4, 0.1), 0.0);
    EXPECT_EQ(smoothstep5(0.2, 0.4, 0.5), 1.0);
    // agreement of the scalar and expression ramps
    const SmoothFunction1D s = SmoothFunction1D::smoothstep(0.2, 0.4, SmoothFunction1D::identity());
    for (double x : {0.21, 0.3, 0.37}) EXPECT_NEAR(s(x), smooth_ramp(0.2, 0.4, x), 1e-15);
}

TEST(SmoothFunction, SampledInterpolation) {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 200; ++i) {
        xs.push_back(i / 200.0);
        ys.push_back(std::sin(xs.back()));
    }
    const SmoothFunction1D f = SmoothFunction1D::sampled(xs, ys);
    EXPECT_NEAR(f(0.3333), std::sin(0.3333), 1e-11);
    EXPECT_NEAR(f.derivative(0.5, 1), std::cos(0.5), 1e-8);
    EXPECT_LE(f.max_order(), 5);
}

TEST(SmoothFunction, PeriodicityCheck) {
    EXPECT_TRUE(is_periodic(parse_expression("2 + sin(2*pi*x)"), 1.0, 4, 1e-10));
    EXPECT_FALSE(is_periodic(parse_expression("2 + x"), 1.0, 2, 1e-10));
    EXPECT_NEAR(max_abs_on(parse_expression("sin(2*pi*x)"), 0.0, 1.0, 257), 1.0, 1e-12);
}
