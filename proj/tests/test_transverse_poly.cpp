#include <gtest/gtest.h>

#include <random>

#include "thinflow/transverse_poly.hpp"

using namespace thinflow;

namespace {

TransversePoly random_poly(std::mt19937& rng, int degree) {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    std::vector<double> c(degree + 1);
    for (auto& v : c) v = d(rng);
    return TransversePoly(c);
}

// Simpson on (-1/2, 1/2) with many panels, exact for cubics and plenty
// accurate for the low degrees used here.
double simpson(const TransversePoly& p, int n = 2000) {
    const double h = 1.0 / n;
    double s = p(-0.5) + p(0.5);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * p(-0.5 + i * h);
    return s * h / 3.0;
}

}  // namespace

TEST(TransversePoly, N1Identities) {
    const TransversePoly n = n1();
    EXPECT_NEAR(n.derivative(2)(0.3), 1.0, 1e-15);
    EXPECT_EQ(n.derivative(2).degree(), 0);
    EXPECT_NEAR(n(-0.5), 0.0, 1e-15);
    EXPECT_NEAR(n(0.5), 0.0, 1e-15);
    EXPECT_NEAR(mean2(n), -1.0 / 12.0, 1e-15);
}

TEST(TransversePoly, N2EndValue) {
    EXPECT_NEAR(n2()(0.5), -1.0 / 12.0, 1e-15);
    EXPECT_NEAR(n2()(-0.5), 0.0, 1e-15);
    EXPECT_NEAR(n2().derivative()(0.1), n1()(0.1), 1e-15);
}

TEST(TransversePoly, RConstantMatchesSymbolicValue) {
    // integral over (-1/2, 1/2) of the solution of q'' = N1 - <N1>,
    // q(+-1/2) = 0, worked out symbolically: 1/720.
    EXPECT_NEAR(r_constant(), 1.0 / 720.0, 1e-15);
    EXPECT_NE(r_constant(), 0.0);
}

TEST(TransversePoly, ArithmeticAndTrim) {
    const TransversePoly a{1.0, 2.0}, b{-1.0, -2.0};
    EXPECT_TRUE((a + b).is_zero());
    EXPECT_EQ((a + b).degree(), -1);
    const TransversePoly c = a * TransversePoly{0.0, 1.0};
    EXPECT_EQ(c, (TransversePoly{0.0, 1.0, 2.0}));
    EXPECT_NEAR(TransversePoly::monomial(3, 2.0)(0.5), 0.25, 1e-15);
    EXPECT_EQ(TransversePoly::constant(0.0).degree(), -1);
}

TEST(TransversePoly, InverseOperatorsProperties) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const TransversePoly p = random_poly(rng, trial % 7);
        const TransversePoly a = d_inv(p);
        EXPECT_NEAR(a(-0.5), 0.0, 1e-14);
        for (double x : {-0.4, 0.0, 0.37}) EXPECT_NEAR(a.derivative()(x), p(x), 1e-13);

        const TransversePoly t = d_inv_tilde(p);
        EXPECT_NEAR(mean2(t), 0.0, 1e-14);
        EXPECT_NEAR(t.derivative()(0.2), p(0.2), 1e-13);

        const TransversePoly q = d_inv2(p);
        EXPECT_NEAR(q(-0.5), 0.0, 1e-14);
        EXPECT_NEAR(q(0.5), 0.0, 1e-14);
        for (double x : {-0.3, 0.1, 0.45}) EXPECT_NEAR(q.derivative(2)(x), p(x), 1e-12);

        EXPECT_NEAR(mean2(p), simpson(p), 1e-12);
    }
}

TEST(TransversePoly, AntiderivativeAnchor) {
    const TransversePoly p{1.0, 0.0, 3.0};
    const TransversePoly a = p.antiderivative(0.25);
    EXPECT_NEAR(a(0.25), 0.0, 1e-15);
    EXPECT_NEAR(a(0.5) - a(-0.5), mean2(p), 1e-15);
}
