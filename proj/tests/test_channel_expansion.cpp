#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "thinflow/channel_expansion.hpp"
#include "thinflow/errors.hpp"
#include "thinflow/expression.hpp"
#include "support/oracles.hpp"

using namespace thinflow;

namespace {

ChannelProblem periodic_problem(const std::string& nu, const std::string& f1) {
    ChannelProblem cp;
    cp.kind = ExpansionCase::Periodic;
    cp.viscosity = {parse_expression(nu), 1.0, true, 0.0};
    cp.f1 = parse_expression(f1);
    return cp;
}

ChannelProblem rectangle_problem() {
    ChannelProblem cp;
    cp.kind = ExpansionCase::Dirichlet;
    cp.viscosity = {parse_expression("2*x + 2"), 1.0, false, 0.0};
    cp.f1 = parse_expression("0");
    cp.phi_in = parse_expression("0.25 - x^2");
    cp.phi_out = cp.phi_in;
    return cp;
}

ChannelProblem dirichlet_problem() {
    ChannelProblem cp;
    cp.kind = ExpansionCase::Dirichlet;
    cp.viscosity = {parse_expression("2 + smoothstep(0.2, 0.4, x) * (1 - smoothstep(0.6, 0.8, x))"), 1.0, false,
                    0.2};
    cp.f1 = parse_expression("smoothstep(0.25, 0.45, x) * (1 - smoothstep(0.55, 0.75, x))");
    cp.phi_in = parse_expression("5 * (0.25 - x^2)^2");
    cp.phi_out = parse_expression("2.5 * (0.25 - x^2)^2 + 0.5 * (0.25 - x^2)");
    return cp;
}

}  // namespace

TEST(ChannelExpansion, PeriodicQ0MatchesClosedFormForRandomData) {
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double b = 0.6 * u(rng), c = 0.3 * u(rng), ph = 3.0 * u(rng);
        const double a = 1.2 + std::abs(b) + std::abs(c);
        const double d = u(rng), e = u(rng);
        std::ostringstream nu, f1;
        nu.precision(17);
        f1.precision(17);
        nu << a << " + " << b << " * sin(2*pi*x + " << ph << ") + " << c << " * cos(4*pi*x)";
        f1 << d << " + " << e << " * cos(2*pi*x)";
        const ExpansionSet set = build_expansion(periodic_problem(nu.str(), f1.str()), 1);
        const auto& cp = set.problem();
        for (double x : {0.0, 0.13, 0.5, 0.77, 1.0})
            EXPECT_NEAR(set.level(0).q(x), oracle::periodic_q0(cp.viscosity.nu, cp.f1, x), 1e-10)
                << nu.str() << " | " << f1.str() << " at " << x;
        // the next pressure level vanishes identically
        for (double x : {0.0, 0.31, 0.62, 0.9}) EXPECT_NEAR(set.level(1).q(x), 0.0, 1e-12);
    }
}

TEST(ChannelExpansion, RectangleQ0ClosedForm) {
    const ExpansionSet set = build_expansion(rectangle_problem(), 0);
    for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0;
        EXPECT_NEAR(set.level(0).q(x), -x * (x + 2.0) + 3.0, 1e-10);
    }
    EXPECT_NEAR(set.level(0).flux, 1.0 / 6.0, 1e-14);
}

TEST(ChannelExpansion, RectangleLevelZeroVelocityIsTheInflowParabola) {
    const ExpansionSet set = build_expansion(rectangle_problem(), 0);
    const double eps = 0.1;
    for (double x : {0.0, 0.4, 1.0})
        for (double y : {-0.05, -0.02, 0.0, 0.03}) {
            const double xi = y / eps;
            const auto v = set.evaluate(eps, x, y);
            EXPECT_NEAR(v[0], eps * eps * (0.25 - xi * xi), 1e-15);
            EXPECT_NEAR(v[1], 0.0, 1e-15);
            EXPECT_NEAR(v[2], -x * (x + 2.0) + 3.0, 1e-10);
        }
}

TEST(ChannelExpansion, LevelIdentitiesUpToOrderThree) {
    for (const ChannelProblem& cp :
         {periodic_problem("2 + sin(2*pi*x)", "1 + 0.5 * cos(2*pi*x)"), dirichlet_problem()}) {
        const ExpansionSet set = build_expansion(cp, 3);
        const auto checks = check_levels(set);
        ASSERT_EQ(checks.size(), 4u);
        for (const auto& c : checks) {
            EXPECT_LE(c.incompressibility, 1e-10) << "level " << c.level;
            EXPECT_LE(c.momentum1, 1e-10) << "level " << c.level;
            EXPECT_LE(c.momentum2, 1e-10) << "level " << c.level;
            EXPECT_LE(c.wall, 1e-10) << "level " << c.level;
            EXPECT_LE(c.flux_variation, 1e-10) << "level " << c.level;
        }
    }
}

TEST(ChannelExpansion, PressureCorrectionsHaveZeroTransverseMean) {
    const ExpansionSet set = build_expansion(dirichlet_problem(), 3);
    for (int j = 0; j <= 3; ++j)
        for (double x : {0.05, 0.5, 0.93}) EXPECT_NEAR(mean2(set.p(j).at(x)), 0.0, 1e-12) << j;
}

TEST(ChannelExpansion, FluxIsConstantAlongTheChannel) {
    const ExpansionSet set = build_expansion(dirichlet_problem(), 2);
    const double F = integrate(set.problem().phi_in, -0.5, 0.5);
    EXPECT_NEAR(set.level(0).flux, F, 1e-13);
    for (double x : {0.0, 0.3, 0.61, 1.0}) EXPECT_NEAR(mean2(set.u1(0).at(x)), F, 1e-12);
}

TEST(ChannelExpansion, CrossSectionMatchesPointEvaluation) {
    const ExpansionSet set = build_expansion(dirichlet_problem(), 2);
    const double eps = 0.05, x = 0.47;
    const CrossSection cs = set.cross_section(eps, x);
    for (double y : {-0.02, 0.0, 0.011}) {
        const auto v = set.evaluate(eps, x, y);
        EXPECT_NEAR(cs.u1(y / eps), v[0], 1e-15);
        EXPECT_NEAR(cs.u2(y / eps), v[1], 1e-15);
        EXPECT_NEAR(cs.p(y / eps), v[2], 1e-12);
    }
}

TEST(ChannelExpansion, ResidualHasALimitAsEpsVanishes) {
    // F^k = sum_s eps^s e[s], so it tends to the e[0] term
    const ExpansionSet set = build_expansion(periodic_problem("2 + sin(2*pi*x)", "1"), 2);
    const ResidualField r = residual_fk(set);
    const auto a = r.at(1e-4, 0.3, 0.2), b = r.at(1e-5, 0.3, 0.2);
    EXPECT_TRUE(std::isfinite(a[0]) && std::isfinite(a[1]));
    EXPECT_NEAR(a[0], b[0], 1e-3 * (1.0 + std::abs(b[0])));
    EXPECT_NEAR(a[1], b[1], 1e-3 * (1.0 + std::abs(b[1])));
}

TEST(ChannelExpansion, ValidationRejectsBadData) {
    ChannelProblem cp = periodic_problem("2 + x", "1");
    EXPECT_THROW(build_expansion(cp, 0), ValidationError);
    cp = periodic_problem("x - 1", "1");
    EXPECT_THROW(build_expansion(cp, 0), ValidationError);
    cp = dirichlet_problem();
    cp.viscosity.rho = 0.6;
    EXPECT_THROW(build_expansion(cp, 0), ValidationError);
    cp = dirichlet_problem();
    cp.phi_out = parse_expression("2 * (0.25 - x^2)");  // flux 1/3 against 1/6
    EXPECT_THROW(build_expansion(cp, 0), ValidationError);
    EXPECT_THROW(build_expansion(dirichlet_problem(), -1), ValidationError);
}

TEST(ChannelExpansion, SampledViscosityLimitsTheOrder) {
    std::vector<double> xs, ys;
    for (int i = 0; i <= 100; ++i) {
        xs.push_back(i / 100.0);
        ys.push_back(2.0 + std::sin(2 * M_PI * xs.back()));
    }
    ChannelProblem cp = periodic_problem("1", "1");
    cp.viscosity.nu = SmoothFunction1D::sampled(xs, ys);
    EXPECT_THROW(build_expansion(cp, 6), OrderOverflow);
}
