#include <gtest/gtest.h>

#include <cmath>

#include "thinflow/boundary_layers.hpp"
#include "thinflow/errors.hpp"
#include "thinflow/expression.hpp"

using namespace thinflow;

namespace {

// Inlet with zero mean: (1/4 - t^2)(t^2 - 1/20) integrates to 0.
double balanced(double t) { return 30.0 * (0.25 - t * t) * (t * t - 0.05); }

JunctionProblem tshape_junction(double truncation) {
    // fluxes -1/6, -1/6, 2/6 of the T; c = -6 F
    JunctionProblem jp;
    jp.nu0 = 2.0;
    jp.truncation = truncation;
    jp.cells_per_width = 16;
    jp.branches = {{{-1, 0}, 1.0}, {{0, 1}, 1.0}, {{0, -1}, -2.0}};
    return jp;
}

double max_abs(const MacField& f) {
    double m = 0.0;
    for (double v : f.u1_data()) m = std::max(m, std::abs(v));
    for (double v : f.u2_data()) m = std::max(m, std::abs(v));
    for (double v : f.p_data()) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(BoundaryLayers, ZeroInletGivesZeroLayer) {
    HalfStripProblem hp;
    hp.truncation = 6.0;
    const LayerSolution l = solve_half_strip(hp);
    EXPECT_TRUE(l.zero);
    EXPECT_EQ(half_strip_value(l, 1.0, 0.1), (std::array<double, 3>{0.0, 0.0, 0.0}));

    JunctionProblem jp = tshape_junction(6.0);
    for (auto& b : jp.branches) b.c = 0.0;
    const JunctionSolution js = solve_junction(jp);
    EXPECT_TRUE(js.layer.zero);
    for (double p : js.next_level_d()) EXPECT_EQ(p, 0.0);
}

TEST(BoundaryLayers, MatchingInflowGivesZeroEndLayers) {
    // inflow equal to the level-0 profile: no mismatch at either end
    ChannelProblem cp;
    cp.kind = ExpansionCase::Dirichlet;
    cp.viscosity = {parse_expression("2*x + 2"), 1.0, false, 0.0};
    cp.phi_in = parse_expression("0.25 - x^2");
    cp.phi_out = cp.phi_in;
    const ExpansionSet set = build_expansion(cp, 0);
    const ChannelLayers layers = solve_channel_layers(set, 0.1, 8);
    ASSERT_EQ(layers.left.size(), 1u);
    EXPECT_LE(max_abs(layers.left[0].field), 1e-15);
    EXPECT_LE(max_abs(layers.right[0].field), 1e-15);
}

TEST(BoundaryLayers, CompatibilityIsEnforced) {
    HalfStripProblem hp;
    hp.truncation = 6.0;
    hp.cells_per_width = 8;
    hp.inlet_u1 = [](double t) { return balanced(t) + 1e-10; };
    EXPECT_THROW(solve_half_strip(hp), ValidationError);
    hp.inlet_u1 = balanced;
    EXPECT_LE(std::abs(check_compatibility(hp.inlet_u1)), 1e-12);
    EXPECT_NO_THROW(solve_half_strip(hp));
}

TEST(BoundaryLayers, HalfStripDecaysExponentially) {
    HalfStripProblem hp;
    hp.nu0 = 2.0;
    hp.truncation = 10.0;
    hp.inlet_u1 = balanced;
    hp.inlet_u2 = [](double t) { return 0.25 - t * t; };
    const LayerSolution l = solve_half_strip(hp);
    EXPECT_FALSE(l.zero);
    EXPECT_GT(l.decay_rate, 1.0);
    for (size_t i = 1; i < l.station_energy.size(); ++i) EXPECT_LE(l.station_energy[i], l.station_energy[i - 1]);
    EXPECT_LE(std::abs(l.boundary_flux), 1e-14);
    EXPECT_EQ(half_strip_value(l, 11.0, 0.1), (std::array<double, 3>{0.0, 0.0, 0.0}));
}

TEST(BoundaryLayers, DecayFitRecoversRate) {
    std::vector<double> s, e;
    for (int i = 1; i <= 8; ++i) {
        s.push_back(i);
        e.push_back(3.0 * std::exp(-2.0 * 4.2 * i));  // energy ~ exp(-2 lambda s)
    }
    EXPECT_NEAR(fit_decay_rate(s, e), 4.2, 1e-10);
}

TEST(BoundaryLayers, MidpointFluxCorrection) {
    const Profile g = [](double t) { return 1.0 + t; };
    for (int cells : {4, 8, 16}) {
        const double target = -0.3;
        const Profile c = with_midpoint_flux(g, cells, target);
        double sc = 0.0, sp = 0.0;
        for (int j = 0; j < cells; ++j) {
            const double y = -0.5 + (j + 0.5) / cells;
            sc += c(y) / cells;
            sp += -12.0 * target * 0.5 * (y * y - 0.25) / cells;
        }
        EXPECT_NEAR(sc, sp, 1e-15);
    }
}

TEST(BoundaryLayers, CutoffShape) {
    const double d = std::sqrt(2.0), a = d + 1.0;
    EXPECT_EQ(layer_cutoff(0.0, d), 0.0);
    EXPECT_EQ(layer_cutoff(a, d), 0.0);
    EXPECT_EQ(layer_cutoff(a + 1.0, d), 1.0);
    EXPECT_EQ(layer_cutoff(-a - 2.0, d), 1.0);
    EXPECT_NEAR(layer_cutoff(a + 0.5, d), 0.5, 1e-15);
    EXPECT_EQ(layer_cutoff(a + 0.3, d), layer_cutoff(-a - 0.3, d));
}

TEST(BoundaryLayers, OuterConstants) {
    const Profile g = [](double t) { return 2.0 * (0.25 - t * t); };  // flux 1/3
    const OuterConstants oc = outer_constants(g, 0, 1.5, 0.25);
    EXPECT_NEAR(oc.c_hat, 4.0, 1e-14);
    EXPECT_NEAR(oc.c, -4.0, 1e-14);
    EXPECT_NEAR(oc.d_hat, -4.0 * 1.5 + 0.25, 1e-13);
    const OuterConstants hi = outer_constants(g, 1, 1.5, 0.25);
    EXPECT_EQ(hi.c_hat, 0.0);
    EXPECT_EQ(hi.d_hat, 0.25);
}

TEST(BoundaryLayers, KirchhoffBalanceOnTheT) {
    const JunctionSolution js = solve_junction(tshape_junction(8.0));
    EXPECT_LE(js.kirchhoff_residual(), 1e-10);
    ASSERT_EQ(js.next_level_d().size(), 3u);
    EXPECT_EQ(js.next_level_d()[0], 0.0);
}

TEST(BoundaryLayers, UnbalancedJunctionIsRejected) {
    JunctionProblem jp = tshape_junction(6.0);
    jp.branches[2].c = -1.0;
    EXPECT_THROW(solve_junction(jp), ValidationError);
}

TEST(BoundaryLayers, PlateausDoNotDependOnTruncation) {
    const JunctionSolution a = solve_junction(tshape_junction(8.0));
    const JunctionSolution b = solve_junction(tshape_junction(12.0));
    for (size_t j = 0; j < 3; ++j) EXPECT_NEAR(a.next_level_d()[j], b.next_level_d()[j], 1e-6) << j;
    EXPECT_GT(std::abs(a.next_level_d()[2]), 1e-3);
}

TEST(BoundaryLayers, StraightJunctionHasNoPressureJump) {
    JunctionProblem jp;
    jp.nu0 = 1.5;
    jp.truncation = 8.0;
    jp.cells_per_width = 16;
    jp.branches = {{{-1, 0}, 1.0}, {{1, 0}, -1.0}};
    const JunctionSolution js = solve_junction(jp);
    EXPECT_LE(std::abs(js.next_level_d()[1]), 1e-6);
}

TEST(BoundaryLayers, ChannelLayersNeedDirichletData) {
    ChannelProblem cp;
    cp.kind = ExpansionCase::Periodic;
    cp.viscosity = {parse_expression("2"), 1.0, true, 0.0};
    cp.f1 = parse_expression("1");
    const ExpansionSet set = build_expansion(cp, 0);
    EXPECT_THROW(solve_channel_layers(set, 0.1, 8), ValidationError);
}
