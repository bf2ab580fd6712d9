#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "thinflow/errors.hpp"
#include "thinflow/stokes_direct.hpp"
#include "support/oracles.hpp"

using namespace thinflow;

namespace {

StokesProblem mms_problem(int n) {
    StokesProblem sp;
    sp.grid = MacGrid({{0.0, 0.0, 1.0, 1.0}}, 1.0 / n, 1.0 / n);
    sp.nu = oracle::mms_nu;
    sp.force = oracle::mms_force;
    return sp;
}

// Poiseuille flow in (0, 2) x (-h/2, h/2) with constant nu and pressure drop.
StokesProblem poiseuille_problem(double height, int cells) {
    StokesProblem sp;
    sp.grid = MacGrid({{0.0, -0.5 * height, 2.0, 0.5 * height}}, height / cells, height / cells);
    sp.nu = [](double, double) { return 3.0; };
    sp.boundary = [height](double, double y) -> std::array<double, 2> {
        return {0.25 * height * height - y * y, 0.0};
    };
    return sp;
}

}  // namespace

TEST(StokesDirect, ManufacturedSolutionConvergesAtSecondOrder) {
    std::vector<double> err;
    for (int n : {16, 32, 64}) {
        SolveReport rep;
        const MacField f = solve(mms_problem(n), &rep);
        EXPECT_LE(rep.max_divergence, 1e-10) << n;
        err.push_back(error_norms(f, LambdaEvaluator(oracle::mms_exact)).l2_u);
    }
    for (size_t i = 1; i < err.size(); ++i) EXPECT_GE(std::log2(err[i - 1] / err[i]), 1.8) << err[i - 1] << " " << err[i];
}

TEST(StokesDirect, GradientIsMinusDivergenceTranspose) {
    for (const StokesProblem& sp : {mms_problem(12), poiseuille_problem(0.1, 8)}) {
        const AssembledSystem s = assemble(sp);
        const Eigen::SparseMatrix<double> D = s.G + Eigen::SparseMatrix<double>(s.Dv.transpose());
        double m = 0.0, scale = 0.0;
        for (int k = 0; k < D.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
        for (int k = 0; k < s.G.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(s.G, k); it; ++it)
                scale = std::max(scale, std::abs(it.value()));
        EXPECT_LE(m, 1e-12 * scale);
    }
}

TEST(StokesDirect, PoiseuilleIsReproducedExactly) {
    const double h = 0.1;
    SolveReport rep;
    const MacField f = solve(poiseuille_problem(h, 10), &rep);
    // exact: u1 = h^2/4 - y^2, dp/dx = -nu = -3 (mean-zero gauge)
    const ErrorNorms e = error_norms(f, LambdaEvaluator([h](double x, double y) -> std::array<double, 3> {
                                         return {0.25 * h * h - y * y, 0.0, -3.0 * (x - 1.0)};
                                     }));
    EXPECT_LE(e.max_u, 1e-13);
    EXPECT_LE(e.max_p, 1e-10);
    EXPECT_LE(rep.max_divergence, 1e-12);
}

TEST(StokesDirect, IncompatibleBoundaryFluxIsRejected) {
    StokesProblem sp = poiseuille_problem(0.1, 8);
    sp.boundary = [](double x, double y) -> std::array<double, 2> {
        return {x < 1.0 ? 0.0025 - y * y : 0.0, 0.0};
    };
    EXPECT_THROW(solve(sp), ValidationError);
}

TEST(StokesDirect, PinnedGaugeFixesThePressureValue) {
    StokesProblem sp = poiseuille_problem(0.1, 8);
    sp.gauge = {PressureGauge::Kind::Pinned, 1.99, 0.0, 5.0};
    const MacField f = solve(sp);
    const MacGrid& g = f.grid();
    const int i = g.nx() - 1, j = g.ny() / 2;
    EXPECT_NEAR(f.p(i, j), 5.0, 1e-10);
    EXPECT_NEAR(f.p(0, j) - f.p(i, j), 3.0 * (g.xc(i) - g.xc(0)), 1e-9);
}

TEST(StokesDirect, NormOfFieldAgainstTwiceItselfIsItsOwnNorm) {
    const MacGrid g({{0.0, 0.0, 1.0, 0.5}}, 0.05, 0.05);
    const MacField a = sample_on(g, LambdaEvaluator(oracle::mms_exact));
    MacField b = a;
    for (auto& v : b.u1_data()) v *= 2.0;
    for (auto& v : b.u2_data()) v *= 2.0;
    for (auto& v : b.p_data()) v *= 2.0;
    MacField zero(g);
    const ErrorNorms own = error_norms(a, zero), diff = error_norms(b, a);
    EXPECT_NEAR(diff.l2_u, own.l2_u, 1e-14);
    EXPECT_NEAR(diff.h1_u, own.h1_u, 1e-12);
    EXPECT_NEAR(diff.max_u, own.max_u, 1e-14);
    EXPECT_EQ(error_norms(a, a).h1_u, 0.0);
}

TEST(StokesDirect, FieldDumpRoundTrip) {
    const MacField f = solve(poiseuille_problem(0.1, 6));
    const auto path = (std::filesystem::temp_directory_path() / "thinflow_field_roundtrip.json").string();
    write_field(path, f);
    const MacField g = read_field(path);
    EXPECT_EQ(g.u1_data(), f.u1_data());
    EXPECT_EQ(g.u2_data(), f.u2_data());
    EXPECT_EQ(g.p_data(), f.p_data());
    EXPECT_EQ(g.grid().nx(), f.grid().nx());
    std::remove(path.c_str());
    EXPECT_THROW(read_field(path), ValidationError);
}

TEST(StokesDirect, PeriodicChannelWithForce) {
    // periodic in x1, u1 = f (h^2/4 - y^2) / (2 nu) for a constant force
    const double h = 0.2;
    StokesProblem sp;
    sp.grid = MacGrid({{0.0, -0.5 * h, 1.0, 0.5 * h}}, 1.0 / 20, h / 10, true);
    sp.nu = [](double, double) { return 2.0; };
    sp.force = [](double, double) -> std::array<double, 2> { return {1.0, 0.0}; };
    const MacField f = solve(sp);
    const ErrorNorms e = error_norms(f, LambdaEvaluator([h](double, double y) -> std::array<double, 3> {
                                         return {(0.25 * h * h - y * y) / 2.0, 0.0, 0.0};
                                     }));
    EXPECT_LE(e.max_u, 1e-13);
    EXPECT_LE(e.max_p, 1e-10);
}
