// Acceptance runner: one PASS/FAIL line per criterion.
//   thinflow_acceptance [--criterion N]
// Exit status is 0 only if every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "support/oracles.hpp"
#include "thinflow/boundary_layers.hpp"
#include "thinflow/channel_expansion.hpp"
#include "thinflow/errors.hpp"
#include "thinflow/expression.hpp"
#include "thinflow/stokes_direct.hpp"
#include "thinflow/transverse_poly.hpp"
#include "thinflow/tube_graph.hpp"
#include "thinflow/verify.hpp"

using namespace thinflow;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << "[failed] ";
        }
        detail << what << "; ";
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ChannelProblem periodic_problem(const std::string& nu, const std::string& f1) {
    ChannelProblem cp;
    cp.kind = ExpansionCase::Periodic;
    cp.viscosity = {parse_expression(nu), 1.0, true, 0.0};
    cp.f1 = parse_expression(f1);
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

Outcome operator_identities() {
    Outcome o;
    const TransversePoly n = n1();
    double e = std::abs(n.derivative(2)(0.0) - 1.0) + std::abs(n.derivative(2)(0.37) - 1.0);
    o.check(e <= 1e-12, "N1'' = 1 (" + fmt(e) + ")");
    e = std::max(std::abs(n(-0.5)), std::abs(n(0.5)));
    o.check(e <= 1e-12, "N1(+-1/2) = 0 (" + fmt(e) + ")");
    e = std::abs(n2()(0.5) + 1.0 / 12.0);
    o.check(e <= 1e-12, "N2(1/2) = -1/12 (" + fmt(e) + ")");
    double pm = 0.0;
    for (const ChannelProblem& cp : {periodic_problem("2 + sin(2*pi*x)", "1"), dirichlet_problem()}) {
        const ExpansionSet set = build_expansion(cp, 3);
        for (int j = 0; j <= set.order(); ++j)
            for (int i = 0; i <= 16; ++i) pm = std::max(pm, std::abs(mean2(set.p(j).at(i / 16.0))));
    }
    o.check(pm <= 1e-12, "<p_j> = 0 for j <= 3 (" + fmt(pm) + ")");
    return o;
}

Outcome r_constant_check() {
    Outcome o;
    const double r = r_constant(), q = oracle::r_constant_quadrature();
    o.check(std::abs(r - q) <= 1e-12, "R = " + fmt(r) + " vs quadrature " + fmt(q) + " (diff " + fmt(std::abs(r - q)) + ")");
    o.check(std::abs(r) > 1e-6, "R nonzero");
    return o;
}

Outcome periodic_closed_form() {
    Outcome o;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double e0 = 0.0, e1 = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const double b = 0.6 * u(rng), c = 0.3 * u(rng), ph = 3.0 * u(rng);
        const double a = 1.2 + std::abs(b) + std::abs(c);
        const double d = u(rng), w = u(rng);
        std::ostringstream nu, f1;
        nu.precision(17);
        f1.precision(17);
        nu << a << " + " << b << " * sin(2*pi*x + " << ph << ") + " << c << " * cos(4*pi*x)";
        f1 << d << " + " << w << " * cos(2*pi*x) + " << 0.5 * u(rng) << " * sin(6*pi*x)";
        const ExpansionSet set = build_expansion(periodic_problem(nu.str(), f1.str()), 1);
        const auto& cp = set.problem();
        for (int i = 0; i <= 8; ++i) {
            const double x = i / 8.0;
            e0 = std::max(e0, std::abs(set.level(0).q(x) - oracle::periodic_q0(cp.viscosity.nu, cp.f1, x)));
            e1 = std::max(e1, std::abs(set.level(1).q(x)));
        }
    }
    o.check(e0 <= 1e-10, "q0 vs closed form over 10 random (nu, f1): " + fmt(e0));
    o.check(e1 <= 1e-12, "q1 = 0: " + fmt(e1));
    return o;
}

Outcome rectangle() {
    Outcome o;
    const auto t0 = Clock::now();
    const Section4RectangleReport r = run_section4_rectangle();
    o.check(r.q0_closed_form_error <= 1e-10, "q0 = -x(x+2)+3 (" + fmt(r.q0_closed_form_error) + ")");
    for (const auto& row : r.rows)
        o.detail << "eps " << row.eps << ": max_u " << fmt(row.max_u) << " max_p " << fmt(row.max_p) << "; ";
    o.check(std::abs(r.exponent_p - 1.0) <= 0.5, "pressure exponent " + fmt(r.exponent_p) + " (want 1 +- 0.5)");
    o.check(std::abs(r.exponent_u - 5.0) <= 1.0, "velocity exponent " + fmt(r.exponent_u) + " (want 5 +- 1)");
    const double s = seconds(t0);
    o.check(s <= 120.0, "runtime " + fmt(s) + " s");
    return o;
}

Outcome rate_theorems() {
    Outcome o;
    const auto t0 = Clock::now();
    double slope[3];
    const StudyCase cases[3] = {StudyCase::Periodic, StudyCase::Dirichlet, StudyCase::Tube};
    for (int c = 0; c < 3; ++c) {
        const ConvergenceStudy s = run_rate_study(default_study(cases[c], 0));
        slope[c] = s.slope;
        o.detail << to_string(cases[c]) << " h1:";
        for (const auto& p : s.points) o.detail << " " << fmt(p.norms.h1_u) << "@N" << p.cells;
        o.detail << " slope " << fmt(s.slope) << " +- " << fmt(2 * s.slope_stderr) << "; ";
        o.check(s.mesh_policy_ok, to_string(cases[c]) + " mesh policy met");
    }
    o.check(std::abs(slope[0] - 2.5) <= 0.4, "periodic slope " + fmt(slope[0]) + " within 2.5 +- 0.4");
    o.check(std::abs(slope[1] - 1.5) <= 0.4, "dirichlet slope " + fmt(slope[1]) + " within 1.5 +- 0.4");
    o.check(slope[2] > 0.1, "tube slope " + fmt(slope[2]) + " > 0.1");
    o.check(slope[0] > slope[1] && slope[1] > slope[2], "ordering periodic > dirichlet > tube");
    const double s = seconds(t0);
    o.check(s <= 900.0, "runtime " + fmt(s) + " s");
    return o;
}

Outcome direct_solver() {
    Outcome o;
    std::vector<double> err;
    double div = 0.0;
    for (int n : {16, 32, 64}) {
        StokesProblem sp;
        sp.grid = MacGrid({{0.0, 0.0, 1.0, 1.0}}, 1.0 / n, 1.0 / n);
        sp.nu = oracle::mms_nu;
        sp.force = oracle::mms_force;
        SolveReport rep;
        const MacField f = solve(sp, &rep);
        div = std::max(div, rep.max_divergence);
        err.push_back(error_norms(f, LambdaEvaluator(oracle::mms_exact)).l2_u);
    }
    const double o1 = std::log2(err[0] / err[1]), o2 = std::log2(err[1] / err[2]);
    o.check(std::min(o1, o2) >= 1.8, "MMS L2 orders " + fmt(o1) + ", " + fmt(o2));
    o.check(div <= 1e-10, "max divergence " + fmt(div));

    StokesProblem sp;
    sp.grid = MacGrid({{0.0, 0.0, 1.0, 1.0}}, 1.0 / 12, 1.0 / 12);
    sp.nu = oracle::mms_nu;
    const AssembledSystem s = assemble(sp);
    const Eigen::SparseMatrix<double> D = s.G + Eigen::SparseMatrix<double>(s.Dv.transpose());
    double m = 0.0, scale = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
    for (int k = 0; k < s.G.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(s.G, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    o.check(m <= 1e-12 * scale, "|grad + div^T| / |grad| = " + fmt(m / scale));
    return o;
}

Outcome boundary_layers() {
    Outcome o;
    const auto t0 = Clock::now();
    HalfStripProblem hp;
    hp.truncation = 6.0;
    const LayerSolution zero = solve_half_strip(hp);
    JunctionProblem jz;
    jz.truncation = 6.0;
    jz.branches = {{{-1, 0}, 0.0}, {{0, 1}, 0.0}, {{0, -1}, 0.0}};
    const JunctionSolution jzs = solve_junction(jz);
    o.check(zero.zero && jzs.layer.zero, "zero data give zero layers");

    hp.cells_per_width = 8;
    hp.inlet_u1 = [](double t) { return 30.0 * (0.25 - t * t) * (t * t - 0.05) + 2e-12; };
    bool threw = false;
    try {
        solve_half_strip(hp);
    } catch (const ValidationError&) {
        threw = true;
    }
    hp.inlet_u1 = [](double t) { return 30.0 * (0.25 - t * t) * (t * t - 0.05); };
    bool ok = true;
    try {
        solve_half_strip(hp);
    } catch (const ValidationError&) {
        ok = false;
    }
    o.check(threw && ok, "compatibility enforced at 1e-12");

    auto tj = [](double L) {
        JunctionProblem jp;
        jp.nu0 = 2.0;
        jp.truncation = L;
        jp.cells_per_width = 16;
        jp.branches = {{{-1, 0}, 1.0}, {{0, 1}, 1.0}, {{0, -1}, -2.0}};
        return solve_junction(jp);
    };
    const JunctionSolution a = tj(8.0), b = tj(12.0);
    double d = 0.0;
    for (size_t j = 0; j < 3; ++j) d = std::max(d, std::abs(a.next_level_d()[j] - b.next_level_d()[j]));
    o.check(d <= 1e-6, "plateaus L=8 vs L=12 differ by " + fmt(d));
    o.check(a.kirchhoff_residual() <= 1e-10, "Kirchhoff residual on the T " + fmt(a.kirchhoff_residual()));

    TubeResolution res;
    res.cells_per_width = 8;
    const auto asy = assemble_global(section4_tshape_spec(0.05), 0, res);
    o.check(asy->node_layer(0).kirchhoff_residual() <= 1e-10, "Kirchhoff of the assembled T " +
                                                                   fmt(asy->node_layer(0).kirchhoff_residual()));
    const double s = seconds(t0);
    o.check(s <= 300.0, "runtime " + fmt(s) + " s");
    return o;
}

Outcome level_checks() {
    Outcome o;
    double worst = 0.0, flux = 0.0;
    for (const ChannelProblem& cp : {periodic_problem("2 + sin(2*pi*x)", "1 + 0.5 * cos(2*pi*x)"), dirichlet_problem()}) {
        const ExpansionSet set = build_expansion(cp, 3);
        for (const auto& c : check_levels(set)) {
            worst = std::max({worst, c.incompressibility, c.momentum1, c.momentum2, c.wall});
            flux = std::max(flux, c.flux_variation);
        }
    }
    o.check(worst <= 1e-10, "level identities for k <= 3: " + fmt(worst));
    o.check(flux <= 1e-10, "flux variation: " + fmt(flux));
    return o;
}

const char* kNames[] = {"",
                        "operator identities",
                        "R constant",
                        "periodic closed form",
                        "rectangle experiment",
                        "rate theorems",
                        "direct solver",
                        "boundary layers",
                        "level checks"};

Outcome run(int n) {
    switch (n) {
        case 1: return operator_identities();
        case 2: return r_constant_check();
        case 3: return periodic_closed_form();
        case 4: return rectangle();
        case 5: return rate_theorems();
        case 6: return direct_solver();
        case 7: return boundary_layers();
        case 8: return level_checks();
    }
    throw ValidationError("no criterion " + std::to_string(n));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    bool all = true;
    for (int n = 1; n <= 8; ++n) {
        if (only && n != only) continue;
        Outcome o;
        try {
            o = run(n);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::cout << "criterion " << n << " (" << kNames[n] << "): " << (o.pass ? "PASS" : "FAIL") << "  "
                  << o.detail.str() << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
