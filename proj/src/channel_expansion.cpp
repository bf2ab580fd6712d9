#include "thinflow/channel_expansion.hpp"

#include <algorithm>
#include <cmath>

#include "thinflow/errors.hpp"

namespace thinflow {

void ViscosityProfile::validate(int k) const {
    if (!(length > 0.0)) throw ValidationError("channel length must be positive");
    const int need = 2 * k + 2;
    if (nu.max_order() < need)
        throw OrderOverflow("viscosity supports derivatives up to order " + std::to_string(nu.max_order()) +
                            ", order-" + std::to_string(k) + " expansion needs " + std::to_string(need));
    const int n = 513;
    double lo = nu(0.0);
    for (int i = 0; i < n; ++i) lo = std::min(lo, nu(length * i / (n - 1)));
    if (!(lo > 0.0)) throw ValidationError("viscosity must stay positive");
    if (periodic) {
        if (!is_periodic(nu, length, need, 1e-10)) throw ValidationError("viscosity is not periodic");
        return;
    }
    // rho = 0 means no flat margins: such a channel has no end layers of the
    // usual kind and is only compared away from its ends.
    if (!(rho >= 0.0) || 2.0 * rho > length) throw ValidationError("margin rho must lie in [0, length/2)");
    if (rho == 0.0) return;
    const double n0 = nu0();
    for (int i = 0; i < 65; ++i) {
        const double t = rho * i / 64.0;
        if (std::abs(nu(t) - n0) > 1e-12 * n0 || std::abs(nu(length - t) - n0) > 1e-12 * n0)
            throw ValidationError("viscosity must equal nu0 on both end margins");
    }
}

QSolution solve_qj(const ViscosityProfile& visc, const SmoothFunction1D& rhs, const SmoothFunction1D& f1, int j,
                   ExpansionCase kind, double bracket_at_zero, QNorm norm) {
    const double L = visc.length;
    const SmoothFunction1D& nu = visc.nu;
    const SmoothFunction1D force = j == 0 ? f1 : SmoothFunction1D();
    // bracket = b(0) - int_0^x rhs
    const SmoothFunction1D B = -integral(rhs, 0.0, 0.0, L);
    double b0 = bracket_at_zero;
    if (kind == ExpansionCase::Periodic) {
        const double num = integrate(force, 0.0, L) + 6.0 * integrate(nu * B, 0.0, L);
        b0 = -num / (6.0 * integrate(nu, 0.0, L));
    }
    QSolution s;
    s.bracket = B + b0;
    s.dq = force + 6.0 * (nu * s.bracket);
    const SmoothFunction1D prim = integral(s.dq, 0.0, 0.0, L);
    switch (norm.kind) {
        case QNormalization::ZeroMean: {
            // mean of int_0^x g = (1/L) int_0^L (L - t) g(t) dt
            const SmoothFunction1D& dq = s.dq;
            const double mean = integrate([&](double t) { return (L - t) * dq(t); }, 0.0, L) / L;
            s.q = prim + (norm.value - mean);
            break;
        }
        case QNormalization::PinEnd:
            s.q = prim + (norm.value - prim(L));
            break;
        case QNormalization::PinStart:
            s.q = prim + norm.value;
            break;
    }
    return s;
}

ExpansionSet::ExpansionSet(ChannelProblem problem, std::vector<ExpansionLevel> levels)
    : problem_(std::move(problem)), levels_(std::move(levels)) {}

const SeparableField& ExpansionSet::u1(int j) const { return j < 0 ? zero_ : levels_.at(j).u1; }
const SeparableField& ExpansionSet::u2(int j) const { return j < 0 ? zero_ : levels_.at(j).u2; }
const SeparableField& ExpansionSet::p(int j) const { return j < 0 ? zero_ : levels_.at(j).p; }

CrossSection ExpansionSet::cross_section(double eps, double x1) const {
    JetCache cache(x1);
    CrossSection cs;
    double ej = 1.0;
    for (const auto& lv : levels_) {
        cs.u1 += (ej * eps * eps) * lv.u1.at(x1, 0, cache);
        cs.u2 += (ej * eps * eps * eps) * lv.u2.at(x1, 0, cache);
        cs.p += (ej * eps) * lv.p.at(x1, 0, cache);
        cs.p += TransversePoly::constant(ej * lv.q.jet(x1, 0, cache)[0]);
        ej *= eps;
    }
    return cs;
}

std::array<double, 3> ExpansionSet::evaluate(double eps, double x1, double x2) const {
    const CrossSection cs = cross_section(eps, x1);
    const double xi = x2 / eps;
    return {cs.u1(xi), cs.u2(xi), cs.p(xi)};
}

ExpansionSet build_expansion(const ChannelProblem& problem, int k) {
    if (k < 0) throw ValidationError("expansion order must be non-negative");
    const ViscosityProfile& visc = problem.viscosity;
    if ((problem.kind == ExpansionCase::Periodic) != visc.periodic)
        throw ValidationError("viscosity periodicity does not match the channel case");
    visc.validate(k);
    if (problem.kind == ExpansionCase::Periodic && problem.f1.max_order() < 2 * k + 2)
        throw OrderOverflow("force supports too few derivatives for the requested order");
    if (problem.kind == ExpansionCase::Periodic && !is_periodic(problem.f1, visc.length, 2 * k + 2, 1e-10))
        throw ValidationError("force is not periodic");

    const SmoothFunction1D& nu = visc.nu;
    const SmoothFunction1D two_over_nu = SmoothFunction1D::constant(2.0) / nu;

    std::vector<double> flux;
    if (problem.level_flux) {
        flux = *problem.level_flux;
    } else if (problem.kind == ExpansionCase::Dirichlet) {
        const double in = integrate(problem.phi_in, -0.5, 0.5);
        const double out = integrate(problem.phi_out, -0.5, 0.5);
        if (std::abs(in - out) > 1e-12 * std::max(1.0, std::abs(in)))
            throw ValidationError("inlet and outlet fluxes differ");
        flux = {in};
    }
    flux.resize(k + 1, 0.0);

    QNorm norm = problem.q_norm.value_or(problem.kind == ExpansionCase::Periodic
                                             ? QNorm{QNormalization::ZeroMean, 0.0}
                                             : QNorm{QNormalization::PinEnd, 0.0});

    std::vector<ExpansionLevel> levels;
    auto at = [&levels](int j, auto member) -> SeparableField {
        return j < 0 ? SeparableField() : levels[j].*member;
    };
    for (int j = 0; j <= k; ++j) {
        const SeparableField u1m2 = at(j - 2, &ExpansionLevel::u1);
        const SeparableField u2m2 = at(j - 2, &ExpansionLevel::u2);
        const SeparableField pm1 = at(j - 1, &ExpansionLevel::p);
        const SeparableField A = u2m2.dx1().dxi() + two_over_nu * ((nu * u1m2.dx1()).dx1() - pm1.dx1());
        const SeparableField B = -1.0 * A.transverse(d_inv2);
        const SmoothFunction1D G = B.mean2();

        QNorm nj = norm;
        if (j < static_cast<int>(problem.q_pins.size())) nj.value = problem.q_pins[j];
        else if (j > 0) nj.value = 0.0;
        const double G0 = G(0.0);
        QSolution qs = solve_qj(visc, -G.d(), problem.f1, j, problem.kind, G0 - flux[j], nj);

        ExpansionLevel lv;
        lv.q = qs.q;
        lv.dq = qs.dq;
        lv.bracket = qs.bracket;
        lv.flux = problem.kind == ExpansionCase::Periodic ? G0 - qs.bracket(0.0) : flux[j];
        lv.u1 = B + SeparableField::product(12.0 * qs.bracket, n1());
        lv.u2 = -1.0 * lv.u1.dx1().transverse(d_inv);
        levels.push_back(lv);

        const SeparableField u1m1 = at(j - 1, &ExpansionLevel::u1);
        const SeparableField u2m1 = at(j - 1, &ExpansionLevel::u2);
        const SeparableField u2m3 = at(j - 3, &ExpansionLevel::u2);
        const SeparableField inner = 0.5 * (nu * (u1m1.dxi() + u2m3.dx1())).dx1() + nu * u2m1.dxi(2);
        levels.back().p = inner.transverse(d_inv_tilde);
    }
    return ExpansionSet(problem, std::move(levels));
}

std::array<double, 2> ResidualField::at(double eps, double x1, double xi) const {
    std::array<double, 2> r{0.0, 0.0};
    double e = 1.0;
    for (int s = 0; s < 3; ++s, e *= eps) {
        r[0] += e * e1[s](x1, xi);
        r[1] += e * e2[s](x1, xi);
    }
    return r;
}

ResidualField residual_fk(const ExpansionSet& set) {
    const int k = set.order();
    const SmoothFunction1D& nu = set.nu();
    ResidualField r;
    r.e1[0] = (nu * set.u1(k - 1).dx1()).dx1() + (0.5 * nu) * set.u2(k - 1).dx1().dxi() - set.p(k).dx1();
    r.e1[1] = (nu * set.u1(k).dx1()).dx1() + (0.5 * nu) * set.u2(k).dx1().dxi();
    r.e2[0] = 0.5 * (nu * (set.u1(k).dxi() + set.u2(k - 2).dx1())).dx1() + nu * set.u2(k).dxi(2);
    r.e2[1] = 0.5 * (nu * set.u2(k - 1).dx1()).dx1();
    r.e2[2] = 0.5 * (nu * set.u2(k).dx1()).dx1();
    return r;
}

namespace {

// max over samples of |sum terms| / max(|term|), skipping points where all vanish
double relative_residual(const std::vector<SeparableField>& terms, double L, int nx, int nxi) {
    double worst = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double x1 = L * (i + 0.5) / nx;
        JetCache cache(x1);
        std::vector<TransversePoly> polys;
        for (const auto& t : terms) polys.push_back(t.at(x1, 0, cache));
        for (int m = 0; m < nxi; ++m) {
            const double xi = -0.5 + static_cast<double>(m) / (nxi - 1);
            double sum = 0.0, scale = 0.0;
            for (const auto& p : polys) {
                const double v = p(xi);
                sum += v;
                scale = std::max(scale, std::abs(v));
            }
            if (scale > 0.0) worst = std::max(worst, std::abs(sum) / scale);
        }
    }
    return worst;
}

}  // namespace

std::vector<LevelCheck> check_levels(const ExpansionSet& set, int nx, int nxi) {
    const SmoothFunction1D& nu = set.nu();
    const double L = set.problem().viscosity.length;
    std::vector<LevelCheck> out;
    for (int j = 0; j <= set.order(); ++j) {
        const ExpansionLevel& lv = set.level(j);
        LevelCheck c;
        c.level = j;
        c.incompressibility = relative_residual({lv.u1.dx1(), lv.u2.dxi()}, L, nx, nxi);

        const SmoothFunction1D force = j == 0 ? set.problem().f1 : SmoothFunction1D();
        const SeparableField qterm = SeparableField::product(lv.dq - force, TransversePoly::constant(1.0));
        c.momentum1 = relative_residual({-1.0 * (nu * set.u1(j - 2).dx1()).dx1(), (-0.5 * nu) * lv.u1.dxi(2),
                                         (-0.5 * nu) * set.u2(j - 2).dx1().dxi(), set.p(j - 1).dx1(), qterm},
                                        L, nx, nxi);
        c.momentum2 = relative_residual({-0.5 * (nu * set.u1(j - 1).dxi()).dx1(),
                                         -0.5 * (nu * set.u2(j - 3).dx1()).dx1(), -1.0 * (nu * set.u2(j - 1).dxi(2)),
                                         lv.p.dxi()},
                                        L, nx, nxi);
        double wall = 0.0, scale = 0.0, fv = 0.0;
        for (int i = 0; i <= nx; ++i) {
            const double x1 = L * i / nx;
            const TransversePoly a = lv.u1.at(x1), b = lv.u2.at(x1);
            for (double xi : {-0.5, 0.5}) wall = std::max({wall, std::abs(a(xi)), std::abs(b(xi))});
            scale = std::max({scale, a.max_abs_coeff(), b.max_abs_coeff()});
            fv = std::max(fv, std::abs(mean2(a) - lv.flux));
        }
        const double s = std::max(scale, std::abs(lv.flux));
        c.wall = s > 0.0 ? wall / s : wall;
        c.flux_variation = s > 0.0 ? fv / s : fv;
        out.push_back(c);
    }
    return out;
}

}  // namespace thinflow
