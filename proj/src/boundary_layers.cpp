#include "thinflow/boundary_layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "thinflow/errors.hpp"
#include "thinflow/smooth_function.hpp"
#include "thinflow/transverse_poly.hpp"

namespace thinflow {

namespace {

double n1_value(double xi) { return 0.5 * (xi * xi - 0.25); }

void check_resolution(double truncation, int cells) {
    if (cells < 2 || cells % 2 != 0) throw ValidationError("cells_per_width must be an even integer >= 2");
    if (!(truncation >= 2.0) || std::abs(truncation - std::round(truncation)) > 1e-12)
        throw ValidationError("layer truncation must be an integer >= 2");
}

// Cross-section energy int |u|^2 dt at distance s along direction d.
double section_energy(const std::function<std::array<double, 3>(double, double)>& u, std::array<double, 2> d,
                      double s, int n) {
    const std::array<double, 2> nrm{-d[1], d[0]};
    double e = 0.0;
    for (int m = 0; m < n; ++m) {
        const double t = -0.5 + (m + 0.5) / n;
        const auto v = u(s * d[0] + t * nrm[0], s * d[1] + t * nrm[1]);
        e += (v[0] * v[0] + v[1] * v[1]) / n;
    }
    return e;
}

double section_mean(const std::function<double(double, double)>& f, std::array<double, 2> d, double s, int n) {
    const std::array<double, 2> nrm{-d[1], d[0]};
    double m = 0.0;
    for (int k = 0; k < n; ++k) {
        const double t = -0.5 + (k + 0.5) / n;
        m += f(s * d[0] + t * nrm[0], s * d[1] + t * nrm[1]) / n;
    }
    return m;
}

}  // namespace

Profile with_midpoint_flux(const Profile& g, int cells, double target) {
    double s_u = 0.0, s_n = 0.0;
    for (int j = 0; j < cells; ++j) {
        const double y = -0.5 + (j + 0.5) / cells;
        s_u += (g ? g(y) : 0.0) / cells;
        s_n += n1_value(y) / cells;
    }
    // midpoint flux of the Poiseuille profile -12 target N1
    const double want = -12.0 * target * s_n;
    const double alpha = (s_u - want) / s_n;
    return [g, alpha](double y) { return (g ? g(y) : 0.0) - alpha * n1_value(y); };
}

double check_compatibility(const Profile& inlet_u1) {
    if (!inlet_u1) return 0.0;
    return integrate(inlet_u1, -0.5, 0.5);
}

double fit_decay_rate(const std::vector<double>& s, const std::vector<double>& energy, double floor) {
    double emax = 0.0;
    for (double e : energy) emax = std::max(emax, e);
    std::vector<double> xs, ys;
    for (size_t i = 0; i < s.size() && i < energy.size(); ++i)
        if (energy[i] > 1e-20 * emax && energy[i] > floor && energy[i] > 1e-300) {
            xs.push_back(s[i]);
            ys.push_back(0.5 * std::log(energy[i]));
        }
    if (xs.size() < 2) return 0.0;
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double den = n * sxx - sx * sx;
    return den > 0.0 ? -(n * sxy - sx * sy) / den : 0.0;
}

LayerSolution solve_half_strip(const HalfStripProblem& pb) {
    check_resolution(pb.truncation, pb.cells_per_width);
    if (!(pb.nu0 > 0.0)) throw ValidationError("layer viscosity must be positive");
    const double compat = check_compatibility(pb.inlet_u1);
    double scale = 1.0;
    if (pb.inlet_u1) scale = std::max(scale, integrate([&](double t) { return std::abs(pb.inlet_u1(t)); }, -0.5, 0.5));
    if (std::abs(compat) > 1e-12 * scale)
        throw ValidationError("half-strip inlet data has nonzero flux " + std::to_string(compat));

    const int n = pb.cells_per_width;
    const double h = 1.0 / n, L = pb.truncation;
    LayerSolution out;
    MacGrid grid({{0.0, -0.5, L, 0.5}}, h, h);

    auto u1_in = [&](double y) { return pb.inlet_u1 ? pb.inlet_u1(y) : 0.0; };
    auto u2_in = [&](double y) { return pb.inlet_u2 ? pb.inlet_u2(y) : 0.0; };
    double amax = 0.0;
    for (int m = 0; m <= 4 * n; ++m) {
        const double y = -0.5 + static_cast<double>(m) / (4 * n);
        amax = std::max({amax, std::abs(u1_in(y)), std::abs(u2_in(y))});
    }
    if (amax == 0.0) {
        out.field = MacField(grid);
        out.zero = true;
        out.plateaus = {0.0};
        return out;
    }

    // The midpoint sum of the inlet flux is only O(h^2) small; remove it with
    // a multiple of N1 so the discrete problem is compatible.
    const Profile u1_fixed = with_midpoint_flux(u1_in, n, 0.0);

    StokesProblem sp;
    sp.grid = grid;
    sp.nu = [nu0 = pb.nu0](double, double) { return nu0; };
    sp.boundary = [&](double x, double y) -> std::array<double, 2> {
        if (x < 0.5 * h) return {u1_fixed(y), u2_in(y)};
        return {0.0, 0.0};
    };
    out.field = solve(sp, &out.report);
    out.boundary_flux = out.report.boundary_flux_imbalance;

    // Gauge: the pressure plateau one width before the truncation is zero.
    const MacField& f = out.field;
    const double plateau = section_mean([&](double x, double y) { return f.sample(x, y)[2]; }, {1, 0}, L - 1.0, n);
    out.field.shift_pressure(-plateau);
    out.plateaus = {0.0};

    std::vector<double> st;
    for (int s = 1; s < static_cast<int>(L); ++s) {
        st.push_back(s);
        out.station_energy.push_back(
            section_energy([&](double x, double y) { return f.sample(x, y); }, {1, 0}, s, n));
    }
    out.decay_rate = fit_decay_rate(st, out.station_energy, std::pow(1e-12 * amax, 2));
    return out;
}

std::array<double, 3> half_strip_value(const LayerSolution& layer, double xi1, double xi2) {
    const MacGrid& g = layer.field.grid();
    if (layer.zero || g.nx() == 0) return {0.0, 0.0, 0.0};
    const double L = g.xf(g.nx());
    if (xi1 < 0.0 || xi1 > L || std::abs(xi2) > 0.5) return {0.0, 0.0, 0.0};
    return layer.field.sample(xi1, xi2);
}

double layer_cutoff(double s, double d_hat0) {
    const double a = d_hat0 + 1.0;
    return smoothstep5(a, a + 1.0, std::abs(s));
}

namespace {

struct BranchCoords {
    double s = 0.0, t = 0.0;
    bool inside = false;
};

BranchCoords branch_coords(const JunctionBranch& b, double x, double y, double L) {
    const double dx = b.direction[0], dy = b.direction[1];
    BranchCoords c;
    c.s = x * dx + y * dy;
    c.t = -x * dy + y * dx;
    c.inside = c.s > 0.5 && c.s <= L + 1e-12 && std::abs(c.t) <= 0.5 + 1e-12;
    return c;
}

}  // namespace

JunctionSolution solve_junction(const JunctionProblem& pb) {
    check_resolution(pb.truncation, pb.cells_per_width);
    if (pb.branches.size() < 2) throw ValidationError("a junction needs at least two branches");
    if (!(pb.nu0 > 0.0)) throw ValidationError("layer viscosity must be positive");
    if (!(pb.truncation >= pb.d_hat0 + 4.0))
        throw ValidationError("junction truncation must exceed the cut-off band by two widths");
    double csum = 0.0, cabs = 0.0;
    for (size_t a = 0; a < pb.branches.size(); ++a) {
        const auto& b = pb.branches[a];
        if (std::abs(b.direction[0]) + std::abs(b.direction[1]) != 1)
            throw ValidationError("junction branches must be axis aligned unit vectors");
        for (size_t c = 0; c < a; ++c)
            if (pb.branches[c].direction == b.direction) throw ValidationError("two branches share a direction");
        csum += b.c;
        cabs += std::abs(b.c);
    }
    if (std::abs(csum) / 12.0 > 1e-10 * std::max(1.0, cabs))
        throw ValidationError("junction branch fluxes do not balance: residual " + std::to_string(csum / 12.0));

    JunctionSolution out;
    out.problem = pb;
    const int n = pb.cells_per_width;
    const double h = 1.0 / n, L = pb.truncation;
    std::vector<Rect> rects{{-0.5, -0.5, 0.5, 0.5}};
    for (const auto& b : pb.branches) {
        const int dx = b.direction[0], dy = b.direction[1];
        if (dx == 1) rects.push_back({0.0, -0.5, L, 0.5});
        if (dx == -1) rects.push_back({-L, -0.5, 0.0, 0.5});
        if (dy == 1) rects.push_back({-0.5, 0.0, 0.5, L});
        if (dy == -1) rects.push_back({-0.5, -L, 0.5, 0.0});
    }
    MacGrid grid(rects, h, h);

    bool trivial = !pb.force;
    for (const auto& b : pb.branches) trivial = trivial && b.c == 0.0;
    if (trivial) {
        out.layer.field = MacField(grid);
        out.layer.zero = true;
        out.layer.plateaus.assign(pb.branches.size(), 0.0);
        return out;
    }

    StokesProblem sp;
    sp.grid = grid;
    sp.nu = [nu0 = pb.nu0](double, double) { return nu0; };
    sp.force = pb.force;
    const std::vector<JunctionBranch> branches = pb.branches;
    sp.boundary = [branches, L, h](double x, double y) -> std::array<double, 2> {
        for (const auto& b : branches) {
            const BranchCoords c = branch_coords(b, x, y, L + h);
            if (c.inside && c.s > L - 0.5 * h) {
                const double v = 2.0 * b.c * n1_value(c.t);
                return {v * b.direction[0], v * b.direction[1]};
            }
        }
        return {0.0, 0.0};
    };
    out.layer.field = solve(sp, &out.layer.report);
    out.layer.boundary_flux = out.layer.report.boundary_flux_imbalance;

    // Plateaus of P - c nu0 s one width before the truncation, relative to branch 0.
    const MacField& f = out.layer.field;
    std::vector<double> pi;
    for (const auto& b : pb.branches) {
        const std::array<double, 2> d{static_cast<double>(b.direction[0]), static_cast<double>(b.direction[1])};
        const double s = L - 1.0;
        pi.push_back(section_mean([&](double x, double y) { return f.sample(x, y)[2]; }, d, s, n) -
                     b.c * pb.nu0 * s);
    }
    const double ref = pi[0];
    out.layer.field.shift_pressure(-ref);
    for (double& v : pi) v -= ref;
    out.layer.plateaus = pi;

    // Decay of the layer velocity, worst branch per station.
    std::vector<double> st;
    const int s0 = static_cast<int>(std::ceil(pb.d_hat0 + 2.0));
    for (int s = s0; s < static_cast<int>(L); ++s) {
        double e = 0.0;
        for (const auto& b : pb.branches) {
            const std::array<double, 2> d{static_cast<double>(b.direction[0]), static_cast<double>(b.direction[1])};
            e = std::max(e, section_energy([&](double x, double y) { return out.layer_at(x, y); }, d, s, n));
        }
        st.push_back(s);
        out.layer.station_energy.push_back(e);
    }
    double cmax = 0.0;
    for (const auto& b : pb.branches) cmax = std::max(cmax, std::abs(b.c));
    out.layer.decay_rate = fit_decay_rate(st, out.layer.station_energy, std::pow(1e-12 * cmax, 2));
    return out;
}

std::array<double, 3> JunctionSolution::total_at(double xi1, double xi2) const {
    return layer.field.sample(xi1, xi2);
}

std::array<double, 3> JunctionSolution::layer_at(double xi1, double xi2) const {
    const double L = problem.truncation;
    if (layer.zero) return {0.0, 0.0, 0.0};
    const bool in_node = std::abs(xi1) <= 0.5 + 1e-12 && std::abs(xi2) <= 0.5 + 1e-12;
    for (size_t j = 0; j < problem.branches.size(); ++j) {
        const auto& b = problem.branches[j];
        const BranchCoords c = branch_coords(b, xi1, xi2, L);
        if (!c.inside) continue;
        std::array<double, 3> w = layer.field.sample(xi1, xi2);
        const double chi = layer_cutoff(c.s, problem.d_hat0);
        const double v = chi * 2.0 * b.c * n1_value(c.t);
        w[0] -= v * b.direction[0];
        w[1] -= v * b.direction[1];
        w[2] -= chi * (b.c * problem.nu0 * c.s + layer.plateaus[j]);
        return w;
    }
    if (in_node) return layer.field.sample(xi1, xi2);
    return {0.0, 0.0, 0.0};
}

double JunctionSolution::kirchhoff_residual() const {
    double s = 0.0;
    for (const auto& b : problem.branches) s += b.c;
    return std::abs(s * mean2(n1()));
}

OuterConstants outer_constants(const Profile& g_first_reversed, int level, double nu_integral, double d) {
    OuterConstants oc;
    if (level == 0 && g_first_reversed) oc.c_hat = -integrate(g_first_reversed, -0.5, 0.5) / mean2(n1());
    oc.c = -oc.c_hat;
    oc.d_hat = oc.c * nu_integral + d;
    return oc;
}

ChannelLayers solve_channel_layers(const ExpansionSet& set, double eps, int cells_per_width, double truncation) {
    const ChannelProblem& pb = set.problem();
    if (pb.kind != ExpansionCase::Dirichlet) throw ValidationError("end layers need a Dirichlet channel");
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    ChannelLayers out;
    out.eps = eps;
    out.truncation = truncation > 0.0 ? truncation : std::max(2.0, std::min(10.0, std::floor(1.0 / eps + 1e-9)));
    const double len = pb.viscosity.length;
    const double nu_l = pb.viscosity.nu(0.0), nu_r = pb.viscosity.nu(len);
    for (int j = 0; j <= set.order(); ++j) {
        for (int side = 0; side < 2; ++side) {
            const double x1 = side == 0 ? 0.0 : len;
            const TransversePoly u1 = set.u1(j).at(x1);
            const TransversePoly u2 = set.u2(j - 1).at(x1);
            const SmoothFunction1D phi = j > 0 ? SmoothFunction1D() : side == 0 ? pb.phi_in : pb.phi_out;
            HalfStripProblem hs;
            hs.nu0 = side == 0 ? nu_l : nu_r;
            hs.truncation = out.truncation;
            hs.cells_per_width = cells_per_width;
            const double sgn = side == 0 ? 1.0 : -1.0;
            hs.inlet_u1 = [phi, u1, sgn](double xi) { return sgn * (phi(xi) - u1(xi)); };
            hs.inlet_u2 = [u2](double xi) { return -u2(xi); };
            (side == 0 ? out.left : out.right).push_back(solve_half_strip(hs));
        }
    }
    return out;
}

std::array<double, 3> ChannelComposite::at(double x, double y) const {
    return add_layers(x, y, set_.evaluate(layers_.eps, x, y));
}

void ChannelComposite::column(double x, const std::vector<double>& ys, int component,
                              std::vector<double>& out) const {
    const CrossSection cs = set_.cross_section(layers_.eps, x);
    out.resize(ys.size());
    for (size_t i = 0; i < ys.size(); ++i) {
        const double xi = ys[i] / layers_.eps;
        out[i] = add_layers(x, ys[i], {cs.u1(xi), cs.u2(xi), cs.p(xi)})[component];
    }
}

std::array<double, 3> ChannelComposite::add_layers(double x, double y, std::array<double, 3> v) const {
    const double eps = layers_.eps;
    const double len = set_.problem().viscosity.length;
    const double xi2 = y / eps;
    double ej = 1.0;
    for (size_t j = 0; j < layers_.left.size(); ++j) {
        const auto l = half_strip_value(layers_.left[j], x / eps, xi2);
        const auto r = half_strip_value(layers_.right[j], (len - x) / eps, xi2);
        v[0] += ej * eps * eps * (l[0] - r[0]);
        v[1] += ej * eps * eps * (l[1] + r[1]);
        v[2] += ej * eps * (l[2] + r[2]);
        ej *= eps;
    }
    return v;
}

}  // namespace thinflow
