#include "thinflow/tube_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "thinflow/errors.hpp"
#include "thinflow/transverse_poly.hpp"

namespace thinflow {

namespace {

double n1_value(double xi) { return 0.5 * (xi * xi - 0.25); }

std::array<double, 2> dir(const TubeEdge& e) {
    return {static_cast<double>(e.direction[0]), static_cast<double>(e.direction[1])};
}

// Local coordinates (s, t) of a physical point with respect to edge e.
std::array<double, 2> local(const TubeEdge& e, double x, double y) {
    const auto d = dir(e);
    return {x * d[0] + y * d[1], -x * d[1] + y * d[0]};
}

double min_length(const TubeSpec& spec) {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : spec.edges) m = std::min(m, e.length);
    return m;
}

ViscosityProfile edge_viscosity(const TubeSpec& spec, const TubeEdge& e) {
    ViscosityProfile v;
    v.nu = e.nu;
    v.length = e.length;
    v.periodic = false;
    v.rho = spec.beta;
    return v;
}

}  // namespace

std::array<std::array<double, 2>, 2> TubeSpec::frame(int j) const {
    const auto d = dir(edges.at(j));
    return {{{d[0], -d[1]}, {d[1], d[0]}}};
}

std::vector<double> TubeSpec::edge_fluxes() const {
    std::vector<double> f;
    for (const auto& e : edges) f.push_back(e.outflow ? integrate(e.outflow, -0.5, 0.5) : 0.0);
    return f;
}

void TubeSpec::validate(int k) const {
    if (edges.size() < 2) throw ValidationError("a tube structure needs at least two edges");
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");
    if (!(beta > 0.0)) throw ValidationError("beta must be positive");
    if (!(d_hat0 > 0.0)) throw ValidationError("d_hat0 must be positive");
    for (size_t a = 0; a < edges.size(); ++a) {
        const auto& e = edges[a];
        if (std::abs(e.direction[0]) + std::abs(e.direction[1]) != 1)
            throw ValidationError("edge " + std::to_string(a + 1) + " is not along a coordinate axis");
        for (size_t b = 0; b < a; ++b)
            if (edges[b].direction == e.direction) throw ValidationError("two edges share a direction");
        if (!(e.length > eps)) throw ValidationError("edge " + std::to_string(a + 1) + " is shorter than eps");
        if (!(4.0 * beta <= e.length)) throw ValidationError("beta must not exceed a quarter of every edge length");
        edge_viscosity(*this, e).validate(k);
        if (std::abs(e.nu(0.0) - edges[0].nu(0.0)) > 1e-12 * std::abs(edges[0].nu(0.0)))
            throw ValidationError("all edges must share the viscosity at the central node");
        if (e.f1.max_order() < 2 * k + 2) throw OrderOverflow("edge force supports too few derivatives");
        if (max_abs_on(e.f1, 0.0, beta, 65) != 0.0 || max_abs_on(e.f1, e.length - beta, e.length, 65) != 0.0)
            throw ValidationError("edge force must vanish on the end margins");
        if (!e.outflow) throw ValidationError("edge " + std::to_string(a + 1) + " has no outer data");
    }
    const auto f = edge_fluxes();
    double sum = 0.0, mag = 0.0;
    for (double v : f) {
        sum += v;
        mag += std::abs(v);
    }
    if (std::abs(sum) > 1e-12 * std::max(1.0, mag))
        throw ValidationError("outer fluxes do not balance: net " + std::to_string(sum));
}

std::vector<Rect> TubeSpec::rectangles() const {
    const double w = 0.5 * eps;
    std::vector<Rect> r{{-w, -w, w, w}};
    for (const auto& e : edges) {
        const auto d = dir(e);
        const double L = e.length;
        if (d[0] > 0) r.push_back({0.0, -w, L, w});
        if (d[0] < 0) r.push_back({-L, -w, 0.0, w});
        if (d[1] > 0) r.push_back({-w, 0.0, w, L});
        if (d[1] < 0) r.push_back({-w, -L, w, 0.0});
    }
    return r;
}

double CutoffFamily::chi(int j, double s) const {
    const double eps = spec->eps, L = spec->edges.at(j).length;
    return layer_cutoff(s / eps, spec->d_hat0) * layer_cutoff((L - s) / eps, spec->d_hat0);
}

// eta^(i) is 1 wherever the chi band of node i is active, so the layer
// always completes the cut-off edge field.
std::array<double, 2> CutoffFamily::eta_band(int j) const {
    const double L = spec->edges.at(j).length;
    const double a = (spec->d_hat0 + 2.0) * spec->eps;
    const double a0 = std::max(0.25 * L, a);
    return {a0, std::max(0.375 * L, a0 + 0.125 * L)};
}

double CutoffFamily::eta_node(int j, double s) const {
    const auto b = eta_band(j);
    return 1.0 - smooth_ramp(b[0], b[1], s);
}

double CutoffFamily::eta_outer(int j, double s) const {
    const auto b = eta_band(j);
    const double L = spec->edges.at(j).length;
    return smooth_ramp(L - b[1], L - b[0], s);
}

double CutoffFamily::theta(int i, double x, double y) const {
    const double r = 0.5 * min_length(*spec);
    double cx = 0.0, cy = 0.0;
    if (i > 0) {
        const auto& e = spec->edges.at(i - 1);
        cx = e.direction[0] * e.length;
        cy = e.direction[1] * e.length;
    }
    return std::hypot(x - cx, y - cy) <= r ? 1.0 : 0.0;
}

TubeAsymptotic::TubeAsymptotic(TubeSpec spec, int k, TubeConstants constants, std::vector<ExpansionSet> edges,
                               std::vector<JunctionSolution> node_layers,
                               std::vector<std::vector<LayerSolution>> outer_layers)
    : spec_(std::move(spec)),
      k_(k),
      constants_(std::move(constants)),
      edges_(std::move(edges)),
      node_layers_(std::move(node_layers)),
      outer_layers_(std::move(outer_layers)) {
    cut_.spec = &spec_;
}

std::array<double, 3> TubeAsymptotic::at(double x, double y) const {
    const double w = 0.5 * spec_.eps, tol = 1e-12;
    if (std::abs(x) <= w + tol && std::abs(y) <= w + tol) return on_node(x, y);
    for (size_t j = 0; j < spec_.edges.size(); ++j) {
        const auto st = local(spec_.edges[j], x, y);
        if (st[0] >= w - tol && st[0] <= spec_.edges[j].length + tol && std::abs(st[1]) <= w + tol)
            return on_edge(static_cast<int>(j), x, y, st[0], st[1]);
    }
    return {0.0, 0.0, 0.0};
}

std::array<double, 3> TubeAsymptotic::on_node(double x, double y) const {
    const double eps = spec_.eps;
    std::array<double, 3> v{0.0, 0.0, 0.0};
    double el = 1.0;
    for (const auto& nl : node_layers_) {
        const auto b = nl.layer_at(x / eps, y / eps);
        v[0] += el * eps * eps * b[0];
        v[1] += el * eps * eps * b[1];
        v[2] += el * eps * b[2];
        el *= eps;
    }
    v[2] += cut_.theta(0, x, y) * constants_.d.at(0).at(0);
    return v;
}

std::array<double, 3> TubeAsymptotic::on_edge(int j, double x, double y, double s, double t) const {
    const double eps = spec_.eps;
    const TubeEdge& e = spec_.edges[j];
    const auto d = dir(e);
    const std::array<double, 2> n{-d[1], d[0]};
    const double chi = cut_.chi(j, s);
    std::array<double, 3> v{0.0, 0.0, 0.0};

    if (chi > 0.0) {
        CrossSection cs;
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto it = cache_.find({j, s});
            if (it == cache_.end()) it = cache_.emplace(std::make_pair(j, s), edges_[j].cross_section(eps, s)).first;
            cs = it->second;
        }
        const double xi = t / eps;
        const double a1 = cs.u1(xi), a2 = cs.u2(xi);
        v[0] += chi * (a1 * d[0] + a2 * n[0]);
        v[1] += chi * (a1 * d[1] + a2 * n[1]);
        v[2] += chi * cs.p(xi);
    }

    const double en = cut_.eta_node(j, s);
    if (en > 0.0) {
        double el = 1.0;
        for (const auto& nl : node_layers_) {
            const auto b = nl.layer_at(x / eps, y / eps);
            v[0] += en * el * eps * eps * b[0];
            v[1] += en * el * eps * eps * b[1];
            v[2] += en * el * eps * b[2];
            el *= eps;
        }
    }

    const double eo = cut_.eta_outer(j, s);
    if (eo > 0.0) {
        const double h1 = (e.length - s) / eps, h2 = t / eps;
        const double chat = layer_cutoff(h1, spec_.d_hat0);
        double el = 1.0;
        for (const auto& ol : outer_layers_[j]) {
            const auto b = half_strip_value(ol, h1, h2);
            // frame (-d, n)
            v[0] += eo * el * eps * eps * (-b[0] * d[0] + b[1] * n[0]);
            v[1] += eo * el * eps * eps * (-b[0] * d[1] + b[1] * n[1]);
            v[2] += eo * el * eps * b[2];
            el *= eps;
        }
        // The layer carries the edge far field on the complement of chi: the
        // Poiseuille slot, its pressure slope, and the end values of q_l, l >= 1.
        const double c = constants_.c[j];
        const double pois = 2.0 * c * n1_value(h2);
        v[0] += eo * (1.0 - chat) * eps * eps * pois * d[0];
        v[1] += eo * (1.0 - chat) * eps * eps * pois * d[1];
        double tail = -eps * c * e.nu(e.length) * h1;
        double el2 = eps;
        for (int l = 1; l <= k_; ++l) {
            tail += el2 * edges_[j].level(l).q(e.length);
            el2 *= eps;
        }
        v[2] += eo * (1.0 - chat) * tail;
    }

    if (chi < 1.0) {
        const double q0_end = edges_[j].level(0).q(e.length);
        v[2] += (1.0 - chi) * (cut_.theta(0, x, y) * constants_.d.at(j).at(0) + cut_.theta(j + 1, x, y) * q0_end);
    }
    return v;
}

std::shared_ptr<TubeAsymptotic> assemble_global(const TubeSpec& spec, int k, const TubeResolution& res) {
    spec.validate(k);
    const size_t m = spec.edges.size();
    const auto flux = spec.edge_fluxes();
    const double nu0 = spec.edges[0].nu(0.0);

    TubeConstants cst;
    for (double f : flux) cst.c.push_back(-6.0 * f);

    // Node layers: only level 0 is driven (Poiseuille slots and the node force).
    std::vector<JunctionSolution> node_layers;
    for (int l = 0; l <= k; ++l) {
        JunctionProblem jp;
        jp.nu0 = nu0;
        jp.truncation = res.node_truncation;
        jp.cells_per_width = res.cells_per_width;
        jp.d_hat0 = spec.d_hat0;
        for (size_t j = 0; j < m; ++j) jp.branches.push_back({spec.edges[j].direction, l == 0 ? cst.c[j] : 0.0});
        if (l == 0) jp.force = spec.node_force;
        node_layers.push_back(solve_junction(jp));
    }
    const auto& plateaus = node_layers[0].next_level_d();

    // d_1 is kept even at k = 0 so that the node constants can be reported.
    cst.d.assign(m, std::vector<double>(std::max(k + 1, 2), 0.0));
    for (size_t j = 0; j < m; ++j) {
        cst.d[j][0] = spec.pressure_level;
        cst.d[j][1] = plateaus[j];
    }

    std::vector<ExpansionSet> edges;
    for (size_t j = 0; j < m; ++j) {
        const TubeEdge& e = spec.edges[j];
        ChannelProblem cp;
        cp.kind = ExpansionCase::Dirichlet;
        cp.viscosity = edge_viscosity(spec, e);
        cp.f1 = e.f1;
        cp.level_flux = std::vector<double>{flux[j]};
        cp.q_norm = QNorm{QNormalization::PinStart, 0.0};
        cp.q_pins.assign(cst.d[j].begin(), cst.d[j].begin() + k + 1);
        edges.push_back(build_expansion(cp, k));
    }

    // Outer layers, solved in the frame (-d, n) with the mismatch between the
    // data and the edge expansion at the outer base.
    std::vector<std::vector<LayerSolution>> outer(m);
    for (size_t j = 0; j < m; ++j) {
        const TubeEdge& e = spec.edges[j];
        for (int l = 0; l <= k; ++l) {
            const TransversePoly u1 = edges[j].u1(l).at(e.length);
            const TransversePoly u2 = edges[j].u2(l - 1).at(e.length);
            const Profile g = l == 0 ? e.outflow : Profile();
            HalfStripProblem hs;
            hs.nu0 = e.nu(e.length);
            hs.truncation = res.outer_truncation;
            hs.cells_per_width = res.cells_per_width;
            hs.inlet_u1 = [g, u1](double xi) { return -((g ? g(xi) : 0.0) - u1(xi)); };
            hs.inlet_u2 = [u2](double xi) { return -u2(xi); };
            outer[j].push_back(solve_half_strip(hs));
        }
        const Profile g = e.outflow;
        cst.outer.push_back(outer_constants([g](double xi) { return -g(xi); }, 0,
                                            integrate(e.nu, 0.0, e.length), cst.d[j][0]));
    }

    return std::make_shared<TubeAsymptotic>(spec, k, std::move(cst), std::move(edges), std::move(node_layers),
                                            std::move(outer));
}

ContinuityReport continuity_check(const TubeSpec& spec, const TubeConstants& constants,
                                  const std::vector<ExpansionSet>& edges, const std::vector<double>& plateaus) {
    ContinuityReport r;
    const double ref = edges.at(0).level(0).q(0.0);
    for (const auto& e : edges) r.pressure_at_node = std::max(r.pressure_at_node, std::abs(e.level(0).q(0.0) - ref));
    double csum = 0.0;
    for (double c : constants.c) csum += c;
    r.kirchhoff = std::abs(csum * mean2(n1()));
    const auto flux = spec.edge_fluxes();
    for (size_t j = 0; j < flux.size(); ++j) {
        r.outer_flux = std::max(r.outer_flux, std::abs(2.0 * constants.c[j] * mean2(n1()) - flux[j]));
        if (j < plateaus.size()) {
            const double d1 = edges[j].order() >= 1 ? edges[j].level(1).q(0.0) : constants.d[j].at(1);
            r.next_level_d = std::max(r.next_level_d, std::abs(d1 - plateaus[j]));
        }
    }
    return r;
}

StokesProblem tube_direct_problem(const TubeSpec& spec, int cells) {
    if (cells < 2 || cells % 2 != 0) throw ValidationError("cells_per_width must be an even integer >= 2");
    const double eps = spec.eps, h = eps / cells, w = 0.5 * eps;
    StokesProblem sp;
    sp.grid = MacGrid(spec.rectangles(), h, h);
    const TubeSpec sc = spec;
    const double nu0 = spec.edges.at(0).nu(0.0);

    // Edge index and local coordinates, -1 inside the node square.
    auto locate = [sc, w](double x, double y, double& s, double& t) -> int {
        if (std::abs(x) <= w && std::abs(y) <= w) return -1;
        for (size_t j = 0; j < sc.edges.size(); ++j) {
            const auto st = local(sc.edges[j], x, y);
            if (st[0] >= w && st[0] <= sc.edges[j].length + 1e-12 && std::abs(st[1]) <= w + 1e-12) {
                s = st[0];
                t = st[1];
                return static_cast<int>(j);
            }
        }
        return -2;
    };

    sp.nu = [sc, locate, nu0](double x, double y) {
        double s = 0, t = 0;
        const int j = locate(x, y, s, t);
        return j >= 0 ? sc.edges[j].nu(s) : nu0;
    };
    sp.force = [sc, locate, eps](double x, double y) -> std::array<double, 2> {
        std::array<double, 2> f{0.0, 0.0};
        double s = 0, t = 0;
        const int j = locate(x, y, s, t);
        if (j >= 0 && !sc.edges[j].f1.is_zero()) {
            const double v = sc.edges[j].f1(s);
            f[0] += v * sc.edges[j].direction[0];
            f[1] += v * sc.edges[j].direction[1];
        }
        if (sc.node_force) {
            const auto phi = sc.node_force(x / eps, y / eps);
            f[0] += phi[0];
            f[1] += phi[1];
        }
        return f;
    };

    std::vector<Profile> data;
    const auto flux = spec.edge_fluxes();
    for (size_t j = 0; j < spec.edges.size(); ++j)
        data.push_back(with_midpoint_flux(spec.edges[j].outflow, cells, flux[j]));
    sp.boundary = [sc, locate, data, eps, h](double x, double y) -> std::array<double, 2> {
        double s = 0, t = 0;
        const int j = locate(x, y, s, t);
        if (j < 0 || s < sc.edges[j].length - 0.5 * h) return {0.0, 0.0};
        const double v = eps * eps * data[j](t / eps);
        return {v * sc.edges[j].direction[0], v * sc.edges[j].direction[1]};
    };
    sp.gauge.kind = PressureGauge::Kind::MeanZero;
    return sp;
}

}  // namespace thinflow
