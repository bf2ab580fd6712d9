#include "thinflow/verify.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <thread>

#include "thinflow/boundary_layers.hpp"
#include "thinflow/errors.hpp"
#include "thinflow/expression.hpp"

namespace thinflow {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// Runs f(0..n-1) on up to thread_cap() threads; rethrows the first failure.
void parallel_for(int n, const std::function<void(int)>& f) {
    const int nt = std::max(1, std::min(thread_cap(), n));
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex m;
    auto work = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(m);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

long estimate_unknowns(const RateStudyInput& in, double eps, int cells) {
    switch (in.kind) {
        case StudyCase::Periodic:
            return 3L * static_cast<long>(std::lround(in.policy.periodic_cells_x1 * in.channel.viscosity.length)) *
                   cells;
        case StudyCase::Dirichlet:
            return 3L * static_cast<long>(std::lround(in.channel.viscosity.length / eps * cells)) * cells;
        case StudyCase::Tube: {
            double len = eps;
            for (const auto& e : in.tube.edges) len += e.length;
            return 3L * static_cast<long>(std::lround(len / eps * cells)) * cells;
        }
    }
    return 0;
}

StudyPoint point_with(const RateStudyInput& in, const ExpansionSet* set, double eps, int cells) {
    StudyPoint pt;
    pt.eps = eps;
    pt.cells = cells;
    const auto t0 = Clock::now();
    SolveReport rep;
    switch (in.kind) {
        case StudyCase::Periodic: {
            const double L = in.channel.viscosity.length;
            const int nx = static_cast<int>(std::lround(in.policy.periodic_cells_x1 * L));
            const StokesProblem sp = channel_direct_problem(in.channel, eps, L / nx, cells);
            const MacField f = solve(sp, &rep);
            pt.norms = error_norms(f, ExpansionEvaluator(*set, eps));
            break;
        }
        case StudyCase::Dirichlet: {
            const StokesProblem sp = channel_direct_problem(in.channel, eps, eps / cells, cells);
            const MacField f = solve(sp, &rep);
            const ChannelComposite ref(*set, solve_channel_layers(*set, eps, cells));
            pt.norms = error_norms(f, ref);
            break;
        }
        case StudyCase::Tube: {
            TubeSpec spec = in.tube;
            spec.eps = eps;
            const MacField f = solve(tube_direct_problem(spec, cells), &rep);
            TubeResolution res;
            res.cells_per_width = cells;
            res.node_truncation = in.policy.layer_truncation;
            res.outer_truncation = in.policy.layer_truncation;
            const auto ref = assemble_global(spec, in.k, res);
            pt.norms = error_norms(f, *ref);
            break;
        }
    }
    pt.unknowns = rep.unknowns;
    pt.seconds = seconds_since(t0);
    return pt;
}

double expected_exponent(StudyCase c, int k) {
    switch (c) {
        case StudyCase::Periodic: return k + 2.5;
        case StudyCase::Dirichlet: return k + 1.5;
        case StudyCase::Tube: return k + 0.5;
    }
    return 0.0;
}

}  // namespace

// Direct problem of a straight channel (0, length) x (-eps/2, eps/2).
StokesProblem channel_direct_problem(const ChannelProblem& cp, double eps, double h1, int cells) {
    const double L = cp.viscosity.length, h2 = eps / cells;
    const bool periodic = cp.kind == ExpansionCase::Periodic;
    StokesProblem sp;
    sp.grid = MacGrid({{0.0, -0.5 * eps, L, 0.5 * eps}}, h1, h2, periodic);
    const SmoothFunction1D nu = cp.viscosity.nu, f1 = cp.f1;
    sp.nu = [nu](double x, double) { return nu(x); };
    if (!f1.is_zero()) sp.force = [f1](double x, double) -> std::array<double, 2> { return {f1(x), 0.0}; };
    if (!periodic) {
        const SmoothFunction1D pin = cp.phi_in, pout = cp.phi_out;
        const double flux = integrate(pin, -0.5, 0.5);
        const Profile gin = with_midpoint_flux([pin](double t) { return pin(t); }, cells, flux);
        const Profile gout = with_midpoint_flux([pout](double t) { return pout(t); }, cells, flux);
        sp.boundary = [gin, gout, eps, L, h1](double x, double y) -> std::array<double, 2> {
            if (x < 0.5 * h1) return {eps * eps * gin(y / eps), 0.0};
            if (x > L - 0.5 * h1) return {eps * eps * gout(y / eps), 0.0};
            return {0.0, 0.0};
        };
    }
    return sp;
}

void ExpansionEvaluator::column(double x, const std::vector<double>& ys, int component,
                                std::vector<double>& out) const {
    const CrossSection cs = set_.cross_section(eps_, x);
    const TransversePoly& poly = component == 0 ? cs.u1 : component == 1 ? cs.u2 : cs.p;
    out.resize(ys.size());
    for (size_t i = 0; i < ys.size(); ++i) out[i] = poly(ys[i] / eps_);
}

int thread_cap() {
    if (const char* s = std::getenv("THINFLOW_THREADS")) {
        const int n = std::atoi(s);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string to_string(StudyCase c) {
    switch (c) {
        case StudyCase::Periodic: return "periodic";
        case StudyCase::Dirichlet: return "dirichlet";
        case StudyCase::Tube: return "tube";
    }
    return "?";
}

StudyCase study_case_from_string(const std::string& s) {
    if (s == "periodic") return StudyCase::Periodic;
    if (s == "dirichlet") return StudyCase::Dirichlet;
    if (s == "tube") return StudyCase::Tube;
    throw ValidationError("unknown study case '" + s + "' (periodic, dirichlet, tube)");
}

RateStudyInput default_study(StudyCase kind, int k) {
    RateStudyInput in;
    in.kind = kind;
    in.k = k;
    in.eps = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
    switch (kind) {
        case StudyCase::Periodic:
            in.channel.kind = ExpansionCase::Periodic;
            in.channel.viscosity = {parse_expression("2 + sin(2*pi*x)"), 1.0, true, 0.0};
            in.channel.f1 = parse_expression("1");
            break;
        case StudyCase::Dirichlet: {
            in.channel.kind = ExpansionCase::Dirichlet;
            in.channel.viscosity = {
                parse_expression("2 + smoothstep(0.2, 0.4, x) * (1 - smoothstep(0.6, 0.8, x))"), 1.0, false, 0.2};
            const SmoothFunction1D phi = parse_expression("5 * (0.25 - x^2)^2");
            in.channel.phi_in = phi;
            in.channel.phi_out = phi;
            break;
        }
        case StudyCase::Tube: {
            // Three edges of length 2 so that the layer bands fit inside the
            // flat margins already at eps = 1/8.
            in.tube.beta = 0.45;
            const SmoothFunction1D nu = parse_expression("2 + smoothstep(0.45, 0.9, x) * (1 - smoothstep(1.1, 1.55, x))");
            auto edge = [&](int dx, int dy, double flux) {
                TubeEdge e;
                e.direction = {dx, dy};
                e.length = 2.0;
                e.nu = nu;
                e.outflow = [flux](double t) {
                    const double a = 0.25 - t * t;
                    return flux * 30.0 * a * a;
                };
                return e;
            };
            in.tube.edges = {edge(-1, 0, -2.0), edge(0, 1, 1.0), edge(0, -1, 1.0)};
            in.policy.max_unknowns = 700000;
            break;
        }
    }
    return in;
}

std::pair<double, double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = std::min(x.size(), y.size());
    if (n < 2) return {0.0, 0.0};
    std::vector<double> lx(n), ly(n);
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    const double b = sxy / sxx;
    if (n < 3) return {b, 0.0};
    double rss = 0;
    for (size_t i = 0; i < n; ++i) {
        const double r = ly[i] - (my + b * (lx[i] - mx));
        rss += r * r;
    }
    return {b, std::sqrt(rss / (n - 2) / sxx)};
}

double pair_exponent(double x0, double e0, double x1, double e1) { return std::log(e1 / e0) / std::log(x1 / x0); }

StudyPoint run_point(const RateStudyInput& in, double eps, int cells) {
    std::optional<ExpansionSet> set;
    if (in.kind != StudyCase::Tube) set.emplace(build_expansion(in.channel, in.k));
    return point_with(in, set ? &*set : nullptr, eps, cells);
}

ConvergenceStudy run_rate_study(const RateStudyInput& in) {
    if (in.eps.size() < 4) throw ValidationError("a rate study needs at least 4 eps values");
    for (size_t i = 0; i + 1 < in.eps.size(); ++i)
        if (!(in.eps[i + 1] > 0.0) || std::abs(in.eps[i] / in.eps[i + 1] - 2.0) > 1e-9)
            throw ValidationError("eps list must decrease with ratio 2");
    if (in.policy.cells.empty()) throw ValidationError("resolution policy lists no meshes");
    if (!(in.policy.tolerance > 0.0)) throw ValidationError("resolution tolerance must be positive");
    if (in.k < 0) throw ValidationError("k must be non-negative");

    std::optional<ExpansionSet> set;
    if (in.kind == StudyCase::Tube) {
        TubeSpec probe = in.tube;
        probe.eps = in.eps.back();
        probe.validate(in.k);
    } else {
        set.emplace(build_expansion(in.channel, in.k));
    }

    ConvergenceStudy st;
    st.kind = in.kind;
    st.k = in.k;
    st.eps = in.eps;
    st.expected = expected_exponent(in.kind, in.k);
    st.points.resize(in.eps.size());
    parallel_for(static_cast<int>(in.eps.size()), [&](int i) {
        const double eps = in.eps[i];
        StudyPoint best;
        double prev = -1.0;
        for (int cells : in.policy.cells) {
            if (estimate_unknowns(in, eps, cells) > in.policy.max_unknowns) break;
            StudyPoint pt = point_with(in, set ? &*set : nullptr, eps, cells);
            pt.tried = best.tried;
            pt.h1_history = best.h1_history;
            pt.tried.push_back(cells);
            pt.h1_history.push_back(pt.norms.h1_u);
            if (prev >= 0.0) {
                pt.last_change = std::abs(pt.norms.h1_u - prev) / std::max(pt.norms.h1_u, 1e-300);
                pt.mesh_converged = pt.last_change < in.policy.tolerance;
            }
            pt.seconds += best.seconds;
            prev = pt.norms.h1_u;
            best = pt;
            if (best.mesh_converged) break;
        }
        if (best.tried.empty()) throw ValidationError("no mesh of the policy fits the unknown budget");
        st.points[i] = best;
    });

    std::vector<double> h1;
    for (const auto& p : st.points) {
        h1.push_back(p.norms.h1_u);
        st.mesh_policy_ok = st.mesh_policy_ok && p.mesh_converged;
    }
    const auto [b, se] = loglog_slope(st.eps, h1);
    st.slope = b;
    st.slope_stderr = se;
    st.slope_low = b - 2.0 * se;
    st.slope_high = b + 2.0 * se;
    return st;
}

Section4RectangleReport run_section4_rectangle(const std::vector<double>& eps_list, int cells_x1, int cells_x2) {
    Section4RectangleReport rep;
    ChannelProblem cp;
    cp.kind = ExpansionCase::Dirichlet;
    cp.viscosity = {parse_expression("2*x + 2"), 1.0, false, 0.0};
    cp.phi_in = parse_expression("0.25 - x^2");
    cp.phi_out = cp.phi_in;
    const ExpansionSet set = build_expansion(cp, 0);
    for (int i = 0; i <= 200; ++i) {
        const double x = i / 200.0;
        rep.q0_closed_form_error = std::max(rep.q0_closed_form_error, std::abs(set.level(0).q(x) - (-x * (x + 2) + 3)));
    }
    for (double eps : eps_list) {
        StokesProblem sp = channel_direct_problem(cp, eps, 1.0 / cells_x1, cells_x2);
        const ExpansionEvaluator ref(set, eps);
        // p = 0 at the outlet, matched to the expansion in the outlet cell.
        const double xp = 1.0 - 0.5 / cells_x1, yp = 0.5 * eps / cells_x2;
        sp.gauge = {PressureGauge::Kind::Pinned, xp, yp, ref.at(xp, yp)[2]};
        SolveReport sr;
        const MacField f = solve(sp, &sr);
        const ErrorNorms n = error_norms(f, ref);
        rep.rows.push_back({eps, n.max_u, n.max_p, n.l2_u, n.l2_p, sr.unknowns});
    }
    if (rep.rows.size() >= 2) {
        const auto& a = rep.rows[rep.rows.size() - 2];
        const auto& b = rep.rows.back();
        rep.exponent_u = pair_exponent(a.eps, a.max_u, b.eps, b.max_u);
        rep.exponent_p = pair_exponent(a.eps, a.max_p, b.eps, b.max_p);
    }
    return rep;
}

TubeSpec section4_tshape_spec(double eps) {
    // (-1, 0] x (0, eps) and (0, eps) x (-0.45, 0.55), shifted so that the
    // node square is centred at the origin.
    TubeSpec s;
    s.eps = eps;
    s.beta = 0.1;
    const double lens[3] = {1.0 + 0.5 * eps, 0.55 - 0.5 * eps, 0.45 + 0.5 * eps};
    const int dirs[3][2] = {{-1, 0}, {0, 1}, {0, -1}};
    const double flux[3] = {-1.0, -1.0, 2.0};  // multiples of eta (1 - eta)
    for (int j = 0; j < 3; ++j) {
        TubeEdge e;
        e.direction = {dirs[j][0], dirs[j][1]};
        e.length = lens[j];
        e.nu = parse_expression("2 + 2*x * smoothstep(0.1, 0.2, x) * (1 - smoothstep(" + std::to_string(lens[j] - 0.2) +
                                ", " + std::to_string(lens[j] - 0.1) + ", x))");
        const double F = flux[j];
        e.outflow = [F](double t) { return F * (0.25 - t * t); };
        s.edges.push_back(e);
    }
    return s;
}

Section4TshapeReport run_section4_tshape(const std::vector<double>& eps_list, int cells) {
    Section4TshapeReport rep;
    for (double eps : eps_list) {
        const TubeSpec spec = section4_tshape_spec(eps);
        const StokesProblem sp = tube_direct_problem(spec, cells);
        SolveReport sr;
        const MacField f = solve(sp, &sr);
        TubeResolution res;
        res.cells_per_width = cells;
        const auto ref = assemble_global(spec, 0, res);
        const MacField r = sample_on(f.grid(), *ref);
        const MacGrid& g = f.grid();

        Section4TshapeRow row;
        row.eps = eps;
        row.unknowns = sr.unknowns;
        row.boundary_flux = sr.boundary_flux_imbalance;
        for (int j = 0; j < static_cast<int>(spec.edges.size()); ++j)
            if (ref->cutoffs().eta_band(j)[1] > 0.5 * spec.edges[j].length) row.layers_separated = false;
        const double away = 0.25;
        auto far = [away](double x, double y) { return std::max(std::abs(x), std::abs(y)) >= away; };
        const double mf = f.mean_pressure(), mr = r.mean_pressure();
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i <= g.nx(); ++i) {
                if (g.u1_kind(i, j) != FaceKind::Outside && far(g.xf(i), g.yc(j)))
                    row.branch_max_u = std::max(row.branch_max_u, std::abs(f.u1(i, j) - r.u1(i, j)));
            }
        for (int j = 0; j <= g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                if (g.u2_kind(i, j) != FaceKind::Outside && far(g.xc(i), g.yf(j)))
                    row.branch_max_u = std::max(row.branch_max_u, std::abs(f.u2(i, j) - r.u2(i, j)));
                if (j < g.ny() && g.fluid(i, j) && far(g.xc(i), g.yc(j)))
                    row.branch_max_p = std::max(row.branch_max_p, std::abs((f.p(i, j) - mf) - (r.p(i, j) - mr)));
            }

        // Cross-section of the vertical branch at x2 = 0.2 of the original frame.
        const double y = 0.2 - 0.5 * eps;
        const int jy = static_cast<int>(std::lround((y - g.y0()) / g.h2()));
        double dmax = 0.0, emax = 0.0;
        for (int i = 0; i < g.nx(); ++i) {
            if (g.u2_kind(i, jy) == FaceKind::Outside) continue;
            const double a = f.u2(i, jy), b = ref->at(g.xc(i), g.yf(jy))[1];
            row.profile.push_back({g.xc(i), a, b});
            dmax = std::max(dmax, std::abs(a));
            emax = std::max(emax, std::abs(a - b));
        }
        row.profile_rel_error = dmax > 0.0 ? emax / dmax : 0.0;
        rep.rows.push_back(std::move(row));
    }
    if (rep.rows.size() >= 2) {
        const auto& a = rep.rows[rep.rows.size() - 2];
        const auto& b = rep.rows.back();
        rep.exponent_u = pair_exponent(a.eps, a.branch_max_u, b.eps, b.branch_max_u);
    }
    return rep;
}

ResidualCheck residual_cross_check(const ExpansionSet& set, double eps, int cells_x1, int cells_x2) {
    const ChannelProblem& cp = set.problem();
    const double L = cp.viscosity.length;
    const StokesProblem sp = channel_direct_problem(cp, eps, L / std::lround(cells_x1 * L), cells_x2);
    MacField field = sample_on(sp.grid, ExpansionEvaluator(set, eps));
    apply_boundary_values(sp, field);
    ResidualCheck rc;
    rc.eps = eps;
    rc.discrete = discrete_residual(sp, field).momentum_l2;
    const ResidualField F = residual_fk(set);
    const MacGrid& g = sp.grid;
    double s = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            const auto r = F.at(eps, g.xc(i), g.yc(j) / eps);
            s += (r[0] * r[0] + r[1] * r[1]) * g.h1() * g.h2();
        }
    rc.predicted = std::pow(eps, set.order() + 1) * std::sqrt(s);
    rc.ratio = rc.predicted > 0.0 ? rc.discrete / rc.predicted : 0.0;
    return rc;
}

nlohmann::json to_json(const ErrorNorms& n) {
    return {{"l2_u", n.l2_u}, {"h1semi_u", n.h1semi_u}, {"h1_u", n.h1_u},
            {"max_u", n.max_u}, {"l2_p", n.l2_p}, {"max_p", n.max_p}};
}

nlohmann::json to_json(const ConvergenceStudy& s) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.points)
        pts.push_back({{"eps", p.eps},
                       {"cells", p.cells},
                       {"norms", to_json(p.norms)},
                       {"meshes_tried", p.tried},
                       {"h1_history", p.h1_history},
                       {"last_change", p.last_change},
                       {"mesh_converged", p.mesh_converged},
                       {"unknowns", p.unknowns}});
    return {{"case", to_string(s.kind)},
            {"k", s.k},
            {"eps", s.eps},
            {"points", pts},
            {"slope", s.slope},
            {"slope_stderr", s.slope_stderr},
            {"slope_band", {s.slope_low, s.slope_high}},
            {"expected_slope", s.expected},
            {"mesh_policy_ok", s.mesh_policy_ok}};
}

nlohmann::json to_json(const Section4RectangleReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& w : r.rows)
        rows.push_back({{"eps", w.eps}, {"max_u", w.max_u}, {"max_p", w.max_p}, {"l2_u", w.l2_u},
                        {"l2_p", w.l2_p}, {"unknowns", w.unknowns}});
    return {{"q0_closed_form_error", r.q0_closed_form_error},
            {"rows", rows},
            {"exponent_u", r.exponent_u},
            {"exponent_p", r.exponent_p}};
}

nlohmann::json to_json(const Section4TshapeReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& w : r.rows) {
        nlohmann::json prof = nlohmann::json::array();
        for (const auto& p : w.profile) prof.push_back({p[0], p[1], p[2]});
        rows.push_back({{"eps", w.eps},
                        {"profile_rel_error", w.profile_rel_error},
                        {"branch_max_u", w.branch_max_u},
                        {"branch_max_p", w.branch_max_p},
                        {"boundary_flux", w.boundary_flux},
                        {"layers_separated", w.layers_separated},
                        {"unknowns", w.unknowns},
                        {"profile_x1_direct_asymptotic", prof}});
    }
    return {{"rows", rows}, {"exponent_u", r.exponent_u}};
}

void write_study_csv(const std::string& path, const ConvergenceStudy& s) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path);
    out << std::setprecision(12);
    out << "eps,cells,l2_u,h1semi_u,h1_u,max_u,l2_p,max_p,last_change,mesh_converged\n";
    for (const auto& p : s.points)
        out << p.eps << ',' << p.cells << ',' << p.norms.l2_u << ',' << p.norms.h1semi_u << ',' << p.norms.h1_u << ','
            << p.norms.max_u << ',' << p.norms.l2_p << ',' << p.norms.max_p << ',' << p.last_change << ','
            << (p.mesh_converged ? 1 : 0) << '\n';
}

}  // namespace thinflow
