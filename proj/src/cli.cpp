#include "thinflow/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "thinflow/boundary_layers.hpp"
#include "thinflow/errors.hpp"
#include "thinflow/expression.hpp"
#include "thinflow/verify.hpp"

namespace thinflow {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string out_path(const RunConfig& c, const std::string& name) { return (fs::path(c.output) / name).string(); }

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << std::setprecision(12);
    return os;
}

json to_json(const SolveReport& r) {
    // no timings: identical configs must give identical reports
    return {{"unknowns", r.unknowns},
            {"relative_residual", r.relative_residual},
            {"max_divergence", r.max_divergence},
            {"relative_divergence", r.relative_divergence},
            {"boundary_flux_imbalance", r.boundary_flux_imbalance},
            {"backend", r.backend}};
}

json to_json(const LayerSolution& l) {
    return {{"plateaus", l.plateaus},
            {"decay_rate", l.decay_rate},
            {"boundary_flux", l.boundary_flux},
            {"station_energy", l.station_energy},
            {"zero", l.zero}};
}

json to_json(const LevelCheck& c) {
    return {{"level", c.level},
            {"incompressibility", c.incompressibility},
            {"momentum1", c.momentum1},
            {"momentum2", c.momentum2},
            {"wall", c.wall},
            {"flux_variation", c.flux_variation}};
}

Profile profile(const std::string& text) {
    if (text.empty()) return {};
    const SmoothFunction1D f = parse_expression(text);
    return [f](double t) { return f(t); };
}

void dump_field(const RunConfig& c, const std::string& stem, const MacField& f) {
    write_field(out_path(c, stem + ".json"), f);
    write_field_csv(out_path(c, stem + ".csv"), f);
}

// q_j, dq_j samples along the channel and the assembled field on a lattice.
void write_channel_tables(const RunConfig& c, const ExpansionSet& set, const FieldEvaluator& field) {
    const int n = 200;
    const double L = c.length;
    auto q = open_out(out_path(c, "q.csv"));
    q << "x";
    for (int j = 0; j <= set.order(); ++j) q << ",q_" << j;
    q << '\n';
    for (int i = 0; i <= n; ++i) {
        const double x = L * i / n;
        q << x;
        for (int j = 0; j <= set.order(); ++j) q << ',' << set.level(j).q(x);
        q << '\n';
    }
    auto e = open_out(out_path(c, "expansion.csv"));
    e << "x1,x2,u1,u2,p\n";
    for (int i = 0; i <= n; ++i) {
        const double x = L * i / n;
        for (int m = 0; m <= 10; ++m) {
            const double y = c.eps * (-0.5 + m / 10.0);
            const auto v = field.at(x, y);
            e << x << ',' << y << ',' << v[0] << ',' << v[1] << ',' << v[2] << '\n';
        }
    }
}

json run_channel(const RunConfig& c, ExpansionCase kind) {
    const bool periodic = kind == ExpansionCase::Periodic;
    const ChannelProblem cp = channel_problem(c, kind);
    const ExpansionSet set = build_expansion(cp, c.k);
    json report;
    json levels = json::array();
    const auto checks = check_levels(set);
    for (int j = 0; j <= set.order(); ++j) {
        const auto& lv = set.level(j);
        levels.push_back({{"level", j},
                          {"flux", lv.flux},
                          {"q_start", lv.q(0.0)},
                          {"q_end", lv.q(c.length)},
                          {"q_max_abs", max_abs_on(lv.q, 0.0, c.length)},
                          {"checks", to_json(checks.at(j))}});
    }
    report["levels"] = levels;

    std::optional<ChannelLayers> layers;
    if (!periodic) {
        const double trunc = std::min(c.truncation, std::max(2.0, std::floor(c.length / c.eps)));
        layers = solve_channel_layers(set, c.eps, c.cells, trunc);
        json left = json::array(), right = json::array();
        for (const auto& l : layers->left) left.push_back(to_json(l));
        for (const auto& l : layers->right) right.push_back(to_json(l));
        report["end_layers"] = {{"truncation", layers->truncation}, {"left", left}, {"right", right}};
    }
    const ExpansionEvaluator outer(set, c.eps);
    std::optional<ChannelComposite> composite;
    if (layers) composite.emplace(set, *layers);
    const FieldEvaluator& ref = composite ? static_cast<const FieldEvaluator&>(*composite) : outer;
    write_channel_tables(c, set, ref);

    if (c.compare || c.dump_fields) {
        const int nx1 = c.cells_x1 > 0 ? c.cells_x1 : 512;
        const double h1 = periodic ? c.length / std::lround(nx1 * c.length) : c.eps / c.cells;
        const StokesProblem sp = channel_direct_problem(cp, c.eps, h1, c.cells);
        if (c.dump_fields) dump_field(c, "asymptotic_field", sample_on(sp.grid, ref));
        if (c.compare) {
            SolveReport sr;
            const MacField f = solve(sp, &sr);
            report["direct"] = {{"solve", to_json(sr)}, {"errors", to_json(error_norms(f, ref))}};
            if (periodic) {
                const ResidualCheck rc = residual_cross_check(set, c.eps, nx1, c.cells);
                report["residual_check"] = {{"discrete", rc.discrete}, {"predicted", rc.predicted}, {"ratio", rc.ratio}};
            }
            if (c.dump_fields) dump_field(c, "direct_field", f);
        }
    }
    return report;
}

json run_tube(const RunConfig& c) {
    const TubeSpec spec = tube_spec(c);
    TubeResolution res;
    res.cells_per_width = c.cells;
    res.node_truncation = c.truncation;
    res.outer_truncation = c.truncation;
    const auto asy = assemble_global(spec, c.k, res);
    const TubeConstants& cst = asy->constants();
    json outer = json::array();
    for (const auto& o : cst.outer) outer.push_back({{"c_hat", o.c_hat}, {"c", o.c}, {"d_hat", o.d_hat}});
    json report;
    report["constants"] = {{"c", cst.c}, {"d", cst.d}, {"outer", outer}};
    report["edge_fluxes"] = spec.edge_fluxes();
    const JunctionSolution& node = asy->node_layer(0);
    report["node_layer"] = {{"layer", to_json(node.layer)}, {"kirchhoff", node.kirchhoff_residual()}};
    json outer_layers = json::array();
    std::vector<ExpansionSet> edges;
    for (size_t j = 0; j < spec.edges.size(); ++j) {
        outer_layers.push_back(to_json(asy->outer_layer(static_cast<int>(j), 0)));
        edges.push_back(asy->edge(static_cast<int>(j)));
    }
    report["outer_layers"] = outer_layers;
    const ContinuityReport cr = continuity_check(spec, cst, edges, node.next_level_d());
    report["continuity"] = {{"pressure_at_node", cr.pressure_at_node},
                            {"kirchhoff", cr.kirchhoff},
                            {"outer_flux", cr.outer_flux},
                            {"next_level_d", cr.next_level_d}};
    if (c.compare || c.dump_fields) {
        const StokesProblem sp = tube_direct_problem(spec, c.cells);
        if (c.dump_fields) dump_field(c, "asymptotic_field", sample_on(sp.grid, *asy));
        if (c.compare) {
            SolveReport sr;
            const MacField f = solve(sp, &sr);
            report["direct"] = {{"solve", to_json(sr)}, {"errors", to_json(error_norms(f, *asy))}};
            if (c.dump_fields) dump_field(c, "direct_field", f);
        }
    }
    return report;
}

json run_direct(const RunConfig& c) {
    StokesProblem sp;
    if (c.target == "tube") {
        sp = tube_direct_problem(tube_spec(c), c.cells);
    } else {
        const bool periodic = c.target == "channel-periodic";
        const ChannelProblem cp = channel_problem(c, periodic ? ExpansionCase::Periodic : ExpansionCase::Dirichlet);
        const int nx1 = c.cells_x1 > 0 ? c.cells_x1 : 512;
        const double h1 = periodic ? c.length / std::lround(nx1 * c.length) : c.eps / c.cells;
        sp = channel_direct_problem(cp, c.eps, h1, c.cells);
    }
    SolveReport sr;
    const MacField f = solve(sp, &sr);
    dump_field(c, "field", f);
    return {{"solve", to_json(sr)}, {"grid", {{"nx", sp.grid.nx()}, {"ny", sp.grid.ny()}, {"h1", sp.grid.h1()},
                                              {"h2", sp.grid.h2()}}}};
}

json run_bl(const RunConfig& c) {
    json report;
    if (c.target == "junction") {
        const TubeSpec spec = tube_spec(c);
        const auto flux = spec.edge_fluxes();
        JunctionProblem jp;
        jp.nu0 = spec.edges.at(0).nu(0.0);
        jp.truncation = c.truncation;
        jp.cells_per_width = c.cells;
        jp.d_hat0 = c.d_hat0;
        for (size_t j = 0; j < spec.edges.size(); ++j) jp.branches.push_back({spec.edges[j].direction, -6.0 * flux[j]});
        const JunctionSolution js = solve_junction(jp);
        json cs = json::array();
        for (const auto& b : jp.branches) cs.push_back(b.c);
        report = {{"layer", to_json(js.layer)}, {"kirchhoff", js.kirchhoff_residual()}, {"c", cs}};
        if (c.dump_fields) dump_field(c, "layer_field", js.layer.field);
        return report;
    }
    HalfStripProblem hp;
    hp.nu0 = c.nu0;
    hp.inlet_u1 = profile(c.inlet_u1);
    hp.inlet_u2 = profile(c.inlet_u2);
    hp.truncation = c.truncation;
    hp.cells_per_width = c.cells;
    report["compatibility"] = check_compatibility(hp.inlet_u1);
    const LayerSolution l = solve_half_strip(hp);
    report["layer"] = to_json(l);
    if (c.dump_fields && !l.zero) dump_field(c, "layer_field", l.field);
    return report;
}

json run_convergence(const RunConfig& c) {
    const ConvergenceStudy s = run_rate_study(rate_study_input(c));
    write_study_csv(out_path(c, "convergence.csv"), s);
    return to_json(s);
}

json run_section4(const RunConfig& c) {
    const std::vector<double> eps = c.eps_list.empty() ? std::vector<double>{0.1, 0.05} : c.eps_list;
    if (c.target == "rectangle") {
        const int nx1 = c.cells_x1 > 0 ? c.cells_x1 : 400;
        return to_json(run_section4_rectangle(eps, nx1, c.cells));
    }
    const Section4TshapeReport r = run_section4_tshape(eps, c.cells);
    auto os = open_out(out_path(c, "tshape_profile.csv"));
    os << "eps,x1,u2_direct,u2_asymptotic\n";
    for (const auto& row : r.rows)
        for (const auto& p : row.profile) os << row.eps << ',' << p[0] << ',' << p[1] << ',' << p[2] << '\n';
    return to_json(r);
}

void print_summary(const RunConfig& c, const json& r) {
    std::cout << c.command << (c.target.empty() ? "" : " " + c.target) << ": wrote " << out_path(c, "report.json")
              << '\n';
    if (c.command == "convergence")
        std::cout << "  slope " << r.at("slope").get<double>() << " +- " << 2.0 * r.at("slope_stderr").get<double>()
                  << " (theory " << r.at("expected_slope").get<double>() << ")\n";
    if (r.contains("direct"))
        std::cout << "  H1 error vs direct " << r.at("direct").at("errors").at("h1_u").get<double>() << '\n';
}

}  // namespace

json run_command(const RunConfig& c) {
    validate(c);
    fs::create_directories(c.output);
    json body;
    if (c.command == "channel-periodic")
        body = run_channel(c, ExpansionCase::Periodic);
    else if (c.command == "channel")
        body = run_channel(c, ExpansionCase::Dirichlet);
    else if (c.command == "tube")
        body = run_tube(c);
    else if (c.command == "direct")
        body = run_direct(c);
    else if (c.command == "bl")
        body = run_bl(c);
    else if (c.command == "convergence")
        body = run_convergence(c);
    else
        body = run_section4(c);
    json report = {{"command", c.command}, {"target", c.target}, {"config", to_json(c)}, {"result", body}};
    {
        auto os = open_out(out_path(c, "config.json"));
        os << to_json(c).dump(2) << '\n';
    }
    auto os = open_out(out_path(c, "report.json"));
    os << report.dump(2) << '\n';
    return report;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"thinflow: asymptotic expansions of variable-viscosity Stokes flow in thin channels and tubes"};
    std::string command, target, config_path, eps_text, mesh_text;
    RunConfig flags;
    bool print_config = false;
    app.add_option("command", command, "channel-periodic | channel | tube | direct | bl | convergence | section4");
    app.add_option("target", target, "direct: channel-periodic|channel|tube; bl: half-strip|junction; section4: rectangle|tshape");
    app.add_option("--config", config_path, "JSON config; flags given on the command line override it");
    app.add_option("--case", target, "convergence case: periodic | dirichlet | tube");
    auto* o_nu = app.add_option("--nu", flags.nu, "viscosity nu(x)");
    auto* o_f1 = app.add_option("--f1", flags.f1, "force f1(x)");
    auto* o_pin = app.add_option("--phi-in", flags.phi_in, "inflow profile phi(x), x standing for xi2");
    auto* o_pout = app.add_option("--phi-out", flags.phi_out, "outflow profile");
    auto* o_len = app.add_option("--length", flags.length, "channel length");
    auto* o_rho = app.add_option("--rho", flags.rho, "flat margin of nu at the channel ends");
    auto* o_nu0 = app.add_option("--nu0", flags.nu0, "viscosity of a half-strip layer");
    auto* o_u1 = app.add_option("--inlet-u1", flags.inlet_u1, "half-strip inlet u1(x), x standing for xi2");
    auto* o_u2 = app.add_option("--inlet-u2", flags.inlet_u2, "half-strip inlet u2");
    auto* o_k = app.add_option("--k", flags.k, "expansion order");
    auto* o_eps = app.add_option("--eps", eps_text, "eps, or a list such as 1/8,1/16,1/32,1/64");
    auto* o_cells = app.add_option("--cells", flags.cells, "cells across the width");
    auto* o_cx1 = app.add_option("--cells-x1", flags.cells_x1, "cells per unit length (periodic channel)");
    auto* o_mesh = app.add_option("--mesh", mesh_text, "mesh ladder of a rate study, e.g. 8,16,32");
    auto* o_tol = app.add_option("--tolerance", flags.tolerance, "mesh-refinement tolerance");
    auto* o_trunc = app.add_option("--truncation", flags.truncation, "layer truncation length L");
    auto* o_cmp = app.add_flag("--compare", flags.compare, "also solve the direct problem and report errors");
    auto* o_dump = app.add_flag("--dump-fields", flags.dump_fields, "write grid field dumps");
    auto* o_out = app.add_option("--out", flags.output, "output directory");
    app.add_flag("--print-config", print_config, "print the effective config and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!command.empty()) c.command = command;
        if (!target.empty()) c.target = target;
        if (c.command.empty()) throw ValidationError("command: missing");
        if (c.target.empty()) c.target = parse_config({{"command", c.command}}).target;
        auto set = [](CLI::Option* o, auto& dst, const auto& src) {
            if (o->count() > 0) dst = src;
        };
        set(o_nu, c.nu, flags.nu);
        set(o_f1, c.f1, flags.f1);
        set(o_pin, c.phi_in, flags.phi_in);
        set(o_pout, c.phi_out, flags.phi_out);
        set(o_len, c.length, flags.length);
        set(o_rho, c.rho, flags.rho);
        set(o_nu0, c.nu0, flags.nu0);
        set(o_u1, c.inlet_u1, flags.inlet_u1);
        set(o_u2, c.inlet_u2, flags.inlet_u2);
        set(o_k, c.k, flags.k);
        set(o_cells, c.cells, flags.cells);
        set(o_cx1, c.cells_x1, flags.cells_x1);
        set(o_tol, c.tolerance, flags.tolerance);
        set(o_trunc, c.truncation, flags.truncation);
        set(o_cmp, c.compare, flags.compare);
        set(o_dump, c.dump_fields, flags.dump_fields);
        set(o_out, c.output, flags.output);
        if (o_mesh->count() > 0) {
            c.mesh.clear();
            for (double v : parse_number_list(mesh_text)) {
                if (v != std::floor(v)) throw ValidationError("mesh: entries must be integers");
                c.mesh.push_back(static_cast<int>(v));
            }
        }
        if (o_eps->count() > 0) {
            const auto v = parse_number_list(eps_text);
            if (c.command == "convergence" || c.command == "section4") {
                c.eps_list = v;
            } else {
                if (v.size() != 1) throw ValidationError("eps: " + c.command + " takes a single value");
                c.eps = v[0];
            }
        }
        validate(c);
        if (print_config) {
            std::cout << to_json(c).dump(2) << '\n';
            return 0;
        }
        const json report = run_command(c);
        print_summary(c, report.at("result"));
        return 0;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace thinflow
