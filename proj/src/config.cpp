#include "thinflow/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "thinflow/errors.hpp"
#include "thinflow/expression.hpp"

namespace thinflow {

namespace {

using nlohmann::json;

// Typed access to one JSON object, with error messages carrying the path.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(where("") + "expected an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception& e) {
            throw ValidationError(where(key) + "wrong type (" + e.what() + ")");
        }
    }

    // Numbers or strings such as "1/8".
    void numbers(const char* key, std::vector<double>& out) {
        seen_.insert(key);
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) return;
        if (!it->is_array()) throw ValidationError(where(key) + "expected an array");
        out.clear();
        for (const auto& v : *it) {
            if (v.is_number()) {
                out.push_back(v.get<double>());
            } else if (v.is_string()) {
                const auto vals = parse_number_list(v.get<std::string>());
                out.insert(out.end(), vals.begin(), vals.end());
            } else {
                throw ValidationError(where(key) + "expected numbers");
            }
        }
    }

    const json* child(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() || it->is_null() ? nullptr : &*it;
    }

    void reject_unknown() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ValidationError(where(it.key()) + "unknown field");
    }

    std::string where(const std::string& key) const {
        std::string p = path_;
        if (!key.empty()) p += (p.empty() ? "" : ".") + key;
        return p.empty() ? "config: " : p + ": ";
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ValidationError(field + ": " + what);
}

SmoothFunction1D expression(const std::string& text, const std::string& field) {
    require(!text.empty(), field, "missing");
    try {
        return parse_expression(text);
    } catch (const ValidationError& e) {
        throw ValidationError(field + ": " + e.what());
    }
}

const std::set<std::string> kCommands{"channel-periodic", "channel", "tube", "direct", "bl", "convergence", "section4"};

std::string default_target(const std::string& command) {
    if (command == "direct") return "channel";
    if (command == "bl") return "half-strip";
    if (command == "convergence") return "periodic";
    if (command == "section4") return "rectangle";
    return "";
}

void validate_channel(const RunConfig& c, bool periodic) {
    expression(c.nu, "nu");
    expression(c.f1, "f1");
    require(c.length > 0.0, "length", "must be positive");
    if (!periodic) {
        expression(c.phi_in, "phi_in");
        expression(c.phi_out, "phi_out");
        require(c.rho >= 0.0 && 2.0 * c.rho < c.length, "rho", "must lie in [0, length/2)");
    }
}

void validate_tube(const RunConfig& c) {
    require(!c.edges.empty(), "edges", "missing");
    for (size_t j = 0; j < c.edges.size(); ++j) {
        const std::string p = "edges[" + std::to_string(j) + "]";
        const auto& e = c.edges[j];
        require(std::abs(e.direction[0]) + std::abs(e.direction[1]) == 1, p + ".direction", "must be a unit axis vector");
        require(e.length > 0.0, p + ".length", "must be positive");
        expression(e.nu, p + ".nu");
        expression(e.f1, p + ".f1");
        expression(e.outflow, p + ".outflow");
    }
    require(c.beta > 0.0, "beta", "must be positive");
    require(c.d_hat0 > 0.0, "d_hat0", "must be positive");
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    const auto last = text.find_last_not_of(" \t");
    if (last == std::string::npos || text[last] == ',') throw ValidationError("number list '" + text + "': empty entry");
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        if (a == std::string::npos) throw ValidationError("number list '" + text + "': empty entry");
        item = item.substr(a, item.find_last_not_of(" \t") - a + 1);
        try {
            size_t pos = 0;
            const auto slash = item.find('/');
            double v;
            if (slash == std::string::npos) {
                v = std::stod(item, &pos);
                if (pos != item.size()) throw std::invalid_argument("trailing");
            } else {
                const std::string num = item.substr(0, slash), den = item.substr(slash + 1);
                size_t p1 = 0, p2 = 0;
                const double n = std::stod(num, &p1), d = std::stod(den, &p2);
                if (p1 != num.size() || p2 != den.size() || d == 0.0) throw std::invalid_argument("fraction");
                v = n / d;
            }
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw ValidationError("number list '" + text + "': cannot read '" + item + "'");
        }
    }
    if (out.empty()) throw ValidationError("number list '" + text + "': empty");
    return out;
}

RunConfig parse_config(const json& j) {
    RunConfig c;
    Reader r(j, "");
    r.get("command", c.command);
    r.get("target", c.target);
    r.get("nu", c.nu);
    r.get("f1", c.f1);
    r.get("phi_in", c.phi_in);
    r.get("phi_out", c.phi_out);
    r.get("length", c.length);
    r.get("rho", c.rho);
    if (const json* edges = r.child("edges")) {
        if (!edges->is_array()) throw ValidationError("edges: expected an array");
        for (size_t i = 0; i < edges->size(); ++i) {
            EdgeConfig e;
            Reader er((*edges)[i], "edges[" + std::to_string(i) + "]");
            er.get("direction", e.direction);
            er.get("length", e.length);
            er.get("nu", e.nu);
            er.get("f1", e.f1);
            er.get("outflow", e.outflow);
            er.reject_unknown();
            c.edges.push_back(e);
        }
    }
    r.get("beta", c.beta);
    r.get("d_hat0", c.d_hat0);
    r.get("pressure_level", c.pressure_level);
    r.get("nu0", c.nu0);
    r.get("inlet_u1", c.inlet_u1);
    r.get("inlet_u2", c.inlet_u2);
    r.get("k", c.k);
    r.get("eps", c.eps);
    r.numbers("eps_list", c.eps_list);
    r.get("cells", c.cells);
    r.get("cells_x1", c.cells_x1);
    r.get("mesh", c.mesh);
    r.get("tolerance", c.tolerance);
    r.get("truncation", c.truncation);
    r.get("compare", c.compare);
    r.get("dump_fields", c.dump_fields);
    r.get("output", c.output);
    r.reject_unknown();
    if (c.target.empty()) c.target = default_target(c.command);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("config " + path + ": " + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c) {
    json edges = json::array();
    for (const auto& e : c.edges)
        edges.push_back(
            {{"direction", e.direction}, {"length", e.length}, {"nu", e.nu}, {"f1", e.f1}, {"outflow", e.outflow}});
    return {{"command", c.command},
            {"target", c.target},
            {"nu", c.nu},
            {"f1", c.f1},
            {"phi_in", c.phi_in},
            {"phi_out", c.phi_out},
            {"length", c.length},
            {"rho", c.rho},
            {"edges", edges},
            {"beta", c.beta},
            {"d_hat0", c.d_hat0},
            {"pressure_level", c.pressure_level},
            {"nu0", c.nu0},
            {"inlet_u1", c.inlet_u1},
            {"inlet_u2", c.inlet_u2},
            {"k", c.k},
            {"eps", c.eps},
            {"eps_list", c.eps_list},
            {"cells", c.cells},
            {"cells_x1", c.cells_x1},
            {"mesh", c.mesh},
            {"tolerance", c.tolerance},
            {"truncation", c.truncation},
            {"compare", c.compare},
            {"dump_fields", c.dump_fields},
            {"output", c.output}};
}

void validate(const RunConfig& c) {
    require(kCommands.count(c.command) == 1, "command", "unknown command '" + c.command + "'");
    require(c.k >= 0, "k", "must be >= 0");
    require(c.eps > 0.0 && c.eps < 0.5, "eps", "must lie in (0, 1/2)");
    for (size_t i = 0; i < c.eps_list.size(); ++i)
        require(c.eps_list[i] > 0.0 && c.eps_list[i] < 0.5, "eps_list[" + std::to_string(i) + "]",
                "must lie in (0, 1/2)");
    require(c.tolerance > 0.0, "tolerance", "must be positive");
    require(c.truncation > 0.0, "truncation", "must be positive");
    require(c.cells >= 2, "cells", "must be >= 2");
    require(c.cells_x1 >= 0, "cells_x1", "must be >= 0");
    require(!c.mesh.empty(), "mesh", "missing");
    for (size_t i = 0; i < c.mesh.size(); ++i)
        require(c.mesh[i] >= 2, "mesh[" + std::to_string(i) + "]", "must be >= 2");
    require(!c.output.empty(), "output", "missing");

    const std::string& t = c.target;
    if (c.command == "channel-periodic") {
        validate_channel(c, true);
    } else if (c.command == "channel") {
        validate_channel(c, false);
    } else if (c.command == "tube") {
        validate_tube(c);
    } else if (c.command == "direct") {
        require(t == "channel-periodic" || t == "channel" || t == "tube", "target",
                "direct needs channel-periodic, channel or tube");
        if (t == "tube")
            validate_tube(c);
        else
            validate_channel(c, t == "channel-periodic");
    } else if (c.command == "bl") {
        require(t == "half-strip" || t == "junction", "target", "bl needs half-strip or junction");
        if (t == "junction") {
            validate_tube(c);
        } else {
            require(c.nu0 > 0.0, "nu0", "must be positive");
            expression(c.inlet_u1, "inlet_u1");
            if (!c.inlet_u2.empty()) expression(c.inlet_u2, "inlet_u2");
        }
    } else if (c.command == "convergence") {
        require(t == "periodic" || t == "dirichlet" || t == "tube", "target",
                "convergence needs periodic, dirichlet or tube");
        if (!c.nu.empty() && t != "tube") validate_channel(c, t == "periodic");
        if (!c.edges.empty() && t == "tube") validate_tube(c);
    } else if (c.command == "section4") {
        require(t == "rectangle" || t == "tshape", "target", "section4 needs rectangle or tshape");
    }
}

ChannelProblem channel_problem(const RunConfig& c, ExpansionCase kind) {
    ChannelProblem cp;
    cp.kind = kind;
    const bool periodic = kind == ExpansionCase::Periodic;
    cp.viscosity = {expression(c.nu, "nu"), c.length, periodic, periodic ? 0.0 : c.rho};
    cp.f1 = expression(c.f1, "f1");
    if (!periodic) {
        cp.phi_in = expression(c.phi_in, "phi_in");
        cp.phi_out = expression(c.phi_out, "phi_out");
    }
    return cp;
}

TubeSpec tube_spec(const RunConfig& c) {
    TubeSpec s;
    s.eps = c.eps;
    s.beta = c.beta;
    s.d_hat0 = c.d_hat0;
    s.pressure_level = c.pressure_level;
    for (size_t j = 0; j < c.edges.size(); ++j) {
        const std::string p = "edges[" + std::to_string(j) + "]";
        const auto& e = c.edges[j];
        TubeEdge te;
        te.direction = e.direction;
        te.length = e.length;
        te.nu = expression(e.nu, p + ".nu");
        te.f1 = expression(e.f1, p + ".f1");
        const SmoothFunction1D g = expression(e.outflow, p + ".outflow");
        te.outflow = [g](double t) { return g(t); };
        s.edges.push_back(te);
    }
    return s;
}

RateStudyInput rate_study_input(const RunConfig& c) {
    const StudyCase kind = study_case_from_string(c.target);
    RateStudyInput in = default_study(kind, c.k);
    if (!c.eps_list.empty()) in.eps = c.eps_list;
    in.policy.cells = c.mesh;
    in.policy.tolerance = c.tolerance;
    in.policy.layer_truncation = c.truncation;
    if (c.cells_x1 > 0) in.policy.periodic_cells_x1 = c.cells_x1;
    if (kind == StudyCase::Tube) {
        if (!c.edges.empty()) {
            const double eps = in.tube.eps;
            in.tube = tube_spec(c);
            in.tube.eps = eps;
        }
    } else if (!c.nu.empty()) {
        in.channel = channel_problem(c, kind == StudyCase::Periodic ? ExpansionCase::Periodic : ExpansionCase::Dirichlet);
    }
    return in;
}

}  // namespace thinflow
