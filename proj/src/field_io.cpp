#include <fstream>
#include <iomanip>

#include <json.hpp>

#include "thinflow/errors.hpp"
#include "thinflow/stokes_direct.hpp"

namespace thinflow {

using nlohmann::json;

void write_field(const std::string& path, const MacField& field) {
    const MacGrid& g = field.grid();
    json j;
    j["format"] = "thinflow-mac-field";
    j["version"] = 1;
    j["staggering"] = "p: cell centres; u1: vertical faces (nx+1 per row); u2: horizontal faces (nx per row)";
    j["h1"] = g.h1();
    j["h2"] = g.h2();
    j["periodic_x1"] = g.periodic();
    j["nx"] = g.nx();
    j["ny"] = g.ny();
    j["origin"] = {g.x0(), g.y0()};
    json rects = json::array();
    for (const Rect& r : g.rects()) rects.push_back({r.x0, r.y0, r.x1, r.y1});
    j["rectangles"] = rects;
    j["u1"] = field.u1_data();
    j["u2"] = field.u2_data();
    j["p"] = field.p_data();
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << std::setprecision(17) << j.dump(1) << '\n';
}

MacField read_field(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed field dump: " + std::string(e.what()));
    }
    if (j.value("format", "") != "thinflow-mac-field") throw ValidationError("not a thinflow field dump");
    std::vector<Rect> rects;
    for (const auto& r : j.at("rectangles")) rects.push_back({r[0], r[1], r[2], r[3]});
    MacField f(MacGrid(rects, j.at("h1"), j.at("h2"), j.at("periodic_x1")));
    auto load = [&](const char* key, std::vector<double>& dst) {
        auto v = j.at(key).get<std::vector<double>>();
        if (v.size() != dst.size()) throw ValidationError(std::string("field dump: wrong length for ") + key);
        dst = std::move(v);
    };
    load("u1", f.u1_data());
    load("u2", f.u2_data());
    load("p", f.p_data());
    return f;
}

void write_field_csv(const std::string& path, const MacField& f) {
    const MacGrid& g = f.grid();
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path + " for writing");
    os << std::setprecision(12) << "x,y,u1,u2,p\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.fluid(i, j))
                os << g.xc(i) << ',' << g.yc(j) << ',' << 0.5 * (f.u1(i, j) + f.u1(i + 1, j)) << ','
                   << 0.5 * (f.u2(i, j) + f.u2(i, j + 1)) << ',' << f.p(i, j) << '\n';
}

}  // namespace thinflow
