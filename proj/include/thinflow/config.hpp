#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "thinflow/channel_expansion.hpp"
#include "thinflow/tube_graph.hpp"
#include "thinflow/verify.hpp"

namespace thinflow {

struct EdgeConfig {
    std::array<int, 2> direction{1, 0};
    double length = 1.0;
    std::string nu = "1";
    std::string f1 = "0";
    std::string outflow;  // expression in x standing for xi2 in (-1/2, 1/2)
};

// Everything a run needs. Expressions are kept as text so that a config
// serializes back to itself.
struct RunConfig {
    std::string command;  // channel-periodic, channel, tube, direct, bl, convergence, section4
    // direct: channel-periodic | channel | tube; bl: half-strip | junction;
    // convergence: periodic | dirichlet | tube; section4: rectangle | tshape
    std::string target;

    // channels
    std::string nu, f1 = "0", phi_in, phi_out;
    double length = 1.0;
    double rho = 0.0;

    // tubes
    std::vector<EdgeConfig> edges;
    double beta = 0.1;
    double d_hat0 = 1.4142135623730951;
    double pressure_level = 0.0;

    // single half-strip layer
    double nu0 = 1.0;
    std::string inlet_u1, inlet_u2;

    // numerics
    int k = 0;
    double eps = 0.1;
    std::vector<double> eps_list;
    int cells = 16;       // across the width
    int cells_x1 = 0;     // per unit length along a channel, 0 picks a default
    std::vector<int> mesh{8, 16, 32};
    double tolerance = 0.05;
    double truncation = 10.0;
    bool compare = false;
    bool dump_fields = false;
    std::string output = "out";
};

// Throws ValidationError naming the offending field, e.g. "edges[1].length".
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);
void validate(const RunConfig& c);

// "0.1", "1/8" or a comma separated list of those.
std::vector<double> parse_number_list(const std::string& text);

ChannelProblem channel_problem(const RunConfig& c, ExpansionCase kind);
TubeSpec tube_spec(const RunConfig& c);
RateStudyInput rate_study_input(const RunConfig& c);

}  // namespace thinflow
