#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "thinflow/channel_expansion.hpp"
#include "thinflow/stokes_direct.hpp"
#include "thinflow/tube_graph.hpp"

namespace thinflow {

enum class StudyCase { Periodic, Dirichlet, Tube };

std::string to_string(StudyCase c);
StudyCase study_case_from_string(const std::string& s);

// Outer expansion of a channel as a field on the centred strip.
class ExpansionEvaluator : public FieldEvaluator {
public:
    ExpansionEvaluator(const ExpansionSet& set, double eps) : set_(set), eps_(eps) {}
    std::array<double, 3> at(double x, double y) const override { return set_.evaluate(eps_, x, y); }
    void column(double x, const std::vector<double>& ys, int component, std::vector<double>& out) const override;

private:
    const ExpansionSet& set_;
    double eps_;
};

// Direct problem of a straight channel (0, length) x (-eps/2, eps/2) with
// cells across the width and x1 spacing h1. Dirichlet data eps^2 phi is
// corrected to the discrete flux of the sampled Poiseuille profile.
StokesProblem channel_direct_problem(const ChannelProblem& cp, double eps, double h1, int cells);

// Mesh policy of a rate study. For each eps the direct mesh (cells across the
// width) runs through `cells` until the H1 error changes by less than
// `tolerance` between consecutive meshes.
struct ResolutionPolicy {
    std::vector<int> cells{8, 16, 32};
    double tolerance = 0.05;
    int periodic_cells_x1 = 512;    // x1 cells per unit length, periodic case
    long max_unknowns = 1500000;    // meshes above this are skipped
    double layer_truncation = 8.0;  // node and outer layers of the tube
};

struct StudyPoint {
    double eps = 0.0;
    int cells = 0;                // mesh used for the reported norms
    ErrorNorms norms;
    std::vector<int> tried;       // meshes visited
    std::vector<double> h1_history;
    double last_change = 0.0;     // relative H1 change on the final refinement
    bool mesh_converged = false;
    int unknowns = 0;
    double seconds = 0.0;
};

struct ConvergenceStudy {
    StudyCase kind = StudyCase::Periodic;
    int k = 0;
    std::vector<double> eps;
    std::vector<StudyPoint> points;
    double slope = 0.0;            // least squares on log(h1) vs log(eps)
    double slope_stderr = 0.0;
    double slope_low = 0.0, slope_high = 0.0;  // slope +- 2 stderr
    double expected = 0.0;         // theoretical exponent for this case
    bool mesh_policy_ok = true;
};

struct RateStudyInput {
    StudyCase kind = StudyCase::Periodic;
    int k = 0;
    std::vector<double> eps;
    ChannelProblem channel;  // periodic and Dirichlet cases
    TubeSpec tube;           // tube case; eps is overwritten per point
    ResolutionPolicy policy;
};

// Default scenario of each case (used by the acceptance suite and the CLI).
RateStudyInput default_study(StudyCase kind, int k);

// Throws ValidationError on a malformed eps list (at least 4 values,
// strictly decreasing with ratio 2).
ConvergenceStudy run_rate_study(const RateStudyInput& input);

// Least-squares slope of log(y) against log(x) and its standard error.
std::pair<double, double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Slope between consecutive points, log(e1/e0)/log(x1/x0).
double pair_exponent(double x0, double e0, double x1, double e1);

// One eps point of a study at one mesh.
StudyPoint run_point(const RateStudyInput& input, double eps, int cells);

struct Section4Row {
    double eps = 0.0;
    double max_u = 0.0, max_p = 0.0;
    double l2_u = 0.0, l2_p = 0.0;
    int unknowns = 0;
};

struct Section4RectangleReport {
    double q0_closed_form_error = 0.0;  // max |q0 - (-x(x+2) + 3)|
    std::vector<Section4Row> rows;
    double exponent_u = 0.0, exponent_p = 0.0;
};

// nu = 2 x + 2 on (0, 1), Poiseuille data eps^2 eta (1 - eta) at both ends,
// p = 0 at the outlet. Cells: x1 cells per unit, cells across the width.
Section4RectangleReport run_section4_rectangle(const std::vector<double>& eps = {0.1, 0.05}, int cells_x1 = 400,
                                               int cells_x2 = 64);

struct Section4TshapeRow {
    double eps = 0.0;
    double profile_rel_error = 0.0;  // cross-section of u2 at x2 = 0.2 in the vertical branch
    double branch_max_u = 0.0;       // velocity max error away from the junction
    double branch_max_p = 0.0;
    double boundary_flux = 0.0;
    int unknowns = 0;
    // False when on some edge the node and outer cut-off bands overlap (edge
    // shorter than about 2 (d_hat0 + 2) eps); the composite is pre-asymptotic.
    bool layers_separated = true;
    std::vector<std::array<double, 3>> profile;  // (x1, direct u2, asymptotic u2)
};

struct Section4TshapeReport {
    std::vector<Section4TshapeRow> rows;
    double exponent_u = 0.0;
};

// The T of the experiment in coordinates centred at the node. Fluxes: in at
// the left end and at the top, twice that out at the bottom.
TubeSpec section4_tshape_spec(double eps);
Section4TshapeReport run_section4_tshape(const std::vector<double>& eps = {0.1, 0.05}, int cells = 16);

// Discrete momentum residual of the sampled order-k channel expansion against
// the continuous prediction eps^{k+1} ||F^k||.
struct ResidualCheck {
    double eps = 0.0;
    double discrete = 0.0;
    double predicted = 0.0;
    double ratio = 0.0;
};
ResidualCheck residual_cross_check(const ExpansionSet& set, double eps, int cells_x1, int cells_x2);

nlohmann::json to_json(const ErrorNorms& n);
nlohmann::json to_json(const ConvergenceStudy& s);
nlohmann::json to_json(const Section4RectangleReport& r);
nlohmann::json to_json(const Section4TshapeReport& r);
// Per-eps CSV table of a study.
void write_study_csv(const std::string& path, const ConvergenceStudy& s);

// Thread cap from THINFLOW_THREADS (default: hardware concurrency, at least 1).
int thread_cap();

}  // namespace thinflow
