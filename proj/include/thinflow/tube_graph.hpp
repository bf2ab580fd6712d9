#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "thinflow/boundary_layers.hpp"
#include "thinflow/channel_expansion.hpp"
#include "thinflow/stokes_direct.hpp"

namespace thinflow {

// One edge e_j = O0 O_j of a single-bundle structure. O0 is the origin; the
// edge rectangle is {s d + t n : 0 <= s <= length, |t| <= eps/2} with
// n = (-d2, d1). nu and f1 are functions of the local abscissa s.
struct TubeEdge {
    std::array<int, 2> direction{1, 0};
    double length = 1.0;
    SmoothFunction1D nu = SmoothFunction1D::constant(1.0);
    SmoothFunction1D f1;
    // Velocity along +direction at the outer base (positive = outflow), as a
    // function of xi2 = t / eps; the physical data is eps^2 times this.
    Profile outflow;
};

struct TubeSpec {
    std::vector<TubeEdge> edges;
    double eps = 0.1;
    double beta = 0.1;                     // flat margin of nu_j and f_j
    double d_hat0 = 1.4142135623730951;    // junction radius factor
    VectorField2D node_force;              // Phi_0 in layer coordinates, empty means zero
    double pressure_level = 0.0;           // q0 at O0

    // Frame Gamma_j (columns: direction, rotated direction).
    std::array<std::array<double, 2>, 2> frame(int j) const;
    // Throws ValidationError on a malformed structure.
    void validate(int k) const;
    // Edge fluxes <g_j . d_j>; they sum to zero on a valid spec.
    std::vector<double> edge_fluxes() const;
    // Geometry of the direct problem.
    std::vector<Rect> rectangles() const;
};

// Cut-offs of the assembly, as functions of the local abscissa s of edge j.
// eta is 1 within max(|e|/4, (d_hat0 + 2) eps) of the node it belongs to and
// falls to 0 over the next |e|/8 or more; theta_i is the indicator of the disc
// of radius min|e|/2 about O_i.
struct CutoffFamily {
    const TubeSpec* spec = nullptr;
    double chi(int j, double s) const;        // 0 near both ends, 1 in between
    double eta_node(int j, double s) const;   // eta^(0) restricted to edge j
    double eta_outer(int j, double s) const;  // eta^(j)
    double theta(int i, double x, double y) const;  // i = 0 is O0
    std::array<double, 2> eta_band(int j) const;     // ramp of eta_node on edge j
};

struct TubeConstants {
    std::vector<double> c;                 // c_0^{e_j} of the Poiseuille slot
    std::vector<std::vector<double>> d;    // d_l^{e_j}, l = 0..k
    std::vector<OuterConstants> outer;     // literal outer-node constants
};

struct TubeResolution {
    int cells_per_width = 16;
    double node_truncation = 8.0;
    double outer_truncation = 8.0;
};

class TubeAsymptotic : public FieldEvaluator {
public:
    TubeAsymptotic(TubeSpec spec, int k, TubeConstants constants, std::vector<ExpansionSet> edges,
                   std::vector<JunctionSolution> node_layers, std::vector<std::vector<LayerSolution>> outer_layers);

    std::array<double, 3> at(double x, double y) const override;

    const TubeSpec& spec() const { return spec_; }
    int order() const { return k_; }
    const TubeConstants& constants() const { return constants_; }
    const ExpansionSet& edge(int j) const { return edges_.at(j); }
    const JunctionSolution& node_layer(int l) const { return node_layers_.at(l); }
    // Layer of level l at the outer base of edge j, in the frame (-d_j, n_j).
    const LayerSolution& outer_layer(int j, int l = 0) const { return outer_layers_.at(j).at(l); }
    const CutoffFamily& cutoffs() const { return cut_; }

private:
    std::array<double, 3> on_edge(int j, double x, double y, double s, double t) const;
    std::array<double, 3> on_node(double x, double y) const;

    TubeSpec spec_;
    int k_;
    TubeConstants constants_;
    std::vector<ExpansionSet> edges_;
    std::vector<JunctionSolution> node_layers_;
    std::vector<std::vector<LayerSolution>> outer_layers_;
    CutoffFamily cut_;
    mutable std::mutex cache_mutex_;
    mutable std::map<std::pair<int, double>, CrossSection> cache_;
};

// Builds edge expansions, node and outer layers and fixes all constants.
std::shared_ptr<TubeAsymptotic> assemble_global(const TubeSpec& spec, int k, const TubeResolution& res = {});

struct ContinuityReport {
    double pressure_at_node = 0.0;   // max_j |q0^{e_j}(0) - q0^{e_1}(0)|
    double kirchhoff = 0.0;          // |sum_j c_j <N1>|
    double outer_flux = 0.0;         // max_j |2 c_j <N1> - <g_j . d_j>|
    double next_level_d = 0.0;       // max_j |d_1^{e_j} - plateau_j|
};
ContinuityReport continuity_check(const TubeSpec& spec, const TubeConstants& constants,
                                  const std::vector<ExpansionSet>& edges, const std::vector<double>& plateaus);

// Direct problem on the tube domain with square cells of width eps / cells.
StokesProblem tube_direct_problem(const TubeSpec& spec, int cells_per_width);

}  // namespace thinflow
