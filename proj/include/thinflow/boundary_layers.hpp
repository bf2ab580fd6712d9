#pragma once

#include <array>
#include <functional>
#include <vector>

#include "thinflow/channel_expansion.hpp"
#include "thinflow/mac_grid.hpp"
#include "thinflow/stokes_direct.hpp"

namespace thinflow {

using Profile = std::function<double(double)>;  // function of xi2 on [-1/2, 1/2]

// Layer on the truncated half-strip (0, L) x (-1/2, 1/2):
//   -(nu0/2) Lap u + grad p = 0, div u = 0, u = 0 on the walls,
//   u(0, xi2) = inlet, u(L, xi2) = 0.
struct HalfStripProblem {
    double nu0 = 1.0;
    Profile inlet_u1;  // empty means zero
    Profile inlet_u2;
    double truncation = 10.0;
    int cells_per_width = 16;
};

struct LayerSolution {
    MacField field;                      // layer coordinates
    std::vector<double> plateaus;        // per branch, branch 0 is the reference
    std::vector<double> station_energy;  // int |u|^2 dxi2 at xi1 = 1, 2, ...
    double decay_rate = 0.0;             // fitted from station_energy
    double boundary_flux = 0.0;          // net flux of the discrete inlet data
    SolveReport report;
    bool zero = false;                   // homogeneous data, no solve performed
};

// g - alpha N1 with alpha chosen so that the midpoint sum over `cells`
// equal cells of (-1/2, 1/2) equals that of the Poiseuille profile of flux
// `target`. MAC carries that profile exactly, so the discrete flux matches the
// one of the sampled continuous field and the boundary data stay compatible.
Profile with_midpoint_flux(const Profile& g, int cells, double target);

// <inlet_u1>_2 by adaptive quadrature.
double check_compatibility(const Profile& inlet_u1);

// Throws ValidationError if |<inlet_u1>| > 1e-12.
LayerSolution solve_half_strip(const HalfStripProblem& problem);

// Value of a half-strip layer (u1, u2, p) at a layer point; zero beyond the
// truncation length.
std::array<double, 3> half_strip_value(const LayerSolution& layer, double xi1, double xi2);

// Least-squares decay constant lambda of sqrt(E(s)) ~ exp(-lambda s), using
// only stations whose energy lies above the rounding floor.
double fit_decay_rate(const std::vector<double>& stations, const std::vector<double>& energy, double floor = 0.0);

// Junction of axis-aligned branches meeting in the unit node square centred at
// the origin (layer coordinates). Branch j runs along direction[j] out to the
// truncation length; its local frame is (direction, rotated direction).
struct JunctionBranch {
    std::array<int, 2> direction;  // unit axis vector
    double c = 0.0;                // Poiseuille slot: far field 2 c N1 along the branch
};

struct JunctionProblem {
    double nu0 = 1.0;
    std::vector<JunctionBranch> branches;
    VectorField2D force;  // node force in layer coordinates, empty means zero
    double truncation = 10.0;
    int cells_per_width = 16;
    double d_hat0 = 1.4142135623730951;  // cut-off band is [d_hat0 + 1, d_hat0 + 2]
};

// Total field (W, P) of the node region. The layer part is
//   u_BL = W - sum_j chi_j 2 c_j Gamma_j (N1, 0),
//   p_BL = P - sum_j chi_j (c_j nu0 xi1 + plateau_j),
// with the plateaus taken relative to branch 0.
struct JunctionSolution {
    JunctionProblem problem;
    LayerSolution layer;

    // Pressure constants d^{e_j} of the next level, equal to the plateaus.
    const std::vector<double>& next_level_d() const { return layer.plateaus; }
    std::array<double, 3> total_at(double xi1, double xi2) const;
    std::array<double, 3> layer_at(double xi1, double xi2) const;
    double kirchhoff_residual() const;  // |sum_j c_j <N1>|
};

// Throws ValidationError if the branch fluxes do not balance to 1e-10.
JunctionSolution solve_junction(const JunctionProblem& problem);

// Cut-off chi of the layer problems: 0 on [0, a], 1 beyond a + 1, quintic in
// between (a = d_hat0 + 1). Symmetric in its argument.
double layer_cutoff(double s, double d_hat0);

// Outer-node constants from the inflow profile: the first component of the
// inlet data in the reversed local frame, g1, gives
//   c_hat = -<g1>_2 / <N1>_2  (level 0, zero above),
// then c = -c_hat and d_hat = c int_0^|e| nu + d.
struct OuterConstants {
    double c_hat = 0.0;
    double c = 0.0;
    double d_hat = 0.0;
};
OuterConstants outer_constants(const Profile& g_first_reversed, int level, double nu_integral, double d);

// End layers of a Dirichlet channel of order k, one half-strip per level and
// end. Level j is driven by the mismatch
//   (delta_{j0} phi - u1_j(end, xi), -u2_{j-1}(end, xi)),
// the right end being solved in the mirrored frame xi1 -> (length - x1)/eps.
struct ChannelLayers {
    double eps = 0.0;
    double truncation = 0.0;
    std::vector<LayerSolution> left, right;
};

// Truncation defaults to min(10, floor(1/eps)).
ChannelLayers solve_channel_layers(const ExpansionSet& set, double eps, int cells_per_width,
                                   double truncation = 0.0);

// Outer expansion plus end layers:
//   u = u^k + sum_j eps^{j+2} U_j,  p = p^k + sum_j eps^{j+1} P_j.
class ChannelComposite : public FieldEvaluator {
public:
    ChannelComposite(const ExpansionSet& set, ChannelLayers layers) : set_(set), layers_(std::move(layers)) {}
    std::array<double, 3> at(double x, double y) const override;
    void column(double x, const std::vector<double>& ys, int component, std::vector<double>& out) const override;
    const ChannelLayers& layers() const { return layers_; }

private:
    std::array<double, 3> add_layers(double x, double y, std::array<double, 3> v) const;
    const ExpansionSet& set_;
    ChannelLayers layers_;
};

}  // namespace thinflow
