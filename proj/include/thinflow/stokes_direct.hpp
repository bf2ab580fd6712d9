#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "thinflow/mac_grid.hpp"

namespace thinflow {

using ScalarField2D = std::function<double(double, double)>;
using VectorField2D = std::function<std::array<double, 2>(double, double)>;

struct PressureGauge {
    enum class Kind { MeanZero, Pinned } kind = Kind::MeanZero;
    double x = 0.0, y = 0.0;  // pinned cell contains this point
    double value = 0.0;
};

// -div(nu D u) + grad p = f, div u = 0, u = g on the boundary.
struct StokesProblem {
    MacGrid grid;
    ScalarField2D nu;
    VectorField2D force;     // empty means zero
    VectorField2D boundary;  // empty means no-slip everywhere
    PressureGauge gauge;
};

// Saddle-point blocks. Velocity unknowns are interior faces (u1 then u2),
// pressure unknowns are fluid cells. grad = -div^T holds exactly.
struct AssembledSystem {
    Eigen::SparseMatrix<double> A;   // viscous block
    Eigen::SparseMatrix<double> G;   // pressure gradient
    Eigen::SparseMatrix<double> Dv;  // discrete divergence
    Eigen::VectorXd f;               // momentum right-hand side (with boundary data)
    Eigen::VectorXd g;               // continuity right-hand side (boundary fluxes)
    std::vector<std::array<int, 3>> vel_index;  // (component, i, j) per velocity unknown
    std::vector<std::array<int, 2>> p_index;    // (i, j) per pressure unknown
    double boundary_flux = 0.0;                 // net outward flux of the data
    double boundary_flux_abs = 0.0;             // sum of |face fluxes|
};

AssembledSystem assemble(const StokesProblem& problem);

struct SolveReport {
    int unknowns = 0;
    double relative_residual = 0.0;
    double max_divergence = 0.0;           // max |div u_h| over cells
    double relative_divergence = 0.0;      // scaled by max|u| / min(h1, h2)
    double boundary_flux_imbalance = 0.0;
    double seconds = 0.0;
    std::string backend;
};

// Throws ValidationError for incompatible boundary flux and SolverError if
// the factorization fails or the residual stays above 1e-10.
MacField solve(const StokesProblem& problem, SolveReport* report = nullptr);

// Writes u = g on boundary faces of an existing field (used when comparing
// or when building fields from samples).
void apply_boundary_values(const StokesProblem& problem, MacField& field);

// Momentum/continuity residual of a given discrete field, in the same row
// scaling as the assembled system.
struct DiscreteResidual {
    double momentum_l2 = 0.0;    // sqrt(sum r^2 h1 h2)
    double continuity_l2 = 0.0;
};
DiscreteResidual discrete_residual(const StokesProblem& problem, const MacField& field);

// Reference field that can be sampled at grid nodes.
class FieldEvaluator {
public:
    virtual ~FieldEvaluator() = default;
    virtual std::array<double, 3> at(double x, double y) const = 0;
    // Values of one component (0: u1, 1: u2, 2: p) along a vertical line.
    virtual void column(double x, const std::vector<double>& ys, int component, std::vector<double>& out) const;
};

class LambdaEvaluator : public FieldEvaluator {
public:
    explicit LambdaEvaluator(std::function<std::array<double, 3>(double, double)> f) : f_(std::move(f)) {}
    std::array<double, 3> at(double x, double y) const override { return f_(x, y); }

private:
    std::function<std::array<double, 3>(double, double)> f_;
};

class MacFieldEvaluator : public FieldEvaluator {
public:
    explicit MacFieldEvaluator(const MacField& f) : f_(f) {}
    std::array<double, 3> at(double x, double y) const override { return f_.sample(x, y); }

private:
    const MacField& f_;
};

// Sample a reference on the nodes of a grid (boundary faces included).
MacField sample_on(const MacGrid& grid, const FieldEvaluator& ref);

struct ErrorNorms {
    double l2_u = 0.0;       // discrete L2 of the velocity error
    double h1semi_u = 0.0;   // discrete H1 seminorm of the velocity error
    double h1_u = 0.0;       // sqrt(l2^2 + h1semi^2)
    double max_u = 0.0;
    double l2_p = 0.0;       // pressures compared with mean-zero gauge
    double max_p = 0.0;
};

// Norms of a - b. Walls are taken as no-slip for the wall half-cells.
ErrorNorms error_norms(const MacField& a, const MacField& b);
ErrorNorms error_norms(const MacField& a, const FieldEvaluator& b);

// Textual, self-describing dump (JSON) and a readable inverse.
void write_field(const std::string& path, const MacField& field);
MacField read_field(const std::string& path);
// Cell-centred CSV: x, y, u1, u2, p (face values averaged to centres).
void write_field_csv(const std::string& path, const MacField& field);

}  // namespace thinflow
