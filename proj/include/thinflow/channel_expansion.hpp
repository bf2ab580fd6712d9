#pragma once

#include <array>
#include <optional>
#include <vector>

#include "thinflow/separable_field.hpp"
#include "thinflow/smooth_function.hpp"
#include "thinflow/transverse_poly.hpp"

namespace thinflow {

enum class ExpansionCase { Periodic, Dirichlet };

// nu(x1) on [0, length]. Dirichlet channels need nu = nu0 on margins of
// width rho at both ends so that the end layers see a constant viscosity.
struct ViscosityProfile {
    SmoothFunction1D nu;
    double length = 1.0;
    bool periodic = false;
    double rho = 0.0;

    double nu0() const { return nu(0.0); }
    // Throws ValidationError (or OrderOverflow) if nu cannot support order k.
    void validate(int k) const;
};

enum class QNormalization { ZeroMean, PinEnd, PinStart };

struct QNorm {
    QNormalization kind = QNormalization::PinEnd;
    double value = 0.0;
};

// Solution of -d/dx [ (q' - delta_{j0} f1) / (6 nu) ] = rhs.
struct QSolution {
    SmoothFunction1D q;
    SmoothFunction1D dq;
    SmoothFunction1D bracket;  // (q' - delta_{j0} f1) / (6 nu)
};

// Periodic: the bracket constant comes from periodicity of q.
// Dirichlet: bracket_at_zero fixes the bracket at x1 = 0.
QSolution solve_qj(const ViscosityProfile& visc, const SmoothFunction1D& rhs, const SmoothFunction1D& f1,
                   int j, ExpansionCase kind, double bracket_at_zero, QNorm norm);

struct ChannelProblem {
    ExpansionCase kind = ExpansionCase::Periodic;
    ViscosityProfile viscosity;
    SmoothFunction1D f1;
    // Dirichlet data: first velocity components at x1 = 0 and x1 = length,
    // as functions of xi on [-1/2, 1/2]. Second components are zero.
    SmoothFunction1D phi_in;
    SmoothFunction1D phi_out;
    // Optional per-level fluxes (levels beyond the vector get zero flux);
    // replaces the flux derived from phi_in in the Dirichlet case.
    std::optional<std::vector<double>> level_flux;
    // Normalization of q_j; Dirichlet defaults to q_j(length) = 0.
    std::optional<QNorm> q_norm;
    // Per-level pin values overriding q_norm.value (tube edges).
    std::vector<double> q_pins;
};

struct ExpansionLevel {
    SeparableField u1, u2, p;
    SmoothFunction1D q, dq, bracket;
    double flux = 0.0;
};

// Cross-section of the assembled expansion at fixed x1, as polynomials in xi
// carrying the physical scaling for one eps.
struct CrossSection {
    TransversePoly u1, u2, p;
};

class ExpansionSet {
public:
    ExpansionSet(ChannelProblem problem, std::vector<ExpansionLevel> levels);

    int order() const { return static_cast<int>(levels_.size()) - 1; }
    const ExpansionLevel& level(int j) const { return levels_.at(j); }
    const ChannelProblem& problem() const { return problem_; }
    const SmoothFunction1D& nu() const { return problem_.viscosity.nu; }

    // Fields with negative level index are zero.
    const SeparableField& u1(int j) const;
    const SeparableField& u2(int j) const;
    const SeparableField& p(int j) const;

    CrossSection cross_section(double eps, double x1) const;
    // (u1, u2, p) at a physical point of the centred strip |x2| < eps/2.
    std::array<double, 3> evaluate(double eps, double x1, double x2) const;

private:
    ChannelProblem problem_;
    std::vector<ExpansionLevel> levels_;
    SeparableField zero_;
};

ExpansionSet build_expansion(const ChannelProblem& problem, int k);

// Residual F^k = sum_s eps^s (e1[s], e2[s]) left by the order-k expansion:
// -div(nu D u^k) + grad p^k = f - eps^{k+1} F^k.
struct ResidualField {
    std::array<SeparableField, 3> e1, e2;
    std::array<double, 2> at(double eps, double x1, double xi) const;
};

ResidualField residual_fk(const ExpansionSet& set);

// Level-wise identities sampled on a grid of (x1, xi) points, scaled by the
// magnitude of the largest term involved.
struct LevelCheck {
    int level = 0;
    double incompressibility = 0.0;
    double momentum1 = 0.0;
    double momentum2 = 0.0;
    double wall = 0.0;
    double flux_variation = 0.0;
};

std::vector<LevelCheck> check_levels(const ExpansionSet& set, int samples_x1 = 17, int samples_xi = 9);

}  // namespace thinflow
