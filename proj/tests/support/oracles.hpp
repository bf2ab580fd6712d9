#pragma once

// Independent reference values shared by the unit tests and the acceptance
// runner. Nothing here calls into the library's own quadrature or solvers.

#include <array>
#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "thinflow/smooth_function.hpp"

namespace oracle {

inline double gk(const std::function<double(double)>& f, double a, double b) {
    if (b == a) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-14);
}

// q0 of the periodic cell: primitive of f1 - nu <f1> / <nu>, mean zero.
inline double periodic_q0(const thinflow::SmoothFunction1D& nu, const thinflow::SmoothFunction1D& f1, double x) {
    auto fn = [&](double t) { return nu(t); };
    auto ff = [&](double t) { return f1(t); };
    const double ratio = gk(ff, 0.0, 1.0) / gk(fn, 0.0, 1.0);
    auto dq = [&](double t) { return f1(t) - ratio * nu(t); };
    // mean of q(t) = int_0^t dq is int_0^1 (1 - s) dq(s) ds
    const double mean = gk([&](double s) { return (1.0 - s) * dq(s); }, 0.0, 1.0);
    return gk(dq, 0.0, x) - mean;
}

// integral of the solution of q'' = N1 - <N1>, q(+-1/2) = 0, through the
// Green's function of d^2 on (-1/2, 1/2).
inline double r_constant_quadrature() {
    auto p = [](double s) { return 0.5 * (s * s - 0.25) + 1.0 / 12.0; };
    auto q = [&](double x) {
        auto g = [&](double s) { return (s < x ? (x - 0.5) * (s + 0.5) : (s - 0.5) * (x + 0.5)) * p(s); };
        return gk(g, -0.5, x) + gk(g, x, 0.5);
    };
    return gk(q, -0.5, 0.5);
}

inline const double pi = M_PI;

// Manufactured solution on the unit square: u = curl of
// sin^2(pi x) sin^2(pi y), p = cos(pi x) sin(pi y), nu = 1 + x^2/2 + y/4.
// The force was generated symbolically (sympy) for -div(nu D u) + grad p
// with D u = (grad u + grad u^T) / 2.
inline std::array<double, 3> mms_exact(double x, double y) {
    return {2 * pi * std::pow(std::sin(pi * x), 2) * std::sin(pi * y) * std::cos(pi * y),
            -2 * pi * std::sin(pi * x) * std::pow(std::sin(pi * y), 2) * std::cos(pi * x),
            std::cos(pi * x) * std::sin(pi * y)};
}

inline std::array<double, 2> mms_force(double x, double y) {
    const double w = 2 * x * x + y + 4;
    const double sx = std::sin(pi * x), cx = std::cos(pi * x), sy = std::sin(pi * y), cy = std::cos(pi * y);
    const double f1 =
        0.25 * pi *
        (-2 * pi * x * (std::cos(pi * (2 * x - 2 * y)) - std::cos(pi * (2 * x + 2 * y))) +
         4 * pi * pi * w * sx * sx * sy * cy - 4 * pi * pi * w * sy * cx * cx * cy + pi * pi * w * std::sin(2 * pi * y) -
         pi * sx * sx * cy * cy - 4 * sx * sy + pi * sy * sy * cx * cx);
    const double f2 =
        0.5 * pi *
        (-pi * x * (-std::cos(2 * pi * x) + std::cos(2 * pi * y)) +
         0.25 * pi * (std::cos(pi * (2 * x - 2 * y)) - std::cos(pi * (2 * x + 2 * y))) -
         2 * pi * pi * w * sx * sy * sy * cx + 2 * pi * pi * w * sx * cx * cy * cy - 0.5 * pi * pi * w * std::sin(2 * pi * x) +
         2 * cx * cy);
    return {f1, f2};
}

inline double mms_nu(double x, double y) { return 1.0 + 0.5 * x * x + 0.25 * y; }

}  // namespace oracle
