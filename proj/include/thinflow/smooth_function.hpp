#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "thinflow/jet.hpp"

namespace thinflow {

class JetCache;

// A function of x1 that can report derivatives to high order. Internally a
// shared, immutable expression graph evaluated by truncated Taylor
// arithmetic, so derivatives are exact up to rounding.
class SmoothFunction1D {
public:
    static constexpr int kUnbounded = std::numeric_limits<int>::max() / 4;

    class Node;
    using NodePtr = std::shared_ptr<const Node>;

    SmoothFunction1D();  // identically zero
    explicit SmoothFunction1D(NodePtr node, std::string source = {});

    static SmoothFunction1D constant(double c);
    static SmoothFunction1D identity();
    // Expression over x (see expression.hpp for the grammar).
    static SmoothFunction1D parse(const std::string& expr);
    // Samples on a strictly increasing grid, interpolated by local quintics.
    // Only derivatives up to order 5 are available.
    static SmoothFunction1D sampled(std::vector<double> x, std::vector<double> y);
    // C-infinity ramp from 0 (x <= e0) to 1 (x >= e1):
    // e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}), t = (x - e0) / (e1 - e0).
    static SmoothFunction1D smoothstep(double e0, double e1, const SmoothFunction1D& arg);

    double operator()(double x) const;
    double derivative(double x, int m) const;
    Jet jet(double x, int order) const;
    Jet jet(double x, int order, JetCache& cache) const;

    int max_order() const;
    SmoothFunction1D d(int n = 1) const;

    // Structural constant detection (no sampling).
    std::optional<double> constant_value() const;
    bool is_zero() const;

    const std::string& source() const { return source_; }
    const Node* node_id() const { return node_.get(); }
    const NodePtr& node() const { return node_; }

    friend SmoothFunction1D operator+(const SmoothFunction1D& a, const SmoothFunction1D& b);
    friend SmoothFunction1D operator-(const SmoothFunction1D& a, const SmoothFunction1D& b);
    friend SmoothFunction1D operator*(const SmoothFunction1D& a, const SmoothFunction1D& b);
    friend SmoothFunction1D operator/(const SmoothFunction1D& a, const SmoothFunction1D& b);
    friend SmoothFunction1D operator-(const SmoothFunction1D& a);
    friend SmoothFunction1D operator*(double s, const SmoothFunction1D& a);
    friend SmoothFunction1D operator*(const SmoothFunction1D& a, double s) { return s * a; }
    friend SmoothFunction1D operator+(const SmoothFunction1D& a, double s);
    friend SmoothFunction1D operator+(double s, const SmoothFunction1D& a) { return a + s; }
    friend SmoothFunction1D operator-(const SmoothFunction1D& a, double s) { return a + (-s); }
    friend SmoothFunction1D operator-(double s, const SmoothFunction1D& a) { return (-a) + s; }

private:
    NodePtr node_;
    std::string source_;
};

// Weighted sum sum_i w_i f_i, kept flat so long recursions stay shallow.
SmoothFunction1D linear_combination(const std::vector<std::pair<double, SmoothFunction1D>>& terms);

SmoothFunction1D exp(const SmoothFunction1D& a);
SmoothFunction1D log(const SmoothFunction1D& a);
SmoothFunction1D sin(const SmoothFunction1D& a);
SmoothFunction1D cos(const SmoothFunction1D& a);
SmoothFunction1D sqrt(const SmoothFunction1D& a);
SmoothFunction1D pow(const SmoothFunction1D& a, double r);

// Scalar version of SmoothFunction1D::smoothstep.
double smooth_ramp(double e0, double e1, double x);
// Quintic smoothstep t^3 (10 - 15 t + 6 t^2), C2 only.
double smoothstep5(double e0, double e1, double x);

// F(x) = integral of f from anchor to x. Values come from adaptive
// Gauss-Kronrod quadrature over a memoized panel grid on [lo, hi];
// derivatives come from the integrand. Integrating a derivative node
// collapses symbolically.
SmoothFunction1D integral(const SmoothFunction1D& f, double anchor, double lo, double hi);

// Adaptive Gauss-Kronrod (15-point) with relative tolerance. The depth cap
// bounds the work when the integrand is pure rounding noise.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-14,
                 unsigned max_depth = 10);
double integrate(const SmoothFunction1D& f, double a, double b, double tol = 1e-14, unsigned max_depth = 10);

// Per-point memo of node jets; valid for one evaluation abscissa.
class JetCache {
public:
    explicit JetCache(double x) : x_(x) {}
    double x() const { return x_; }
    const Jet* find(const void* key, int order) const;
    void store(const void* key, const Jet& j);

private:
    double x_;
    std::unordered_map<const void*, Jet> map_;
};

// Sample-based checks used to validate data.
bool is_periodic(const SmoothFunction1D& f, double period, int orders, double tol);
double max_abs_on(const SmoothFunction1D& f, double a, double b, int samples = 257);

}  // namespace thinflow
