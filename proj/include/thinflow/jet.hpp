#pragma once

#include <vector>

namespace thinflow {

// Truncated Taylor series about a point: c[i] = f^(i)(x) / i!.
class Jet {
public:
    Jet() = default;
    explicit Jet(int order, double value = 0.0) : c_(order + 1, 0.0) { c_[0] = value; }
    static Jet constant(int order, double v) { return Jet(order, v); }
    static Jet variable(int order, double x);  // the identity function at x

    int order() const { return static_cast<int>(c_.size()) - 1; }
    double operator[](int i) const { return c_[i]; }
    double& operator[](int i) { return c_[i]; }
    double value() const { return c_[0]; }
    double derivative(int n) const;  // f^(n)(x)

    Jet truncated(int order) const;
    // Jet of f^(n), one order shorter per derivative.
    Jet differentiated(int n) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);
    Jet& operator+=(double s) { c_[0] += s; return *this; }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator-(Jet a) { return a *= -1.0; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);

private:
    std::vector<double> c_;
};

Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double r);
Jet pow_int(const Jet& a, int n);
// Compose a polynomial (monomial coefficients) with a jet.
Jet poly_compose(const std::vector<double>& poly, const Jet& a);

}  // namespace thinflow
