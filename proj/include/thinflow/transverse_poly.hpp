#pragma once

#include <initializer_list>
#include <string>
#include <vector>

namespace thinflow {

// Polynomial in the stretched transverse variable xi on [-1/2, 1/2],
// stored by monomial coefficients c[i] * xi^i.
class TransversePoly {
public:
    TransversePoly() = default;
    explicit TransversePoly(std::vector<double> coeffs);
    TransversePoly(std::initializer_list<double> coeffs);

    static TransversePoly constant(double c);
    static TransversePoly monomial(int degree, double c = 1.0);

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    const std::vector<double>& coeffs() const { return c_; }
    double coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : 0.0; }

    double operator()(double xi) const;
    TransversePoly derivative(int n = 1) const;
    // Antiderivative vanishing at xi = a.
    TransversePoly antiderivative(double a) const;

    TransversePoly& operator+=(const TransversePoly& o);
    TransversePoly& operator-=(const TransversePoly& o);
    TransversePoly& operator*=(double s);

    friend TransversePoly operator+(TransversePoly a, const TransversePoly& b) { return a += b; }
    friend TransversePoly operator-(TransversePoly a, const TransversePoly& b) { return a -= b; }
    friend TransversePoly operator-(TransversePoly a) { return a *= -1.0; }
    friend TransversePoly operator*(TransversePoly a, double s) { return a *= s; }
    friend TransversePoly operator*(double s, TransversePoly a) { return a *= s; }
    friend TransversePoly operator*(const TransversePoly& a, const TransversePoly& b);

    bool operator==(const TransversePoly& o) const { return c_ == o.c_; }
    double max_abs_coeff() const;
    std::string to_string() const;

private:
    void trim();
    std::vector<double> c_;
};

// Transverse profiles and operators of the cross-section problem.
TransversePoly n1();                                   // (xi^2 - 1/4) / 2
TransversePoly n2();                                   // D^{-1} n1
double mean2(const TransversePoly& p);                 // integral over (-1/2, 1/2)
TransversePoly d_inv(const TransversePoly& p);         // primitive vanishing at -1/2
TransversePoly d_inv_tilde(const TransversePoly& p);   // d_inv(p) - mean2(d_inv(p))
TransversePoly d_inv2(const TransversePoly& p);        // q'' = p, q(-1/2) = q(1/2) = 0
double r_constant();                                   // d_inv(d_inv2(n1 - <n1>))(1/2)

}  // namespace thinflow
