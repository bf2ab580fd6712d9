#include "thinflow/transverse_poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace thinflow {

TransversePoly::TransversePoly(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }
TransversePoly::TransversePoly(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }

TransversePoly TransversePoly::constant(double c) { return TransversePoly({c}); }

TransversePoly TransversePoly::monomial(int degree, double c) {
    std::vector<double> v(degree + 1, 0.0);
    v[degree] = c;
    return TransversePoly(std::move(v));
}

void TransversePoly::trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
}

double TransversePoly::operator()(double xi) const {
    double s = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * xi + *it;
    return s;
}

TransversePoly TransversePoly::derivative(int n) const {
    std::vector<double> v = c_;
    for (int k = 0; k < n && !v.empty(); ++k) {
        std::vector<double> d(v.size() > 1 ? v.size() - 1 : 0);
        for (size_t i = 1; i < v.size(); ++i) d[i - 1] = static_cast<double>(i) * v[i];
        v = std::move(d);
    }
    return TransversePoly(std::move(v));
}

TransversePoly TransversePoly::antiderivative(double a) const {
    if (c_.empty()) return {};
    std::vector<double> v(c_.size() + 1, 0.0);
    for (size_t i = 0; i < c_.size(); ++i) v[i + 1] = c_[i] / static_cast<double>(i + 1);
    TransversePoly p(std::move(v));
    p.c_[0] = -p(a);
    p.trim();
    return p;
}

TransversePoly& TransversePoly::operator+=(const TransversePoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
}

TransversePoly& TransversePoly::operator-=(const TransversePoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
}

TransversePoly& TransversePoly::operator*=(double s) {
    for (double& c : c_) c *= s;
    trim();
    return *this;
}

TransversePoly operator*(const TransversePoly& a, const TransversePoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> v(a.c_.size() + b.c_.size() - 1, 0.0);
    for (size_t i = 0; i < a.c_.size(); ++i)
        for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
    return TransversePoly(std::move(v));
}

double TransversePoly::max_abs_coeff() const {
    double m = 0.0;
    for (double c : c_) m = std::max(m, std::abs(c));
    return m;
}

std::string TransversePoly::to_string() const {
    std::ostringstream os;
    os.precision(17);
    os << '[';
    for (size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << c_[i];
    os << ']';
    return os.str();
}

TransversePoly n1() { return TransversePoly({-0.125, 0.0, 0.5}); }

TransversePoly n2() { return d_inv(n1()); }

double mean2(const TransversePoly& p) {
    // Odd monomials integrate to zero over the symmetric interval.
    double s = 0.0;
    const auto& c = p.coeffs();
    for (size_t i = 0; i < c.size(); i += 2)
        s += c[i] * 2.0 * std::pow(0.5, static_cast<double>(i + 1)) / static_cast<double>(i + 1);
    return s;
}

TransversePoly d_inv(const TransversePoly& p) { return p.antiderivative(-0.5); }

TransversePoly d_inv_tilde(const TransversePoly& p) {
    TransversePoly q = d_inv(p);
    return q - TransversePoly::constant(mean2(q));
}

TransversePoly d_inv2(const TransversePoly& p) {
    TransversePoly q = d_inv(d_inv(p));
    const double top = q(0.5);
    return q - TransversePoly({0.5 * top, top});
}

double r_constant() {
    const TransversePoly a = n1() - TransversePoly::constant(mean2(n1()));
    return d_inv(d_inv2(a))(0.5);
}

}  // namespace thinflow
