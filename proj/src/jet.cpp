#include "thinflow/jet.hpp"

#include <algorithm>
#include <cmath>

#include "thinflow/errors.hpp"

namespace thinflow {

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

void check_orders(const Jet& a, const Jet& b) {
    if (a.order() != b.order()) throw ValidationError("jet order mismatch");
}

}  // namespace

Jet Jet::variable(int order, double x) {
    Jet j(order, x);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
}

double Jet::derivative(int n) const {
    if (n > order()) throw OrderOverflow("jet does not carry derivative of order " + std::to_string(n));
    return c_[n] * factorial(n);
}

Jet Jet::truncated(int order) const {
    Jet j;
    j.c_.assign(c_.begin(), c_.begin() + std::min<int>(order + 1, c_.size()));
    j.c_.resize(order + 1, 0.0);
    return j;
}

Jet Jet::differentiated(int n) const {
    if (n > order()) throw OrderOverflow("cannot differentiate jet of order " + std::to_string(order()));
    Jet j(order() - n);
    for (int i = 0; i <= j.order(); ++i) {
        // (i+n)!/i! falling factor
        double f = 1.0;
        for (int k = i + 1; k <= i + n; ++k) f *= k;
        j.c_[i] = c_[i + n] * f;
    }
    return j;
}

Jet& Jet::operator+=(const Jet& o) {
    check_orders(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    check_orders(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& c : c_) c *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    check_orders(a, b);
    const int n = a.order();
    Jet r(n);
    for (int i = 0; i <= n; ++i) {
        double s = 0.0;
        for (int k = 0; k <= i; ++k) s += a.c_[k] * b.c_[i - k];
        r.c_[i] = s;
    }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    check_orders(a, b);
    if (b.c_[0] == 0.0) throw ValidationError("division by a function vanishing at the evaluation point");
    const int n = a.order();
    Jet r(n);
    for (int i = 0; i <= n; ++i) {
        double s = a.c_[i];
        for (int k = 1; k <= i; ++k) s -= b.c_[k] * r.c_[i - k];
        r.c_[i] = s / b.c_[0];
    }
    return r;
}

Jet exp(const Jet& a) {
    const int n = a.order();
    Jet r(n, std::exp(a[0]));
    for (int i = 1; i <= n; ++i) {
        double s = 0.0;
        for (int k = 1; k <= i; ++k) s += k * a[k] * r[i - k];
        r[i] = s / i;
    }
    return r;
}

Jet log(const Jet& a) {
    if (a[0] <= 0.0) throw ValidationError("log of a non-positive value");
    const int n = a.order();
    Jet r(n, std::log(a[0]));
    for (int i = 1; i <= n; ++i) {
        double s = a[i];
        for (int k = 1; k < i; ++k) s -= (static_cast<double>(k) / i) * r[k] * a[i - k];
        r[i] = s / a[0];
    }
    return r;
}

namespace {

void sincos(const Jet& a, Jet& s, Jet& c) {
    const int n = a.order();
    s = Jet(n, std::sin(a[0]));
    c = Jet(n, std::cos(a[0]));
    for (int i = 1; i <= n; ++i) {
        double ss = 0.0, cc = 0.0;
        for (int k = 1; k <= i; ++k) {
            ss += k * a[k] * c[i - k];
            cc -= k * a[k] * s[i - k];
        }
        s[i] = ss / i;
        c[i] = cc / i;
    }
}

}  // namespace

Jet sin(const Jet& a) {
    Jet s, c;
    sincos(a, s, c);
    return s;
}

Jet cos(const Jet& a) {
    Jet s, c;
    sincos(a, s, c);
    return c;
}

Jet pow(const Jet& a, double r) {
    if (r == std::floor(r) && std::abs(r) <= 64) return pow_int(a, static_cast<int>(r));
    if (a[0] <= 0.0) throw ValidationError("non-integer power of a non-positive value");
    const int n = a.order();
    Jet b(n, std::pow(a[0], r));
    for (int i = 1; i <= n; ++i) {
        double s = 0.0;
        for (int k = 1; k <= i; ++k) s += ((r + 1.0) * k - i) * a[k] * b[i - k];
        b[i] = s / (i * a[0]);
    }
    return b;
}

Jet sqrt(const Jet& a) { return pow(a, 0.5); }

Jet pow_int(const Jet& a, int n) {
    if (n < 0) return Jet::constant(a.order(), 1.0) / pow_int(a, -n);
    Jet result = Jet::constant(a.order(), 1.0);
    Jet base = a;
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return result;
}

Jet poly_compose(const std::vector<double>& poly, const Jet& a) {
    Jet r = Jet::constant(a.order(), 0.0);
    for (auto it = poly.rbegin(); it != poly.rend(); ++it) {
        r = r * a;
        r += *it;
    }
    return r;
}

}  // namespace thinflow
