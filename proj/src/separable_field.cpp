#include "thinflow/separable_field.hpp"

#include <algorithm>

namespace thinflow {

SeparableField::SeparableField(std::vector<SmoothFunction1D> coeffs) : c_(std::move(coeffs)) { trim(); }

SeparableField SeparableField::product(const SmoothFunction1D& a, const TransversePoly& p) {
    std::vector<SmoothFunction1D> c;
    for (double v : p.coeffs()) c.push_back(v * a);
    return SeparableField(std::move(c));
}

void SeparableField::trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

SeparableField& SeparableField::operator+=(const SeparableField& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] + o.c_[i];
    trim();
    return *this;
}

SeparableField& SeparableField::operator-=(const SeparableField& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (size_t i = 0; i < o.c_.size(); ++i) c_[i] = c_[i] - o.c_[i];
    trim();
    return *this;
}

SeparableField operator*(double s, const SeparableField& a) {
    std::vector<SmoothFunction1D> c;
    for (const auto& f : a.c_) c.push_back(s * f);
    return SeparableField(std::move(c));
}

SeparableField operator*(const SmoothFunction1D& f, const SeparableField& a) {
    std::vector<SmoothFunction1D> c;
    for (const auto& g : a.c_) c.push_back(f * g);
    return SeparableField(std::move(c));
}

SeparableField SeparableField::dx1(int n) const {
    std::vector<SmoothFunction1D> c;
    for (const auto& f : c_) c.push_back(f.d(n));
    return SeparableField(std::move(c));
}

SeparableField SeparableField::dxi(int n) const {
    return transverse([n](const TransversePoly& p) { return p.derivative(n); });
}

SeparableField SeparableField::transverse(const std::function<TransversePoly(const TransversePoly&)>& op) const {
    std::vector<std::vector<std::pair<double, SmoothFunction1D>>> out;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        const TransversePoly image = op(TransversePoly::monomial(static_cast<int>(i)));
        const auto& t = image.coeffs();
        if (t.size() > out.size()) out.resize(t.size());
        for (size_t m = 0; m < t.size(); ++m)
            if (t[m] != 0.0) out[m].emplace_back(t[m], c_[i]);
    }
    std::vector<SmoothFunction1D> c;
    for (const auto& terms : out) c.push_back(linear_combination(terms));
    return SeparableField(std::move(c));
}

SmoothFunction1D SeparableField::mean2() const {
    std::vector<std::pair<double, SmoothFunction1D>> terms;
    for (size_t i = 0; i < c_.size(); ++i) {
        const double w = thinflow::mean2(TransversePoly::monomial(static_cast<int>(i)));
        if (w != 0.0) terms.emplace_back(w, c_[i]);
    }
    return linear_combination(terms);
}

SmoothFunction1D SeparableField::trace(double xi) const {
    std::vector<std::pair<double, SmoothFunction1D>> terms;
    double w = 1.0;
    for (size_t i = 0; i < c_.size(); ++i, w *= xi) terms.emplace_back(w, c_[i]);
    return linear_combination(terms);
}

TransversePoly SeparableField::at(double x1, int n) const {
    JetCache cache(x1);
    return at(x1, n, cache);
}

TransversePoly SeparableField::at(double x1, int n, JetCache& cache) const {
    std::vector<double> v(c_.size());
    for (size_t i = 0; i < c_.size(); ++i) v[i] = c_[i].jet(x1, n, cache).derivative(n);
    return TransversePoly(std::move(v));
}

int SeparableField::max_order() const {
    int m = SmoothFunction1D::kUnbounded;
    for (const auto& f : c_) m = std::min(m, f.max_order());
    return m;
}

}  // namespace thinflow
