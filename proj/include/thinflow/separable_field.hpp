#pragma once

#include <functional>
#include <vector>

#include "thinflow/smooth_function.hpp"
#include "thinflow/transverse_poly.hpp"

namespace thinflow {

// Field of the form sum_i a_i(x1) xi^i with exact x1-functions a_i.
class SeparableField {
public:
    SeparableField() = default;
    explicit SeparableField(std::vector<SmoothFunction1D> coeffs);
    static SeparableField product(const SmoothFunction1D& a, const TransversePoly& p);

    const std::vector<SmoothFunction1D>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }

    SeparableField& operator+=(const SeparableField& o);
    SeparableField& operator-=(const SeparableField& o);
    friend SeparableField operator+(SeparableField a, const SeparableField& b) { return a += b; }
    friend SeparableField operator-(SeparableField a, const SeparableField& b) { return a -= b; }
    friend SeparableField operator*(double s, const SeparableField& a);
    friend SeparableField operator*(const SmoothFunction1D& f, const SeparableField& a);

    SeparableField dx1(int n = 1) const;
    SeparableField dxi(int n = 1) const;
    // Apply a linear map acting on the transverse variable.
    SeparableField transverse(const std::function<TransversePoly(const TransversePoly&)>& op) const;
    SmoothFunction1D mean2() const;
    SmoothFunction1D trace(double xi) const;

    // Numeric cross-section at x1 of the n-th x1-derivative.
    TransversePoly at(double x1, int n = 0) const;
    TransversePoly at(double x1, int n, JetCache& cache) const;
    double operator()(double x1, double xi) const { return at(x1)(xi); }

    int max_order() const;

private:
    void trim();
    std::vector<SmoothFunction1D> c_;
};

}  // namespace thinflow
