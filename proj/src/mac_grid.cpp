#include "thinflow/mac_grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "thinflow/errors.hpp"

namespace thinflow {

namespace {

int snap(double v, double h, const char* what) {
    const double r = v / h;
    const double n = std::round(r);
    if (std::abs(r - n) > 1e-7) throw ValidationError(std::string(what) + " is not aligned with the grid");
    return static_cast<int>(n);
}

}  // namespace

MacGrid::MacGrid(std::vector<Rect> rects, double h1, double h2, bool periodic_x1)
    : rects_(std::move(rects)), h1_(h1), h2_(h2), periodic_(periodic_x1) {
    if (rects_.empty()) throw ValidationError("domain needs at least one rectangle");
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw ValidationError("grid spacings must be positive");
    if (periodic_ && rects_.size() != 1) throw ValidationError("periodic grids support a single rectangle");
    double xa = std::numeric_limits<double>::max(), ya = xa, xb = -xa, yb = -xa;
    for (const Rect& r : rects_) {
        if (!(r.x1 > r.x0) || !(r.y1 > r.y0)) throw ValidationError("degenerate rectangle");
        xa = std::min(xa, r.x0);
        ya = std::min(ya, r.y0);
        xb = std::max(xb, r.x1);
        yb = std::max(yb, r.y1);
    }
    X0_ = xa;
    Y0_ = ya;
    nx_ = snap(xb - xa, h1, "domain width");
    ny_ = snap(yb - ya, h2, "domain height");
    if (nx_ < 2 || ny_ < 2) throw ValidationError("grid too coarse");
    mask_.assign(static_cast<size_t>(nx_) * ny_, 0);
    for (const Rect& r : rects_) {
        const int i0 = snap(r.x0 - X0_, h1, "rectangle edge"), i1 = snap(r.x1 - X0_, h1, "rectangle edge");
        const int j0 = snap(r.y0 - Y0_, h2, "rectangle edge"), j1 = snap(r.y1 - Y0_, h2, "rectangle edge");
        for (int j = j0; j < j1; ++j)
            for (int i = i0; i < i1; ++i) mask_[static_cast<size_t>(j) * nx_ + i] = 1;
    }
    n_fluid_ = static_cast<int>(std::count(mask_.begin(), mask_.end(), 1));
    // Diagonal-only contacts make the corner stresses ambiguous.
    for (int j = 1; j < ny_; ++j)
        for (int i = 1; i < nx_; ++i) {
            const bool a = fluid(i - 1, j - 1), b = fluid(i, j - 1), c = fluid(i - 1, j), d = fluid(i, j);
            if ((a && d && !b && !c) || (b && c && !a && !d))
                throw ValidationError("rectangles touch only at a corner");
        }
}

int MacGrid::wrap_cell(int i) const {
    if (periodic_) return ((i % nx_) + nx_) % nx_;
    return (i < 0 || i >= nx_) ? -1 : i;
}

bool MacGrid::fluid(int i, int j) const {
    if (j < 0 || j >= ny_) return false;
    const int w = wrap_cell(i);
    if (w < 0) return false;
    return mask_[static_cast<size_t>(j) * nx_ + w] != 0;
}

FaceKind MacGrid::u1_kind(int i, int j) const {
    const bool l = fluid(i - 1, j), r = fluid(i, j);
    if (l && r) return FaceKind::Interior;
    if (l || r) return FaceKind::Boundary;
    return FaceKind::Outside;
}

FaceKind MacGrid::u2_kind(int i, int j) const {
    const bool b = fluid(i, j - 1), t = fluid(i, j);
    if (b && t) return FaceKind::Interior;
    if (b || t) return FaceKind::Boundary;
    return FaceKind::Outside;
}

MacField::MacField(MacGrid grid) : grid_(std::move(grid)) {
    const size_t nx = grid_.nx(), ny = grid_.ny();
    u1_.assign((nx + 1) * ny, 0.0);
    u2_.assign(nx * (ny + 1), 0.0);
    p_.assign(nx * ny, 0.0);
}

namespace {

// Linear interpolation along a lattice line where missing nodes mean a
// no-slip wall half a spacing beyond the last valid node.
template <class Valid, class Value>
double line_interp(double s, int n_nodes, Valid valid, Value value) {
    const int j0 = static_cast<int>(std::floor(s));
    const double a = s - j0;
    const bool v0 = j0 >= 0 && j0 < n_nodes && valid(j0);
    const bool v1 = j0 + 1 >= 0 && j0 + 1 < n_nodes && valid(j0 + 1);
    if (v0 && v1) return (1.0 - a) * value(j0) + a * value(j0 + 1);
    if (v1) return a >= 0.5 ? value(j0 + 1) * (a - 0.5) / 0.5 : 0.0;
    if (v0) return a <= 0.5 ? value(j0) * (0.5 - a) / 0.5 : 0.0;
    return 0.0;
}

}  // namespace

double MacField::sample_u1(double x, double y) const {
    const MacGrid& g = grid_;
    const double t = (x - g.x0()) / g.h1();
    int i0 = static_cast<int>(std::floor(t));
    if (!g.periodic()) i0 = std::clamp(i0, 0, g.nx() - 1);
    const double ax = t - i0;
    auto column = [&](int i) {
        if (g.periodic()) i = ((i % g.nx()) + g.nx()) % g.nx();
        return line_interp(
            (y - g.y0()) / g.h2() - 0.5, g.ny(), [&](int j) { return g.u1_kind(i, j) != FaceKind::Outside; },
            [&](int j) { return u1(i, j); });
    };
    return (1.0 - ax) * column(i0) + ax * column(i0 + 1);
}

double MacField::sample_u2(double x, double y) const {
    const MacGrid& g = grid_;
    const double t = (y - g.y0()) / g.h2();
    const int j0 = std::clamp(static_cast<int>(std::floor(t)), 0, g.ny() - 1);
    const double ay = t - j0;
    auto row = [&](int j) {
        const double s = (x - g.x0()) / g.h1() - 0.5;
        if (g.periodic()) {
            const int i0 = static_cast<int>(std::floor(s));
            const double a = s - i0;
            auto w = [&](int i) { return ((i % g.nx()) + g.nx()) % g.nx(); };
            return (1.0 - a) * u2(w(i0), j) + a * u2(w(i0 + 1), j);
        }
        return line_interp(
            s, g.nx(), [&](int i) { return g.u2_kind(i, j) != FaceKind::Outside; }, [&](int i) { return u2(i, j); });
    };
    return (1.0 - ay) * row(j0) + ay * row(j0 + 1);
}

double MacField::sample_p(double x, double y) const {
    const MacGrid& g = grid_;
    const double s = (x - g.x0()) / g.h1() - 0.5, t = (y - g.y0()) / g.h2() - 0.5;
    const int i0 = static_cast<int>(std::floor(s)), j0 = static_cast<int>(std::floor(t));
    const double a = s - i0, b = t - j0;
    double sum = 0.0, wsum = 0.0;
    for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj) {
            const int i = i0 + di, j = j0 + dj;
            if (!g.fluid(i, j)) continue;
            const double w = (di ? a : 1.0 - a) * (dj ? b : 1.0 - b) + 1e-300;
            sum += w * p(g.wrap_cell(i), j);
            wsum += w;
        }
    return wsum > 0.0 ? sum / wsum : 0.0;
}

std::array<double, 3> MacField::sample(double x, double y) const {
    return {sample_u1(x, y), sample_u2(x, y), sample_p(x, y)};
}

double MacField::mean_pressure() const {
    double s = 0.0;
    int n = 0;
    for (int j = 0; j < grid_.ny(); ++j)
        for (int i = 0; i < grid_.nx(); ++i)
            if (grid_.fluid(i, j)) {
                s += p(i, j);
                ++n;
            }
    return n ? s / n : 0.0;
}

void MacField::shift_pressure(double c) {
    for (int j = 0; j < grid_.ny(); ++j)
        for (int i = 0; i < grid_.nx(); ++i)
            if (grid_.fluid(i, j)) p(i, j) += c;
}

}  // namespace thinflow
