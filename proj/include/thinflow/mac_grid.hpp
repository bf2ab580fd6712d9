#pragma once

#include <array>
#include <vector>

namespace thinflow {

struct Rect {
    double x0, y0, x1, y1;
};

enum class FaceKind { Outside, Interior, Boundary };

// Uniform staggered grid over a union of axis-aligned rectangles whose edges
// lie on grid lines. Pressure lives at cell centres, u1 on vertical faces,
// u2 on horizontal faces. With periodic_x1 the domain must be one rectangle
// and the x1 direction wraps.
class MacGrid {
public:
    MacGrid() = default;
    MacGrid(std::vector<Rect> rects, double h1, double h2, bool periodic_x1 = false);

    const std::vector<Rect>& rects() const { return rects_; }
    double h1() const { return h1_; }
    double h2() const { return h2_; }
    bool periodic() const { return periodic_; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double x0() const { return X0_; }
    double y0() const { return Y0_; }

    double xf(int i) const { return X0_ + i * h1_; }          // vertical face / corner abscissa
    double xc(int i) const { return X0_ + (i + 0.5) * h1_; }  // cell-centre abscissa
    double yf(int j) const { return Y0_ + j * h2_; }
    double yc(int j) const { return Y0_ + (j + 0.5) * h2_; }

    // Wrap an x index when periodic; returns -1 if out of range otherwise.
    int wrap_cell(int i) const;
    bool fluid(int i, int j) const;
    FaceKind u1_kind(int i, int j) const;  // face between cells (i-1, j) and (i, j)
    FaceKind u2_kind(int i, int j) const;  // face between cells (i, j-1) and (i, j)
    int u1_columns() const { return periodic_ ? nx_ : nx_ + 1; }
    int fluid_cells() const { return n_fluid_; }

private:
    std::vector<Rect> rects_;
    double h1_ = 0, h2_ = 0;
    bool periodic_ = false;
    int nx_ = 0, ny_ = 0;
    double X0_ = 0, Y0_ = 0;
    std::vector<char> mask_;
    int n_fluid_ = 0;
};

// Discrete velocity/pressure on a MacGrid. Arrays are row-major over the
// bounding box; entries outside the fluid are zero.
class MacField {
public:
    MacField() = default;
    explicit MacField(MacGrid grid);

    const MacGrid& grid() const { return grid_; }
    double& u1(int i, int j) { return u1_[idx_u1(i, j)]; }
    double u1(int i, int j) const { return u1_[idx_u1(i, j)]; }
    double& u2(int i, int j) { return u2_[idx_u2(i, j)]; }
    double u2(int i, int j) const { return u2_[idx_u2(i, j)]; }
    double& p(int i, int j) { return p_[idx_p(i, j)]; }
    double p(int i, int j) const { return p_[idx_p(i, j)]; }

    std::vector<double>& u1_data() { return u1_; }
    std::vector<double>& u2_data() { return u2_; }
    std::vector<double>& p_data() { return p_; }
    const std::vector<double>& u1_data() const { return u1_; }
    const std::vector<double>& u2_data() const { return u2_; }
    const std::vector<double>& p_data() const { return p_; }

    // Wall-aware linear interpolation; no-slip walls are assumed.
    std::array<double, 3> sample(double x, double y) const;
    double mean_pressure() const;
    void shift_pressure(double c);

    int idx_u1(int i, int j) const { return j * (grid_.nx() + 1) + i; }
    int idx_u2(int i, int j) const { return j * grid_.nx() + i; }
    int idx_p(int i, int j) const { return j * grid_.nx() + i; }

private:
    double sample_u1(double x, double y) const;
    double sample_u2(double x, double y) const;
    double sample_p(double x, double y) const;

    MacGrid grid_;
    std::vector<double> u1_, u2_, p_;
};

}  // namespace thinflow
