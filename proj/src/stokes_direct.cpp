#include "thinflow/stokes_direct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include <Eigen/SparseLU>
#ifdef THINFLOW_HAVE_UMFPACK
#include <umfpack.h>
#endif

#include "thinflow/errors.hpp"

namespace thinflow {

namespace {

struct LinearForm {
    std::vector<std::pair<int, double>> terms;
    double c = 0.0;

    LinearForm& operator+=(const LinearForm& o) {
        terms.insert(terms.end(), o.terms.begin(), o.terms.end());
        c += o.c;
        return *this;
    }
    LinearForm scaled(double s) const {
        LinearForm r = *this;
        for (auto& t : r.terms) t.second *= s;
        r.c *= s;
        return r;
    }
};

// Unknown numbering and boundary-value lookup for one problem.
class Layout {
public:
    explicit Layout(const StokesProblem& pb) : pb_(pb), g_(pb.grid) {
        const int nx = g_.nx(), ny = g_.ny();
        id_u1_.assign(static_cast<size_t>(nx + 1) * ny, -1);
        id_u2_.assign(static_cast<size_t>(nx) * (ny + 1), -1);
        id_p_.assign(static_cast<size_t>(nx) * ny, -1);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < g_.u1_columns(); ++i)
                if (g_.u1_kind(i, j) == FaceKind::Interior) {
                    id_u1_[j * (nx + 1) + i] = n_vel_++;
                    vel_index.push_back({0, i, j});
                }
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (g_.u2_kind(i, j) == FaceKind::Interior) {
                    id_u2_[j * nx + i] = n_vel_++;
                    vel_index.push_back({1, i, j});
                }
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (g_.fluid(i, j)) {
                    id_p_[j * nx + i] = n_p_++;
                    p_index.push_back({i, j});
                }
    }

    int n_vel() const { return n_vel_; }
    int n_p() const { return n_p_; }
    const MacGrid& grid() const { return g_; }

    int wrap_face(int i) const { return g_.periodic() ? ((i % g_.nx()) + g_.nx()) % g_.nx() : i; }

    std::array<double, 2> bc(double x, double y) const {
        return pb_.boundary ? pb_.boundary(x, y) : std::array<double, 2>{0.0, 0.0};
    }

    // Value of u1 on face (i, j) as a linear form.
    LinearForm u1(int i, int j, double w = 1.0) const {
        i = wrap_face(i);
        LinearForm f;
        switch (g_.u1_kind(i, j)) {
            case FaceKind::Interior: f.terms.emplace_back(id_u1_[j * (g_.nx() + 1) + i], w); break;
            case FaceKind::Boundary: f.c = w * bc(g_.xf(i), g_.yc(j))[0]; break;
            case FaceKind::Outside: throw SolverError("stencil reached outside the domain (u1)");
        }
        return f;
    }
    LinearForm u2(int i, int j, double w = 1.0) const {
        const int iw = g_.wrap_cell(i);
        LinearForm f;
        switch (iw < 0 ? FaceKind::Outside : g_.u2_kind(iw, j)) {
            case FaceKind::Interior: f.terms.emplace_back(id_u2_[j * g_.nx() + iw], w); break;
            case FaceKind::Boundary: f.c = w * bc(g_.xc(iw), g_.yf(j))[1]; break;
            case FaceKind::Outside: throw SolverError("stencil reached outside the domain (u2)");
        }
        return f;
    }
    bool u1_exists(int i, int j) const { return j >= 0 && j < g_.ny() && g_.u1_kind(wrap_face(i), j) != FaceKind::Outside; }
    bool u2_exists(int i, int j) const {
        const int iw = g_.wrap_cell(i);
        return iw >= 0 && j >= 0 && j <= g_.ny() && g_.u2_kind(iw, j) != FaceKind::Outside;
    }
    int p_id(int i, int j) const { return id_p_[j * g_.nx() + g_.wrap_cell(i)]; }
    int u1_id(int i, int j) const { return id_u1_[j * (g_.nx() + 1) + wrap_face(i)]; }
    int u2_id(int i, int j) const { return id_u2_[j * g_.nx() + g_.wrap_cell(i)]; }

    // Shear stress nu/2 (d2 u1 + d1 u2) at grid corner (i, j).
    LinearForm corner_stress(int i, int j) const {
        const double h1 = g_.h1(), h2 = g_.h2();
        const bool a = g_.fluid(i - 1, j - 1), b = g_.fluid(i, j - 1), c = g_.fluid(i - 1, j), d = g_.fluid(i, j);
        const int count = a + b + c + d;
        const double xk = g_.xf(i), yk = g_.yf(j);
        LinearForm d2u1, d1u2;
        auto central_d2u1 = [&] {
            d2u1 = u1(i, j, 1.0 / h2);
            d2u1 += u1(i, j - 1, -1.0 / h2);
        };
        auto central_d1u2 = [&] {
            d1u2 = u2(i, j, 1.0 / h1);
            d1u2 += u2(i - 1, j, -1.0 / h1);
        };
        if (count >= 3) {
            central_d2u1();
            central_d1u2();
        } else if (count == 2 && c && d) {  // wall below the corner
            const double w = bc(xk, yk)[0];
            if (u1_exists(i, j + 1)) {
                d2u1 = u1(i, j, 9.0 / (3 * h2));
                d2u1 += u1(i, j + 1, -1.0 / (3 * h2));
                d2u1.c += -8.0 * w / (3 * h2);
            } else {
                d2u1 = u1(i, j, 2.0 / h2);
                d2u1.c += -2.0 * w / h2;
            }
            central_d1u2();
        } else if (count == 2 && a && b) {  // wall above
            const double w = bc(xk, yk)[0];
            if (u1_exists(i, j - 2)) {
                d2u1 = u1(i, j - 1, -9.0 / (3 * h2));
                d2u1 += u1(i, j - 2, 1.0 / (3 * h2));
                d2u1.c += 8.0 * w / (3 * h2);
            } else {
                d2u1 = u1(i, j - 1, -2.0 / h2);
                d2u1.c += 2.0 * w / h2;
            }
            central_d1u2();
        } else if (count == 2 && b && d) {  // boundary to the left
            const double w = bc(xk, yk)[1];
            if (u2_exists(i + 1, j)) {
                d1u2 = u2(i, j, 9.0 / (3 * h1));
                d1u2 += u2(i + 1, j, -1.0 / (3 * h1));
                d1u2.c += -8.0 * w / (3 * h1);
            } else {
                d1u2 = u2(i, j, 2.0 / h1);
                d1u2.c += -2.0 * w / h1;
            }
            central_d2u1();
        } else if (count == 2 && a && c) {  // boundary to the right
            const double w = bc(xk, yk)[1];
            if (u2_exists(i - 2, j)) {
                d1u2 = u2(i - 1, j, -9.0 / (3 * h1));
                d1u2 += u2(i - 2, j, 1.0 / (3 * h1));
                d1u2.c += 8.0 * w / (3 * h1);
            } else {
                d1u2 = u2(i - 1, j, -2.0 / h1);
                d1u2.c += 2.0 * w / h1;
            }
            central_d2u1();
        } else {
            throw SolverError("corner stress requested at a convex corner");
        }
        d2u1 += d1u2;
        return d2u1.scaled(0.5 * pb_.nu(xk, yk));
    }

    std::vector<std::array<int, 3>> vel_index;
    std::vector<std::array<int, 2>> p_index;

private:
    const StokesProblem& pb_;
    const MacGrid& g_;
    std::vector<int> id_u1_, id_u2_, id_p_;
    int n_vel_ = 0, n_p_ = 0;
};

using Triplets = std::vector<Eigen::Triplet<double>>;

void emit(const LinearForm& f, int row, Triplets& t, double& rhs) {
    for (const auto& [col, w] : f.terms) t.emplace_back(row, col, w);
    rhs -= f.c;
}

}  // namespace

AssembledSystem assemble(const StokesProblem& pb) {
    if (!pb.nu) throw ValidationError("viscosity field missing");
    const Layout L(pb);
    const MacGrid& g = pb.grid;
    const double h1 = g.h1(), h2 = g.h2();
    const int nv = L.n_vel(), np = L.n_p();
    Triplets ta, tg, td;
    AssembledSystem sys;
    sys.f = Eigen::VectorXd::Zero(nv);
    sys.g = Eigen::VectorXd::Zero(np);

    auto force = [&](double x, double y) {
        return pb.force ? pb.force(x, y) : std::array<double, 2>{0.0, 0.0};
    };

    for (int row = 0; row < nv; ++row) {
        const auto [comp, i, j] = L.vel_index[row];
        LinearForm r;
        double rhs = 0.0;
        if (comp == 0) {
            for (int c : {i, i - 1}) {
                const double sgn = c == i ? -1.0 : 1.0;
                const double nu_c = pb.nu(g.xc(c), g.yc(j));
                LinearForm s = L.u1(c + 1, j, nu_c / h1);
                s += L.u1(c, j, -nu_c / h1);
                r += s.scaled(sgn / h1);
            }
            r += L.corner_stress(i, j + 1).scaled(-1.0 / h2);
            r += L.corner_stress(i, j).scaled(1.0 / h2);
            tg.emplace_back(row, L.p_id(i, j), 1.0 / h1);
            tg.emplace_back(row, L.p_id(i - 1, j), -1.0 / h1);
            rhs = force(g.xf(i), g.yc(j))[0];
        } else {
            r += L.corner_stress(i + 1, j).scaled(-1.0 / h1);
            r += L.corner_stress(i, j).scaled(1.0 / h1);
            for (int c : {j, j - 1}) {
                const double sgn = c == j ? -1.0 : 1.0;
                const double nu_c = pb.nu(g.xc(i), g.yc(c));
                LinearForm s = L.u2(i, c + 1, nu_c / h2);
                s += L.u2(i, c, -nu_c / h2);
                r += s.scaled(sgn / h2);
            }
            tg.emplace_back(row, L.p_id(i, j), 1.0 / h2);
            tg.emplace_back(row, L.p_id(i, j - 1), -1.0 / h2);
            rhs = force(g.xc(i), g.yf(j))[1];
        }
        emit(r, row, ta, rhs);
        sys.f[row] = rhs;
    }

    for (int row = 0; row < np; ++row) {
        const auto [i, j] = L.p_index[row];
        LinearForm d = L.u1(i + 1, j, 1.0 / h1);
        d += L.u1(i, j, -1.0 / h1);
        d += L.u2(i, j + 1, 1.0 / h2);
        d += L.u2(i, j, -1.0 / h2);
        double rhs = 0.0;
        emit(d, row, td, rhs);
        sys.g[row] = rhs;
    }

    // Net outward flux of the boundary data.
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.u1_columns(); ++i)
            if (g.u1_kind(i, j) == FaceKind::Boundary) {
                const double v = L.bc(g.xf(i), g.yc(j))[0] * h2;
                const double s = g.fluid(i - 1, j) ? 1.0 : -1.0;
                sys.boundary_flux += s * v;
                sys.boundary_flux_abs += std::abs(v);
            }
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.u2_kind(i, j) == FaceKind::Boundary) {
                const double v = L.bc(g.xc(i), g.yf(j))[1] * h1;
                const double s = g.fluid(i, j - 1) ? 1.0 : -1.0;
                sys.boundary_flux += s * v;
                sys.boundary_flux_abs += std::abs(v);
            }

    sys.A.resize(nv, nv);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.G.resize(nv, np);
    sys.G.setFromTriplets(tg.begin(), tg.end());
    sys.Dv.resize(np, nv);
    sys.Dv.setFromTriplets(td.begin(), td.end());
    sys.vel_index = L.vel_index;
    sys.p_index = L.p_index;
    return sys;
}

namespace {

template <class Solver>
bool factor_and_solve(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
    Solver s;
    s.compute(K);
    if (s.info() != Eigen::Success) return false;
    x = s.solve(b);
    if (s.info() != Eigen::Success) return false;
    // Two rounds of iterative refinement.
    for (int it = 0; it < 2; ++it) {
        const Eigen::VectorXd r = b - K * x;
        x += s.solve(r);
    }
    return true;
}

#ifdef THINFLOW_HAVE_UMFPACK
// Direct use of the C interface: the determinant over/underflow warnings that
// large saddle systems trigger are harmless and must not count as failure.
class Umfpack {
public:
    explicit Umfpack(const Eigen::SparseMatrix<double>& K) : K_(K) {
        umfpack_di_defaults(control_);
        // Threshold pivoting with the default 0.1 hits exact zero pivots on some
        // saddle grids that are well conditioned; plain partial pivoting does not.
        control_[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_UNSYMMETRIC;
        control_[UMFPACK_PIVOT_TOLERANCE] = 1.0;
        const int n = static_cast<int>(K_.rows());
        int st = umfpack_di_symbolic(n, n, K_.outerIndexPtr(), K_.innerIndexPtr(), K_.valuePtr(), &symbolic_,
                                     control_, info_);
        if (st != UMFPACK_OK) return;
        st = umfpack_di_numeric(K_.outerIndexPtr(), K_.innerIndexPtr(), K_.valuePtr(), symbolic_, &numeric_,
                                control_, info_);
        status_ = st;
        ok_ = st == UMFPACK_OK || st == UMFPACK_WARNING_determinant_underflow ||
              st == UMFPACK_WARNING_determinant_overflow;
    }
    ~Umfpack() {
        if (symbolic_) umfpack_di_free_symbolic(&symbolic_);
        if (numeric_) umfpack_di_free_numeric(&numeric_);
    }
    Umfpack(const Umfpack&) = delete;
    Umfpack& operator=(const Umfpack&) = delete;

    bool ok() const { return ok_; }
    int status() const { return status_; }
    bool solve(const Eigen::VectorXd& b, Eigen::VectorXd& x) {
        x.resize(b.size());
        const int st = umfpack_di_solve(UMFPACK_A, K_.outerIndexPtr(), K_.innerIndexPtr(), K_.valuePtr(), x.data(),
                                        b.data(), numeric_, control_, info_);
        return st == UMFPACK_OK;
    }

private:
    const Eigen::SparseMatrix<double>& K_;
    void* symbolic_ = nullptr;
    void* numeric_ = nullptr;
    double control_[UMFPACK_CONTROL];
    double info_[UMFPACK_INFO];
    bool ok_ = false;
    int status_ = 0;
};

bool umfpack_solve_refined(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& b, Eigen::VectorXd& x) {
    Umfpack lu(K);
    if (!lu.ok() || !lu.solve(b, x)) return false;
    Eigen::VectorXd dx;
    for (int it = 0; it < 2; ++it) {
        const Eigen::VectorXd r = b - K * x;
        if (!lu.solve(r, dx)) return false;
        x += dx;
    }
    return true;
}
#endif

}  // namespace

MacField solve(const StokesProblem& pb, SolveReport* report) {
    const auto t0 = std::chrono::steady_clock::now();
    AssembledSystem sys = assemble(pb);
    const double tol = 1e-12 * std::max(1.0, sys.boundary_flux_abs);
    if (std::abs(sys.boundary_flux) > tol)
        throw ValidationError("incompatible boundary flux: net outflow " + std::to_string(sys.boundary_flux));

    const int nv = static_cast<int>(sys.A.rows()), np = static_cast<int>(sys.G.cols());
    const int n = nv + np;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(sys.A.nonZeros() + 2 * sys.G.nonZeros() + 1);
    for (int k = 0; k < sys.A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.A, k); it; ++it)
            t.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < sys.G.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.G, k); it; ++it)
            t.emplace_back(it.row(), nv + it.col(), it.value());
    // The continuity rows sum to the (checked) boundary flux, so the first one
    // is redundant; it is replaced by a pressure pin and the gauge applied later.
    const double pin_scale = 1.0 / std::min(pb.grid.h1(), pb.grid.h2());
    for (int k = 0; k < sys.Dv.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(sys.Dv, k); it; ++it)
            if (it.row() != 0) t.emplace_back(nv + it.row(), it.col(), it.value());
    if (np > 0) t.emplace_back(nv, nv, pin_scale);
    Eigen::SparseMatrix<double> K(n, n);
    K.setFromTriplets(t.begin(), t.end());
    K.makeCompressed();
    Eigen::VectorXd b(n);
    b << sys.f, sys.g;
    if (np > 0) b[nv] = 0.0;

    Eigen::VectorXd x;
    std::string backend;
    bool ok = false;
#ifdef THINFLOW_HAVE_UMFPACK
    ok = umfpack_solve_refined(K, b, x);
    backend = "umfpack";
#endif
    if (!ok) {
        ok = factor_and_solve<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>(K, b, x);
        backend = "eigen-sparselu";
    }
    if (!ok || !x.allFinite()) throw SolverError("sparse factorization failed");

    const Eigen::VectorXd r = b - K * x;
    const double denom = (K.cwiseAbs() * x.cwiseAbs()).maxCoeff() + b.cwiseAbs().maxCoeff();
    const double rel = denom > 0.0 ? r.cwiseAbs().maxCoeff() / denom : 0.0;
    if (rel > 1e-10) throw SolverError("linear solve residual " + std::to_string(rel) + " above 1e-10");

    MacField field(pb.grid);
    apply_boundary_values(pb, field);
    for (int k = 0; k < nv; ++k) {
        const auto [comp, i, j] = sys.vel_index[k];
        if (comp == 0) field.u1(i, j) = x[k];
        else field.u2(i, j) = x[k];
    }
    const MacGrid& g = pb.grid;
    if (g.periodic())
        for (int j = 0; j < g.ny(); ++j) field.u1(g.nx(), j) = field.u1(0, j);
    for (int k = 0; k < np; ++k) field.p(sys.p_index[k][0], sys.p_index[k][1]) = x[nv + k];
    if (pb.gauge.kind == PressureGauge::Kind::MeanZero) {
        field.shift_pressure(-field.mean_pressure());
    } else {
        const int i = static_cast<int>(std::floor((pb.gauge.x - g.x0()) / g.h1()));
        const int j = static_cast<int>(std::floor((pb.gauge.y - g.y0()) / g.h2()));
        if (!g.fluid(i, j)) throw ValidationError("pressure pin lies outside the fluid");
        field.shift_pressure(pb.gauge.value - field.p(g.wrap_cell(i), j));
    }

    if (report) {
        const Eigen::VectorXd div = sys.Dv * x.head(nv) - sys.g;
        double umax = 0.0;
        for (double v : field.u1_data()) umax = std::max(umax, std::abs(v));
        for (double v : field.u2_data()) umax = std::max(umax, std::abs(v));
        report->unknowns = n;
        report->relative_residual = rel;
        report->max_divergence = div.size() ? div.cwiseAbs().maxCoeff() : 0.0;
        const double scale = umax / std::min(g.h1(), g.h2());
        report->relative_divergence = scale > 0.0 ? report->max_divergence / scale : report->max_divergence;
        report->boundary_flux_imbalance = sys.boundary_flux;
        report->backend = backend;
        report->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return field;
}

void apply_boundary_values(const StokesProblem& pb, MacField& field) {
    const MacGrid& g = field.grid();
    if (!pb.boundary) return;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i <= g.nx(); ++i)
            if (g.u1_kind(i, j) == FaceKind::Boundary) field.u1(i, j) = pb.boundary(g.xf(i), g.yc(j))[0];
    for (int j = 0; j <= g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i)
            if (g.u2_kind(i, j) == FaceKind::Boundary) field.u2(i, j) = pb.boundary(g.xc(i), g.yf(j))[1];
}

DiscreteResidual discrete_residual(const StokesProblem& pb, const MacField& field) {
    const AssembledSystem sys = assemble(pb);
    const int nv = static_cast<int>(sys.A.rows()), np = static_cast<int>(sys.G.cols());
    Eigen::VectorXd u(nv), p(np);
    for (int k = 0; k < nv; ++k) {
        const auto [comp, i, j] = sys.vel_index[k];
        u[k] = comp == 0 ? field.u1(i, j) : field.u2(i, j);
    }
    for (int k = 0; k < np; ++k) p[k] = field.p(sys.p_index[k][0], sys.p_index[k][1]);
    const double w = pb.grid.h1() * pb.grid.h2();
    DiscreteResidual d;
    d.momentum_l2 = std::sqrt(w * (sys.A * u + sys.G * p - sys.f).squaredNorm());
    d.continuity_l2 = std::sqrt(w * (sys.Dv * u - sys.g).squaredNorm());
    return d;
}

void FieldEvaluator::column(double x, const std::vector<double>& ys, int component, std::vector<double>& out) const {
    out.resize(ys.size());
    for (size_t k = 0; k < ys.size(); ++k) out[k] = at(x, ys[k])[component];
}

MacField sample_on(const MacGrid& g, const FieldEvaluator& ref) {
    MacField f(g);
    std::vector<double> ys, vals;
    std::vector<int> js;
    for (int i = 0; i <= g.nx(); ++i) {
        ys.clear();
        js.clear();
        for (int j = 0; j < g.ny(); ++j)
            if (g.u1_kind(i, j) != FaceKind::Outside) {
                ys.push_back(g.yc(j));
                js.push_back(j);
            }
        if (ys.empty()) continue;
        ref.column(g.xf(i), ys, 0, vals);
        for (size_t k = 0; k < js.size(); ++k) f.u1(i, js[k]) = vals[k];
    }
    for (int i = 0; i < g.nx(); ++i) {
        for (int comp : {1, 2}) {
            ys.clear();
            js.clear();
            const int jmax = comp == 1 ? g.ny() : g.ny() - 1;
            for (int j = 0; j <= jmax; ++j) {
                const bool ok = comp == 1 ? g.u2_kind(i, j) != FaceKind::Outside : g.fluid(i, j);
                if (ok) {
                    ys.push_back(comp == 1 ? g.yf(j) : g.yc(j));
                    js.push_back(j);
                }
            }
            if (ys.empty()) continue;
            ref.column(g.xc(i), ys, comp, vals);
            for (size_t k = 0; k < js.size(); ++k) (comp == 1 ? f.u2(i, js[k]) : f.p(i, js[k])) = vals[k];
        }
    }
    return f;
}

ErrorNorms error_norms(const MacField& a, const MacField& b) {
    const MacGrid& g = a.grid();
    if (g.nx() != b.grid().nx() || g.ny() != b.grid().ny() || g.h1() != b.grid().h1() || g.h2() != b.grid().h2())
        throw ValidationError("error_norms: fields live on different grids");
    const double h1 = g.h1(), h2 = g.h2(), w = h1 * h2;
    const int nx = g.nx(), ny = g.ny();
    auto e1 = [&](int i, int j) { return a.u1(i, j) - b.u1(i, j); };
    auto e2 = [&](int i, int j) { return a.u2(i, j) - b.u2(i, j); };
    auto v1 = [&](int i, int j) {
        if (g.periodic()) i = ((i % nx) + nx) % nx;
        return i >= 0 && i <= nx && j >= 0 && j < ny && g.u1_kind(i, j) != FaceKind::Outside;
    };
    auto v2 = [&](int i, int j) {
        i = g.wrap_cell(i);
        return i >= 0 && j >= 0 && j <= ny && g.u2_kind(i, j) != FaceKind::Outside;
    };
    auto wi = [&](int i) { return g.periodic() ? ((i % nx) + nx) % nx : i; };
    ErrorNorms en;
    double l2 = 0.0, semi = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < g.u1_columns(); ++i) {
            if (!v1(i, j)) continue;
            const double e = e1(i, j);
            const bool bnd = g.u1_kind(i, j) == FaceKind::Boundary;
            l2 += (bnd ? 0.5 : 1.0) * w * e * e;
            en.max_u = std::max(en.max_u, std::abs(e));
            if (g.fluid(i, j) && v1(i + 1, j)) {
                const double d = (e1(wi(i + 1), j) - e) / h1;
                semi += w * d * d;
            }
            if (v1(i, j + 1)) {
                const double d = (e1(i, j + 1) - e) / h2;
                semi += w * d * d;
            }
            for (int dj : {-1, 1})
                if (!v1(i, j + dj)) {
                    const double d = e / (0.5 * h2);
                    semi += 0.5 * w * d * d;
                }
        }
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) {
            if (!v2(i, j)) continue;
            const double e = e2(i, j);
            const bool bnd = g.u2_kind(i, j) == FaceKind::Boundary;
            l2 += (bnd ? 0.5 : 1.0) * w * e * e;
            en.max_u = std::max(en.max_u, std::abs(e));
            if (g.fluid(i, j) && v2(i, j + 1)) {
                const double d = (e2(i, j + 1) - e) / h2;
                semi += w * d * d;
            }
            if (v2(i + 1, j)) {
                const double d = (e2(g.wrap_cell(i + 1), j) - e) / h1;
                semi += w * d * d;
            }
            for (int di : {-1, 1})
                if (!v2(i + di, j)) {
                    const double d = e / (0.5 * h1);
                    semi += 0.5 * w * d * d;
                }
        }
    en.l2_u = std::sqrt(l2);
    en.h1semi_u = std::sqrt(semi);
    en.h1_u = std::sqrt(l2 + semi);
    const double ma = a.mean_pressure(), mb = b.mean_pressure();
    double lp = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (g.fluid(i, j)) {
                const double e = (a.p(i, j) - ma) - (b.p(i, j) - mb);
                lp += w * e * e;
                en.max_p = std::max(en.max_p, std::abs(e));
            }
    en.l2_p = std::sqrt(lp);
    return en;
}

ErrorNorms error_norms(const MacField& a, const FieldEvaluator& b) { return error_norms(a, sample_on(a.grid(), b)); }

}  // namespace thinflow
