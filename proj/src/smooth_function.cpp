#include "thinflow/smooth_function.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "thinflow/errors.hpp"
#include "thinflow/expression.hpp"

namespace thinflow {

class SmoothFunction1D::Node {
public:
    virtual ~Node() = default;
    virtual Jet compute(double x, int order, JetCache& cache) const = 0;
    virtual int max_order() const { return kUnbounded; }
    virtual std::optional<double> constant_value() const { return std::nullopt; }

    Jet jet(double x, int order, JetCache& cache) const {
        if (order > max_order())
            throw OrderOverflow("derivative of order " + std::to_string(order) +
                                " requested from a function supporting order " +
                                std::to_string(max_order()));
        if (const Jet* hit = cache.find(this, order)) return hit->truncated(order);
        Jet j = compute(x, order, cache);
        cache.store(this, j);
        return j;
    }
};

const Jet* JetCache::find(const void* key, int order) const {
    auto it = map_.find(key);
    if (it == map_.end() || it->second.order() < order) return nullptr;
    return &it->second;
}

void JetCache::store(const void* key, const Jet& j) {
    auto it = map_.find(key);
    if (it == map_.end() || it->second.order() < j.order()) map_[key] = j;
}

namespace {

using Node = SmoothFunction1D::Node;
using NodePtr = SmoothFunction1D::NodePtr;

class ConstNode final : public Node {
public:
    explicit ConstNode(double c) : c_(c) {}
    Jet compute(double, int order, JetCache&) const override { return Jet::constant(order, c_); }
    std::optional<double> constant_value() const override { return c_; }

private:
    double c_;
};

class IdentityNode final : public Node {
public:
    Jet compute(double x, int order, JetCache&) const override { return Jet::variable(order, x); }
};

class SumNode final : public Node {
public:
    SumNode(std::vector<std::pair<double, NodePtr>> terms, double offset)
        : terms_(std::move(terms)), offset_(offset) {
        for (const auto& t : terms_) max_ = std::min(max_, t.second->max_order());
    }
    Jet compute(double x, int order, JetCache& cache) const override {
        Jet r = Jet::constant(order, offset_);
        for (const auto& [w, n] : terms_) r += w * n->jet(x, order, cache);
        return r;
    }
    int max_order() const override { return max_; }
    const std::vector<std::pair<double, NodePtr>>& terms() const { return terms_; }
    double offset() const { return offset_; }

private:
    std::vector<std::pair<double, NodePtr>> terms_;
    double offset_;
    int max_ = SmoothFunction1D::kUnbounded;
};

class ProductNode final : public Node {
public:
    ProductNode(NodePtr a, NodePtr b) : a_(std::move(a)), b_(std::move(b)) {}
    Jet compute(double x, int order, JetCache& cache) const override {
        return a_->jet(x, order, cache) * b_->jet(x, order, cache);
    }
    int max_order() const override { return std::min(a_->max_order(), b_->max_order()); }

private:
    NodePtr a_, b_;
};

class QuotientNode final : public Node {
public:
    QuotientNode(NodePtr a, NodePtr b) : a_(std::move(a)), b_(std::move(b)) {}
    Jet compute(double x, int order, JetCache& cache) const override {
        return a_->jet(x, order, cache) / b_->jet(x, order, cache);
    }
    int max_order() const override { return std::min(a_->max_order(), b_->max_order()); }

private:
    NodePtr a_, b_;
};

enum class Fn { Exp, Log, Sin, Cos, Pow, Smoothstep };

class UnaryNode final : public Node {
public:
    UnaryNode(Fn fn, NodePtr a, double p0 = 0.0, double p1 = 0.0)
        : fn_(fn), a_(std::move(a)), p0_(p0), p1_(p1) {}
    Jet compute(double x, int order, JetCache& cache) const override {
        const Jet a = a_->jet(x, order, cache);
        switch (fn_) {
            case Fn::Exp: return thinflow::exp(a);
            case Fn::Log: return thinflow::log(a);
            case Fn::Sin: return thinflow::sin(a);
            case Fn::Cos: return thinflow::cos(a);
            case Fn::Pow: return thinflow::pow(a, p0_);
            case Fn::Smoothstep: {
                const double w = p1_ - p0_;
                const double t = (a[0] - p0_) / w;
                if (t <= 0.0) return Jet::constant(order, 0.0);
                if (t >= 1.0) return Jet::constant(order, 1.0);
                Jet tj = a;
                tj += -p0_;
                tj *= 1.0 / w;
                const Jet one = Jet::constant(order, 1.0);
                const Jet l = thinflow::exp(-(one / tj));
                const Jet r = thinflow::exp(-(one / (one - tj)));
                return l / (l + r);
            }
        }
        return a;
    }
    int max_order() const override { return a_->max_order(); }

private:
    Fn fn_;
    NodePtr a_;
    double p0_, p1_;
};

class DerivNode final : public Node {
public:
    DerivNode(NodePtr a, int n) : a_(std::move(a)), n_(n) {}
    Jet compute(double x, int order, JetCache& cache) const override {
        return a_->jet(x, order + n_, cache).differentiated(n_);
    }
    int max_order() const override {
        const int m = a_->max_order();
        return m >= SmoothFunction1D::kUnbounded ? m : m - n_;
    }
    const NodePtr& base() const { return a_; }
    int n() const { return n_; }

private:
    NodePtr a_;
    int n_;
};

class PrimitiveNode final : public Node {
public:
    PrimitiveNode(NodePtr f, double anchor, double lo, double hi) : f_(std::move(f)), anchor_(anchor) {
        if (!(hi > lo)) throw ValidationError("integral: empty interval");
        const int panels = 64;
        for (int i = 0; i <= panels; ++i) nodes_.push_back(lo + (hi - lo) * i / panels);
        values_.assign(nodes_.size(), 0.0);
        for (int i = 1; i <= panels; ++i)
            values_[i] = values_[i - 1] + quad(nodes_[i - 1], nodes_[i]);
        const double shift = value_from_grid(anchor_);
        for (double& v : values_) v -= shift;
    }
    Jet compute(double x, int order, JetCache& cache) const override {
        Jet r(order, value_from_grid(x));
        if (order >= 1) {
            const Jet f = f_->jet(x, order - 1, cache);
            for (int i = 0; i < order; ++i) r[i + 1] = f[i] / (i + 1);
        }
        return r;
    }
    int max_order() const override {
        const int m = f_->max_order();
        return m >= SmoothFunction1D::kUnbounded ? m : m + 1;
    }
    const NodePtr& integrand() const { return f_; }

private:
    double quad(double a, double b) const {
        if (a == b) return 0.0;
        auto g = [this](double t) {
            JetCache c(t);
            return f_->jet(t, 0, c)[0];
        };
        return integrate(g, a, b, 1e-15, 6);
    }
    double value_from_grid(double x) const {
        auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
        size_t i = it == nodes_.begin() ? 0 : static_cast<size_t>(it - nodes_.begin()) - 1;
        i = std::min(i, nodes_.size() - 1);
        // closer grid node keeps the quadrature interval short
        if (i + 1 < nodes_.size() && nodes_[i + 1] - x < x - nodes_[i]) ++i;
        return values_[i] + quad(nodes_[i], x);
    }

    NodePtr f_;
    double anchor_;
    std::vector<double> nodes_;
    std::vector<double> values_;
};

class SampledNode final : public Node {
public:
    SampledNode(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        if (x_.size() != y_.size() || x_.size() < 6)
            throw ValidationError("sampled function needs at least 6 matching samples");
        for (size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1])) throw ValidationError("sample abscissae must increase strictly");
    }
    Jet compute(double x, int order, JetCache&) const override {
        // Local quintic through the six samples nearest x.
        auto it = std::lower_bound(x_.begin(), x_.end(), x);
        long c = static_cast<long>(it - x_.begin());
        long start = std::clamp<long>(c - 3, 0, static_cast<long>(x_.size()) - 6);
        std::vector<double> coeff(6, 0.0);  // polynomial in (t - x)
        for (int k = 0; k < 6; ++k) {
            // Lagrange basis l_k(t) expanded about x.
            std::vector<double> basis{1.0};
            double denom = 1.0;
            for (int m = 0; m < 6; ++m) {
                if (m == k) continue;
                const double xm = x_[start + m];
                std::vector<double> next(basis.size() + 1, 0.0);
                for (size_t i = 0; i < basis.size(); ++i) {
                    next[i + 1] += basis[i];
                    next[i] += basis[i] * (x - xm);
                }
                basis = std::move(next);
                denom *= x_[start + k] - xm;
            }
            for (int i = 0; i < 6; ++i) coeff[i] += y_[start + k] * basis[i] / denom;
        }
        Jet r(order);
        for (int i = 0; i <= std::min(order, 5); ++i) r[i] = coeff[i];
        return r;
    }
    int max_order() const override { return 5; }

private:
    std::vector<double> x_, y_;
};

NodePtr make_const(double c) { return std::make_shared<ConstNode>(c); }

// Flatten into (weight, node) terms plus a constant offset.
void collect(const NodePtr& n, double w, std::vector<std::pair<double, NodePtr>>& out, double& offset) {
    if (auto c = n->constant_value()) {
        offset += w * *c;
        return;
    }
    if (auto s = dynamic_cast<const SumNode*>(n.get())) {
        offset += w * s->offset();
        for (const auto& [tw, tn] : s->terms()) collect(tn, w * tw, out, offset);
        return;
    }
    for (auto& t : out)
        if (t.second == n) {
            t.first += w;
            return;
        }
    out.emplace_back(w, n);
}

NodePtr make_sum(std::vector<std::pair<double, NodePtr>> in) {
    std::vector<std::pair<double, NodePtr>> terms;
    double offset = 0.0;
    for (const auto& [w, n] : in) collect(n, w, terms, offset);
    std::erase_if(terms, [](const auto& t) { return t.first == 0.0; });
    if (terms.empty()) return make_const(offset);
    if (terms.size() == 1 && offset == 0.0 && terms[0].first == 1.0) return terms[0].second;
    return std::make_shared<SumNode>(std::move(terms), offset);
}

NodePtr make_deriv(const NodePtr& a, int n) {
    if (n == 0) return a;
    if (a->constant_value()) return make_const(0.0);
    if (dynamic_cast<const IdentityNode*>(a.get())) return make_const(n == 1 ? 1.0 : 0.0);
    if (auto d = dynamic_cast<const DerivNode*>(a.get())) return make_deriv(d->base(), d->n() + n);
    if (auto p = dynamic_cast<const PrimitiveNode*>(a.get())) return make_deriv(p->integrand(), n - 1);
    if (auto s = dynamic_cast<const SumNode*>(a.get())) {
        std::vector<std::pair<double, NodePtr>> terms;
        for (const auto& [w, t] : s->terms()) terms.emplace_back(w, make_deriv(t, n));
        return make_sum(std::move(terms));
    }
    return std::make_shared<DerivNode>(a, n);
}

NodePtr make_product(const NodePtr& a, const NodePtr& b) {
    auto ca = a->constant_value();
    auto cb = b->constant_value();
    if (ca && cb) return make_const(*ca * *cb);
    if (ca) return make_sum({{*ca, b}});
    if (cb) return make_sum({{*cb, a}});
    return std::make_shared<ProductNode>(a, b);
}

}  // namespace

SmoothFunction1D::SmoothFunction1D() : node_(make_const(0.0)) {}
SmoothFunction1D::SmoothFunction1D(NodePtr node, std::string source)
    : node_(std::move(node)), source_(std::move(source)) {}

SmoothFunction1D SmoothFunction1D::constant(double c) { return SmoothFunction1D(make_const(c)); }
SmoothFunction1D SmoothFunction1D::identity() { return SmoothFunction1D(std::make_shared<IdentityNode>()); }
SmoothFunction1D SmoothFunction1D::parse(const std::string& expr) { return parse_expression(expr); }

SmoothFunction1D SmoothFunction1D::sampled(std::vector<double> x, std::vector<double> y) {
    return SmoothFunction1D(std::make_shared<SampledNode>(std::move(x), std::move(y)));
}

SmoothFunction1D SmoothFunction1D::smoothstep(double e0, double e1, const SmoothFunction1D& arg) {
    if (!(e1 > e0)) throw ValidationError("smoothstep needs e0 < e1");
    return SmoothFunction1D(std::make_shared<UnaryNode>(Fn::Smoothstep, arg.node_, e0, e1));
}

double smoothstep5(double e0, double e1, double x) {
    const double t = (x - e0) / (e1 - e0);
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double smooth_ramp(double e0, double e1, double x) {
    const double t = (x - e0) / (e1 - e0);
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double l = std::exp(-1.0 / t), r = std::exp(-1.0 / (1.0 - t));
    return l / (l + r);
}

double SmoothFunction1D::operator()(double x) const { return jet(x, 0)[0]; }
double SmoothFunction1D::derivative(double x, int m) const { return jet(x, m).derivative(m); }

Jet SmoothFunction1D::jet(double x, int order) const {
    JetCache cache(x);
    return jet(x, order, cache);
}

Jet SmoothFunction1D::jet(double x, int order, JetCache& cache) const {
    return node_->jet(x, order, cache);
}

int SmoothFunction1D::max_order() const { return node_->max_order(); }
SmoothFunction1D SmoothFunction1D::d(int n) const { return SmoothFunction1D(make_deriv(node_, n)); }
std::optional<double> SmoothFunction1D::constant_value() const { return node_->constant_value(); }

bool SmoothFunction1D::is_zero() const {
    auto c = constant_value();
    return c && *c == 0.0;
}

SmoothFunction1D operator+(const SmoothFunction1D& a, const SmoothFunction1D& b) {
    return SmoothFunction1D(make_sum({{1.0, a.node_}, {1.0, b.node_}}));
}
SmoothFunction1D operator-(const SmoothFunction1D& a, const SmoothFunction1D& b) {
    return SmoothFunction1D(make_sum({{1.0, a.node_}, {-1.0, b.node_}}));
}
SmoothFunction1D operator-(const SmoothFunction1D& a) { return SmoothFunction1D(make_sum({{-1.0, a.node_}})); }
SmoothFunction1D operator*(double s, const SmoothFunction1D& a) {
    return SmoothFunction1D(make_sum({{s, a.node_}}));
}
SmoothFunction1D operator+(const SmoothFunction1D& a, double s) {
    return SmoothFunction1D(make_sum({{1.0, a.node_}, {s, make_const(1.0)}}));
}
SmoothFunction1D operator*(const SmoothFunction1D& a, const SmoothFunction1D& b) {
    return SmoothFunction1D(make_product(a.node_, b.node_));
}
SmoothFunction1D operator/(const SmoothFunction1D& a, const SmoothFunction1D& b) {
    auto cb = b.constant_value();
    if (cb) {
        if (*cb == 0.0) throw ValidationError("division by the zero function");
        return (1.0 / *cb) * a;
    }
    if (a.is_zero()) return a;
    return SmoothFunction1D(std::make_shared<QuotientNode>(a.node_, b.node_));
}

SmoothFunction1D linear_combination(const std::vector<std::pair<double, SmoothFunction1D>>& terms) {
    std::vector<std::pair<double, NodePtr>> t;
    t.reserve(terms.size());
    for (const auto& [w, f] : terms) t.emplace_back(w, f.node());
    return SmoothFunction1D(make_sum(std::move(t)));
}

namespace {
SmoothFunction1D unary(Fn fn, const SmoothFunction1D& a, double p = 0.0) {
    if (auto c = a.constant_value()) {
        JetCache cache(0.0);
        UnaryNode n(fn, a.node(), p);
        return SmoothFunction1D::constant(n.compute(0.0, 0, cache)[0]);
    }
    return SmoothFunction1D(std::make_shared<UnaryNode>(fn, a.node(), p));
}
}  // namespace

SmoothFunction1D exp(const SmoothFunction1D& a) { return unary(Fn::Exp, a); }
SmoothFunction1D log(const SmoothFunction1D& a) { return unary(Fn::Log, a); }
SmoothFunction1D sin(const SmoothFunction1D& a) { return unary(Fn::Sin, a); }
SmoothFunction1D cos(const SmoothFunction1D& a) { return unary(Fn::Cos, a); }
SmoothFunction1D sqrt(const SmoothFunction1D& a) { return unary(Fn::Pow, a, 0.5); }
SmoothFunction1D pow(const SmoothFunction1D& a, double r) {
    if (r == 0.0) return SmoothFunction1D::constant(1.0);
    if (r == 1.0) return a;
    return unary(Fn::Pow, a, r);
}

SmoothFunction1D integral(const SmoothFunction1D& f, double anchor, double lo, double hi) {
    if (auto c = f.constant_value())
        return *c * (SmoothFunction1D::identity() - anchor);
    if (auto d = dynamic_cast<const DerivNode*>(f.node_id())) {
        SmoothFunction1D g(make_deriv(d->base(), d->n() - 1));
        return g - g(anchor);
    }
    if (auto s = dynamic_cast<const SumNode*>(f.node_id())) {
        // Linear: collapse derivative terms, keep one quadrature node for the rest.
        std::vector<std::pair<double, SmoothFunction1D>> exact;
        std::vector<std::pair<double, NodePtr>> rest;
        for (const auto& [w, t] : s->terms()) {
            if (dynamic_cast<const DerivNode*>(t.get()))
                exact.emplace_back(w, integral(SmoothFunction1D(t), anchor, lo, hi));
            else
                rest.emplace_back(w, t);
        }
        exact.emplace_back(s->offset(), SmoothFunction1D::identity() - anchor);
        if (!rest.empty())
            exact.emplace_back(1.0, SmoothFunction1D(std::make_shared<PrimitiveNode>(
                                        make_sum(std::move(rest)), anchor, lo, hi)));
        return linear_combination(exact);
    }
    return SmoothFunction1D(std::make_shared<PrimitiveNode>(f.node(), anchor, lo, hi));
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol, unsigned max_depth) {
    if (a == b) return 0.0;
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, tol, &err);
}

double integrate(const SmoothFunction1D& f, double a, double b, double tol, unsigned max_depth) {
    return integrate([&f](double t) { return f(t); }, a, b, tol, max_depth);
}

bool is_periodic(const SmoothFunction1D& f, double period, int orders, double tol) {
    const int m = std::min(orders, f.max_order());
    const Jet a = f.jet(0.0, m);
    const Jet b = f.jet(period, m);
    // Each order is compared against the largest magnitude at that order
    // or below, so vanishing even derivatives do not demand absolute zeros.
    double scale = 1.0;
    for (int i = 0; i <= m; ++i) {
        scale = std::max({scale, std::abs(a.derivative(i)), std::abs(b.derivative(i))});
        if (std::abs(a.derivative(i) - b.derivative(i)) > tol * scale) return false;
    }
    return true;
}

double max_abs_on(const SmoothFunction1D& f, double a, double b, int samples) {
    double m = 0.0;
    for (int i = 0; i < samples; ++i) m = std::max(m, std::abs(f(a + (b - a) * i / (samples - 1))));
    return m;
}

}  // namespace thinflow
