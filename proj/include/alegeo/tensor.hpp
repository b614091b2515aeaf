#pragma once

// Dense multi-index tensors over R^n, row-major layout. Dimension and
// order are bounded so that everything in this project stays in dense
// storage (max 8^5 components).

#include <cassert>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace alegeo {

class DenseTensor {
public:
    static constexpr int kMaxOrder = 5;

    DenseTensor() : dim_(0), order_(0) {}
    DenseTensor(int dim, int order) : dim_(dim), order_(order) {
        if (dim < 1 || dim > 8) throw std::invalid_argument("tensor dim out of range");
        if (order < 0 || order > kMaxOrder) throw std::invalid_argument("tensor order out of range");
        size_t sz = 1;
        for (int i = 0; i < order; ++i) sz *= dim;
        entries_.assign(sz, 0.0);
    }

    int dim() const { return dim_; }
    int order() const { return order_; }
    size_t size() const { return entries_.size(); }
    std::span<const double> entries() const { return entries_; }
    std::span<double> entries() { return entries_; }

    size_t flat(std::span<const int> idx) const {
        size_t f = 0;
        for (int s = 0; s < order_; ++s) f = f * dim_ + idx[s];
        return f;
    }
    double& at(std::span<const int> idx) { return entries_[flat(idx)]; }
    double at(std::span<const int> idx) const { return entries_[flat(idx)]; }

    double& operator[](size_t i) { return entries_[i]; }
    double operator[](size_t i) const { return entries_[i]; }

    // convenience accessors for the common low orders
    double& at2(int i, int j) { return entries_[i * dim_ + j]; }
    double at2(int i, int j) const { return entries_[i * dim_ + j]; }
    double& at4(int i, int j, int k, int l) {
        return entries_[((i * (size_t)dim_ + j) * dim_ + k) * dim_ + l];
    }
    double at4(int i, int j, int k, int l) const {
        return entries_[((i * (size_t)dim_ + j) * dim_ + k) * dim_ + l];
    }
    double& at5(int i, int j, int k, int l, int m) {
        return entries_[(((i * (size_t)dim_ + j) * dim_ + k) * dim_ + l) * dim_ + m];
    }
    double at5(int i, int j, int k, int l, int m) const {
        return entries_[(((i * (size_t)dim_ + j) * dim_ + k) * dim_ + l) * dim_ + m];
    }

    double norm() const {
        double s = 0.0;
        for (double x : entries_) s += x * x;
        return std::sqrt(s);
    }
    double norm_sq() const {
        double s = 0.0;
        for (double x : entries_) s += x * x;
        return s;
    }
    double max_abs() const {
        double m = 0.0;
        for (double x : entries_) m = std::max(m, std::abs(x));
        return m;
    }
    bool all_finite() const {
        for (double x : entries_) if (!std::isfinite(x)) return false;
        return true;
    }

    DenseTensor& operator+=(const DenseTensor& o) {
        assert(size() == o.size());
        for (size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
        return *this;
    }
    DenseTensor& operator-=(const DenseTensor& o) {
        assert(size() == o.size());
        for (size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
        return *this;
    }
    DenseTensor& operator*=(double s) {
        for (double& x : entries_) x *= s;
        return *this;
    }
    friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { a += b; return a; }
    friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { a -= b; return a; }
    friend DenseTensor operator*(DenseTensor a, double s) { a *= s; return a; }
    friend DenseTensor operator*(double s, DenseTensor a) { a *= s; return a; }

    static double dot(const DenseTensor& a, const DenseTensor& b) {
        assert(a.size() == b.size());
        double s = 0.0;
        for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
        return s;
    }

    static DenseTensor identity2(int dim) {
        DenseTensor t(dim, 2);
        for (int i = 0; i < dim; ++i) t.at2(i, i) = 1.0;
        return t;
    }

    Eigen::Map<const Eigen::VectorXd> vec() const {
        return Eigen::Map<const Eigen::VectorXd>(entries_.data(), (Eigen::Index)entries_.size());
    }
    static DenseTensor from_vec(int dim, int order, const Eigen::VectorXd& v) {
        DenseTensor t(dim, order);
        assert((size_t)v.size() == t.size());
        for (size_t i = 0; i < t.size(); ++i) t[i] = v[(Eigen::Index)i];
        return t;
    }

private:
    int dim_, order_;
    std::vector<double> entries_;
};

// Contract the last slot of t against v and return the squared Euclidean
// norm of the resulting order-(k-1) tensor. v must be a unit vector.
inline double directional_norm_sq(const DenseTensor& t, std::span<const double> v) {
    if (t.order() < 1) throw std::invalid_argument("directional_norm_sq needs order >= 1");
    if ((int)v.size() != t.dim()) throw std::invalid_argument("direction dimension mismatch");
    double vn = 0.0;
    for (double x : v) vn += x * x;
    if (std::abs(vn - 1.0) > 1e-12) throw std::invalid_argument("direction must be a unit vector");
    const int n = t.dim();
    const size_t lead = t.size() / n;
    double s = 0.0;
    for (size_t I = 0; I < lead; ++I) {
        double c = 0.0;
        for (int p = 0; p < n; ++p) c += t[I * n + p] * v[p];
        s += c * c;
    }
    return s;
}

// Kulkarni-Nomizu product of two symmetric 2-tensors:
// (a (*) g)_{ijkl} = a_ik g_jl + a_jl g_ik - a_il g_jk - a_jk g_il
inline DenseTensor kulkarni_nomizu(const DenseTensor& a, const DenseTensor& g) {
    if (a.dim() != g.dim() || a.order() != 2 || g.order() != 2)
        throw std::invalid_argument("kulkarni_nomizu expects two 2-tensors of equal dim");
    const int n = a.dim();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double sa = std::max(1.0, a.max_abs()), sg = std::max(1.0, g.max_abs());
            if (std::abs(a.at2(i, j) - a.at2(j, i)) > 1e-12 * sa ||
                std::abs(g.at2(i, j) - g.at2(j, i)) > 1e-12 * sg)
                throw std::invalid_argument("kulkarni_nomizu inputs must be symmetric");
        }
    DenseTensor r(n, 4);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    r.at4(i, j, k, l) = a.at2(i, k) * g.at2(j, l) + a.at2(j, l) * g.at2(i, k) -
                                        a.at2(i, l) * g.at2(j, k) - a.at2(j, k) * g.at2(i, l);
    return r;
}

// trace over a slot pair with the identity metric (orthonormal frame)
inline DenseTensor trace_slots(const DenseTensor& t, int p, int q) {
    assert(p != q && p < t.order() && q < t.order());
    const int n = t.dim();
    DenseTensor r(n, t.order() - 2);
    std::vector<int> idx(t.order()), ridx;
    const size_t rsz = r.size();
    for (size_t I = 0; I < rsz; ++I) {
        // unpack reduced index
        size_t f = I;
        std::vector<int> red(r.order());
        for (int s = r.order() - 1; s >= 0; --s) { red[s] = (int)(f % n); f /= n; }
        int c = 0;
        for (int s = 0; s < t.order(); ++s)
            if (s != p && s != q) idx[s] = red[c++];
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            idx[p] = i; idx[q] = i;
            sum += t.at(idx);
        }
        r[I] = sum;
    }
    return r;
}

}  // namespace alegeo
