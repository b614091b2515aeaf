#pragma once

// Linear symmetry constraints on dense tensors and the induced orthogonal
// projectors. Constraint subspaces are realized by assembling the
// constraint matrix and computing an orthonormal null-space basis by
// rank-revealing factorization.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alegeo/tensor.hpp"

namespace alegeo {

// Orthonormal basis of the null space of M (columns of the result),
// threshold relative to the largest singular value.
inline Eigen::MatrixXd orthonormal_nullspace(const Eigen::MatrixXd& M, double tol = 1e-10) {
    const Eigen::Index cols = M.cols();
    if (M.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
    // direct SVD when affordable, Gram-matrix eigensolve otherwise
    double work = (double)M.rows() * (double)cols * (double)cols;
    if (work < 1.5e9) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        double smax = sv.size() ? sv(0) : 0.0;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i)
            if (sv(i) > tol * smax) ++rank;
        return svd.matrixV().rightCols(cols - rank);
    }
    Eigen::MatrixXd G = M.transpose() * M;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const auto& ev = es.eigenvalues();  // ascending
    double emax = ev(cols - 1);
    // null eigenvalues of the Gram matrix land at eps*emax, not tol^2*emax
    double cut = std::max(tol * tol, 1e-13) * emax;
    Eigen::Index null_dim = 0;
    for (Eigen::Index i = 0; i < cols; ++i)
        if (ev(i) <= cut) ++null_dim;
    return es.eigenvectors().leftCols(null_dim);
}

struct SignedPerm {
    std::vector<int> perm;  // J[s] = I[perm[s]]
    double coef = 1.0;
};

// One linear relation: for every multi-index I,
//   sum_t coef_t * T_{sigma_t(I)} = 0.
struct IndexRelation {
    std::vector<SignedPerm> terms;

    static IndexRelation permutation(std::vector<int> perm, double sign) {
        IndexRelation r;
        int ord = (int)perm.size();
        std::vector<int> id(ord);
        for (int i = 0; i < ord; ++i) id[i] = i;
        r.terms.push_back({std::move(perm), 1.0});
        r.terms.push_back({id, -sign});
        return r;
    }
};

class SymmetryClass {
public:
    SymmetryClass(int dim, int order) : dim_(dim), order_(order) {}

    int dim() const { return dim_; }
    int order() const { return order_; }

    void add_relation(IndexRelation r) { relations_.push_back(std::move(r)); rows_.reset(); proj_.reset(); }
    void add_trace_zero(int p, int q) { traces_.emplace_back(p, q); rows_.reset(); proj_.reset(); }

    size_t ambient() const {
        size_t s = 1;
        for (int i = 0; i < order_; ++i) s *= dim_;
        return s;
    }

    // Stacked constraint matrix (rows may be redundant).
    const Eigen::MatrixXd& constraint_matrix() const {
        if (rows_) return *rows_;
        const size_t N = ambient();
        size_t nrows = relations_.size() * N;
        size_t red = N / ((size_t)dim_ * dim_);
        nrows += traces_.size() * red;
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero((Eigen::Index)nrows, (Eigen::Index)N);
        Eigen::Index row = 0;
        std::vector<int> idx(order_), jdx(order_);
        for (const auto& rel : relations_) {
            for (size_t I = 0; I < N; ++I, ++row) {
                unpack(I, idx);
                for (const auto& t : rel.terms) {
                    for (int s = 0; s < order_; ++s) jdx[s] = idx[t.perm[s]];
                    M(row, (Eigen::Index)pack(jdx)) += t.coef;
                }
            }
        }
        for (auto [p, q] : traces_) {
            for (size_t R = 0; R < red; ++R, ++row) {
                size_t f = R;
                std::vector<int> rem(order_ - 2);
                for (int s = order_ - 3; s >= 0; --s) { rem[s] = (int)(f % dim_); f /= dim_; }
                int c = 0;
                for (int s = 0; s < order_; ++s)
                    if (s != p && s != q) idx[s] = rem[c++];
                for (int i = 0; i < dim_; ++i) {
                    idx[p] = i; idx[q] = i;
                    M(row, (Eigen::Index)pack(idx)) += 1.0;
                }
            }
        }
        rows_ = std::move(M);
        return *rows_;
    }

    // Orthonormal null-space basis, columns span the constraint subspace.
    Eigen::MatrixXd nullspace_basis() const { return orthonormal_nullspace(constraint_matrix()); }

    const Eigen::MatrixXd& projector() const {
        if (proj_) return *proj_;
        if (ambient() > 4096)
            throw std::invalid_argument("dense projector capped at 4096 components; use a staged space");
        Eigen::MatrixXd V = nullspace_basis();
        proj_ = V * V.transpose();
        return *proj_;
    }

    // Max relative residual of t against all constraints.
    double residual(const DenseTensor& t) const {
        const Eigen::MatrixXd& M = constraint_matrix();
        double r = (M * t.vec()).cwiseAbs().maxCoeff();
        return r;
    }

private:
    void unpack(size_t I, std::vector<int>& idx) const {
        for (int s = order_ - 1; s >= 0; --s) { idx[s] = (int)(I % dim_); I /= dim_; }
    }
    size_t pack(const std::vector<int>& idx) const {
        size_t f = 0;
        for (int s = 0; s < order_; ++s) f = f * dim_ + idx[s];
        return f;
    }

    int dim_, order_;
    std::vector<IndexRelation> relations_;
    std::vector<std::pair<int, int>> traces_;
    mutable std::optional<Eigen::MatrixXd> rows_;
    mutable std::optional<Eigen::MatrixXd> proj_;
};

// Algebraic curvature symmetries: antisymmetry in (0,1) and (2,3), pair
// symmetry, first Bianchi over the last three slots.
inline SymmetryClass curvature_symmetry_class(int n) {
    SymmetryClass sym(n, 4);
    sym.add_relation(IndexRelation::permutation({1, 0, 2, 3}, -1.0));
    sym.add_relation(IndexRelation::permutation({0, 1, 3, 2}, -1.0));
    sym.add_relation(IndexRelation::permutation({2, 3, 0, 1}, 1.0));
    IndexRelation bianchi;
    bianchi.terms.push_back({{0, 1, 2, 3}, 1.0});
    bianchi.terms.push_back({{0, 2, 3, 1}, 1.0});
    bianchi.terms.push_back({{0, 3, 1, 2}, 1.0});
    sym.add_relation(std::move(bianchi));
    return sym;
}

inline DenseTensor project_to_symmetry(const DenseTensor& t, const SymmetryClass& sym) {
    if (t.dim() != sym.dim() || t.order() != sym.order())
        throw std::invalid_argument("project_to_symmetry: dimension/order mismatch");
    Eigen::VectorXd v = sym.projector() * t.vec();
    return DenseTensor::from_vec(t.dim(), t.order(), v);
}

// Trace of rm over slots (0,2) with metric g: rc_{jl} = g^{ik} rm_{ijkl}.
inline DenseTensor ricci_trace(const DenseTensor& rm, const DenseTensor& g) {
    const int n = rm.dim();
    Eigen::MatrixXd gm(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gm(i, j) = g.at2(i, j);
    Eigen::MatrixXd gi = gm.inverse();
    DenseTensor rc(n, 2);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) s += gi(i, k) * rm.at4(i, j, k, l);
            rc.at2(j, l) = s;
        }
    return rc;
}

inline double scalar_trace(const DenseTensor& rc, const DenseTensor& g) {
    const int n = rc.dim();
    Eigen::MatrixXd gm(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gm(i, j) = g.at2(i, j);
    Eigen::MatrixXd gi = gm.inverse();
    double s = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s += gi(i, j) * rc.at2(i, j);
    return s;
}

struct WeylDecomposition {
    DenseTensor w;          // totally trace-free part
    DenseTensor a_schouten; // (Rc - R/(2(n-1)) g) / (n-2)
};

inline WeylDecomposition weyl_decompose(const DenseTensor& rm, const DenseTensor& g,
                                        const DenseTensor& rc, double r_scalar) {
    const int n = rm.dim();
    if (n < 3) throw std::invalid_argument("weyl_decompose needs n >= 3");
    DenseTensor rc_check = ricci_trace(rm, g);
    double scale = std::max(rc.max_abs(), rm.max_abs());
    double mism = (rc_check - rc).max_abs();
    if (mism > 1e-8 * std::max(scale, 1e-14))
        throw std::invalid_argument("weyl_decompose: rc is not the (1,3)-trace of rm, residual " +
                                    std::to_string(mism));
    DenseTensor a = (rc - (r_scalar / (2.0 * (n - 1))) * g) * (1.0 / (n - 2));
    DenseTensor w = rm - kulkarni_nomizu(a, g);
    return {std::move(w), std::move(a)};
}

}  // namespace alegeo
