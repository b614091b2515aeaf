#pragma once

// Pointwise curvature of a metric chart: Christoffel symbols, Riemann /
// Ricci / scalar / Weyl / Schouten, and first covariant derivatives of
// curvature, all reported in a g-orthonormal frame (Cholesky frame).
//
// Conventions: lowered curvature rm_{ijkl} with pair symmetry and
// antisymmetry in (i,j), (k,l); rc_{jl} = g^{ik} rm_{ijkl};
// grad_rm stores the derivative slot last, rm_{ijkl,m}.

#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "alegeo/metric.hpp"
#include "alegeo/symmetry.hpp"
#include "alegeo/tensor.hpp"

namespace alegeo {

struct CurvatureBundle {
    Eigen::VectorXd point;
    Eigen::MatrixXd g;       // coordinate metric at the point
    Eigen::MatrixXd frame;   // F with F^T g F = I
    DenseTensor gamma;       // coordinate Gamma^k_{ij}, slots (k,i,j)
    DenseTensor rm;          // frame components
    DenseTensor rc;
    double r_scalar = 0.0;
    DenseTensor a_schouten;
    DenseTensor w;
    // third-order products (empty unless derivatives were requested)
    DenseTensor grad_rm;  // rm_{ijkl,m}
    DenseTensor grad_rc;  // rc_{jl,m}
    DenseTensor div_rm;   // (delta Rm)_{jkl} = g^{im} rm_{ijkl;m}
    bool has_derivatives = false;
};

namespace detail {

// contract every slot of a fully-lowered coordinate tensor with frame F
inline DenseTensor to_frame(const DenseTensor& t, const Eigen::MatrixXd& F) {
    const int n = t.dim();
    DenseTensor cur = t;
    for (int slot = 0; slot < t.order(); ++slot) {
        DenseTensor next(n, t.order());
        const size_t stride_after = [&] {
            size_t s = 1;
            for (int q = slot + 1; q < t.order(); ++q) s *= n;
            return s;
        }();
        const size_t stride_slot = stride_after * n;
        const size_t blocks = cur.size() / stride_slot;
        for (size_t b = 0; b < blocks; ++b)
            for (size_t a = 0; a < stride_after; ++a)
                for (int out = 0; out < n; ++out) {
                    double s = 0.0;
                    for (int in = 0; in < n; ++in)
                        s += cur[b * stride_slot + in * stride_after + a] * F(in, out);
                    next[b * stride_slot + out * stride_after + a] = s;
                }
        cur = std::move(next);
    }
    return cur;
}

}  // namespace detail

inline CurvatureBundle curvature_bundle(const MetricChart& chart, const Eigen::VectorXd& x,
                                        bool with_derivatives = false, double tol_scale = 1.0) {
    const int n = chart.dim;
    const int order = with_derivatives ? 3 : 2;
    MetricJets J = derivative_backend_eval(chart, x, order, tol_scale);

    const Eigen::MatrixXd& g = J.g;
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("metric not positive definite at evaluation point");
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd F = L.transpose().inverse();  // F^T g F = I
    Eigen::MatrixXd gi = g.inverse();

    // Gamma^k_{ij} = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    DenseTensor gamma(n, 3);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += gi(k, l) * (J.dg[i](j, l) + J.dg[j](i, l) - J.dg[l](i, j));
                gamma.at((std::array<int, 3>{k, i, j})) = 0.5 * s;
            }
    auto G = [&](int k, int i, int j) { return gamma.at(std::array<int, 3>{k, i, j}); };

    // dGamma[p][k][i][j] = d_p Gamma^k_{ij}
    std::vector<double> dgi(n * n * n);  // d_p g^{ab}
    for (int p = 0; p < n; ++p) {
        Eigen::MatrixXd M = -gi * J.dg[p] * gi;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) dgi[(p * n + a) * n + b] = M(a, b);
    }
    auto DGI = [&](int p, int a, int b) { return dgi[(p * n + a) * n + b]; };
    auto S = [&](int i, int j, int l) { return J.dg[i](j, l) + J.dg[j](i, l) - J.dg[l](i, j); };
    auto dS = [&](int p, int i, int j, int l) {
        return J.d2(p, i)(j, l) + J.d2(p, j)(i, l) - J.d2(p, l)(i, j);
    };
    std::vector<double> dgamma((size_t)n * n * n * n);
    for (int p = 0; p < n; ++p)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l)
                        s += DGI(p, k, l) * S(i, j, l) + gi(k, l) * dS(p, i, j, l);
                    dgamma[(((size_t)p * n + k) * n + i) * n + j] = 0.5 * s;
                }
    auto DG = [&](int p, int k, int i, int j) {
        return dgamma[(((size_t)p * n + k) * n + i) * n + j];
    };

    // Riem^l_{ijk}: coefficient of R(e_i, e_j) e_k
    std::vector<double> riem((size_t)n * n * n * n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = DG(i, l, j, k) - DG(j, l, i, k);
                    for (int m = 0; m < n; ++m)
                        s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
                    riem[(((size_t)l * n + i) * n + j) * n + k] = s;
                }
    auto RIEM = [&](int l, int i, int j, int k) {
        return riem[(((size_t)l * n + i) * n + j) * n + k];
    };

    // rm_{ijkl} = -g_{lm} Riem^m_{ijk}  (so that rc_{jl} = g^{ik} rm_{ijkl})
    DenseTensor rm_c(n, 4);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m) s += g(l, m) * RIEM(m, i, j, k);
                    rm_c.at4(i, j, k, l) = -s;
                }

    CurvatureBundle B;
    B.point = x;
    B.g = g;
    B.frame = F;
    B.gamma = gamma;
    B.rm = detail::to_frame(rm_c, F);
    B.rc = ricci_trace(B.rm, DenseTensor::identity2(n));
    B.r_scalar = 0.0;
    for (int i = 0; i < n; ++i) B.r_scalar += B.rc.at2(i, i);
    if (n > 2) {
        auto dec = weyl_decompose(B.rm, DenseTensor::identity2(n), B.rc, B.r_scalar);
        B.w = std::move(dec.w);
        B.a_schouten = std::move(dec.a_schouten);
    }

    if (!with_derivatives) return B;

    // d2Gamma[(p,q)][k][i][j] = d_p d_q Gamma^k_{ij}
    auto d2S = [&](int p, int q, int i, int j, int l) {
        return J.d3(p, q, i)(j, l) + J.d3(p, q, j)(i, l) - J.d3(p, q, l)(i, j);
    };
    auto D2GI = [&](int p, int q, int a, int b) {
        // d_p d_q g^{ab}
        double s = 0.0;
        for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d) {
                s += DGI(q, a, c) * J.dg[p](c, d) * (-gi(d, b));
                s += -gi(a, c) * J.d2(p, q)(c, d) * gi(d, b);
                s += -gi(a, c) * J.dg[p](c, d) * DGI(q, d, b);
            }
        return s;
    };
    std::vector<double> d2gamma((size_t)n * n * n * n * n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            for (int k = 0; k < n; ++k)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        double s = 0.0;
                        for (int l = 0; l < n; ++l)
                            s += D2GI(p, q, k, l) * S(i, j, l) + DGI(q, k, l) * dS(p, i, j, l) +
                                 DGI(p, k, l) * dS(q, i, j, l) + gi(k, l) * d2S(p, q, i, j, l);
                        d2gamma[((((size_t)p * n + q) * n + k) * n + i) * n + j] = 0.5 * s;
                    }
    auto D2G = [&](int p, int q, int k, int i, int j) {
        return d2gamma[((((size_t)p * n + q) * n + k) * n + i) * n + j];
    };

    // d_p Riem^l_{ijk}
    auto dRIEM = [&](int p, int l, int i, int j, int k) {
        double s = D2G(p, i, l, j, k) - D2G(p, j, l, i, k);
        for (int m = 0; m < n; ++m)
            s += DG(p, l, i, m) * G(m, j, k) + G(l, i, m) * DG(p, m, j, k) -
                 DG(p, l, j, m) * G(m, i, k) - G(l, j, m) * DG(p, m, i, k);
        return s;
    };

    // coordinate partials of rm
    DenseTensor drm(n, 5);  // d_p rm_{ijkl} stored with p LAST
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int p = 0; p < n; ++p) {
                        double s = 0.0;
                        for (int m = 0; m < n; ++m)
                            s += J.dg[p](l, m) * RIEM(m, i, j, k) + g(l, m) * dRIEM(p, m, i, j, k);
                        drm.at5(i, j, k, l, p) = -s;
                    }

    // covariant derivative, derivative slot last
    DenseTensor grad_rm_c(n, 5);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int m = 0; m < n; ++m) {
                        double s = drm.at5(i, j, k, l, m);
                        for (int p = 0; p < n; ++p)
                            s -= G(p, m, i) * rm_c.at4(p, j, k, l) +
                                 G(p, m, j) * rm_c.at4(i, p, k, l) +
                                 G(p, m, k) * rm_c.at4(i, j, p, l) +
                                 G(p, m, l) * rm_c.at4(i, j, k, p);
                        grad_rm_c.at5(i, j, k, l, m) = s;
                    }

    // grad_rc: rc_{jl;m} via contraction identity rc = g^{ik} rm_{ijkl}
    // (metric compatibility lets us contract the covariant derivative)
    DenseTensor grad_rc_c(n, 3);
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            for (int m = 0; m < n; ++m) {
                double s = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < n; ++k) s += gi(i, k) * grad_rm_c.at5(i, j, k, l, m);
                grad_rc_c.at((std::array<int, 3>{j, l, m})) = s;
            }

    // div_rm: (delta Rm)_{jkl} = g^{im} rm_{ijkl;m}
    DenseTensor div_rm_c(n, 3);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double s = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int m = 0; m < n; ++m) s += gi(i, m) * grad_rm_c.at5(i, j, k, l, m);
                div_rm_c.at((std::array<int, 3>{j, k, l})) = s;
            }

    B.grad_rm = detail::to_frame(grad_rm_c, F);
    B.grad_rc = detail::to_frame(grad_rc_c, F);
    B.div_rm = detail::to_frame(div_rm_c, F);
    B.has_derivatives = true;
    return B;
}

struct CurvatureDerivatives {
    DenseTensor grad_rm, grad_rc, div_rm;
};

inline CurvatureDerivatives curvature_derivatives(const MetricChart& chart,
                                                  const Eigen::VectorXd& x,
                                                  double tol_scale = 1.0) {
    CurvatureBundle B = curvature_bundle(chart, x, true, tol_scale);
    return {std::move(B.grad_rm), std::move(B.grad_rc), std::move(B.div_rm)};
}

// residual of the contracted second Bianchi identity
// (delta Rm)_{jkl} = rc_{jl;k} - rc_{jk;l}, frame components
inline double contracted_bianchi_residual(const CurvatureBundle& B) {
    const int n = B.rm.dim();
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                double lhs = B.div_rm.at(std::array<int, 3>{j, k, l});
                double rhs = B.grad_rc.at(std::array<int, 3>{j, l, k}) -
                             B.grad_rc.at(std::array<int, 3>{j, k, l});
                worst = std::max(worst, std::abs(lhs - rhs));
            }
    return worst;
}

// max residual of the second Bianchi cyclic identity on grad_rm,
// cyclic over slots (3,4,5)
inline double second_bianchi_residual(const DenseTensor& grad_rm) {
    const int n = grad_rm.dim();
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    for (int m = 0; m < n; ++m) {
                        double s = grad_rm.at5(i, j, k, l, m) + grad_rm.at5(i, j, m, k, l) +
                                   grad_rm.at5(i, j, l, m, k);
                        worst = std::max(worst, std::abs(s));
                    }
    return worst;
}

}  // namespace alegeo
