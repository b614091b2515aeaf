#pragma once

// Empirical analysis tools: decay-exponent fits along radius ladders,
// the exact Pohozaev integration-by-parts identity checked by quadrature,
// the ODE comparison-lemma simulator, and volume-expansion fitting for
// the Kahler family.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alegeo/curvature.hpp"
#include "alegeo/kahler.hpp"
#include "alegeo/metric.hpp"
#include "alegeo/rng.hpp"

namespace alegeo {

// ---------------------------------------------------------------- decay

enum class DecayQuantity { MetricDeviation, RmNorm, RcNorm, GradRmNorm, DeltaRmNorm };

inline const char* decay_quantity_name(DecayQuantity q) {
    switch (q) {
        case DecayQuantity::MetricDeviation: return "metric_deviation";
        case DecayQuantity::RmNorm: return "rm_norm";
        case DecayQuantity::RcNorm: return "rc_norm";
        case DecayQuantity::GradRmNorm: return "grad_rm_norm";
        case DecayQuantity::DeltaRmNorm: return "delta_rm_norm";
    }
    return "?";
}

inline DecayQuantity decay_quantity_from_name(const std::string& s) {
    for (DecayQuantity q :
         {DecayQuantity::MetricDeviation, DecayQuantity::RmNorm, DecayQuantity::RcNorm,
          DecayQuantity::GradRmNorm, DecayQuantity::DeltaRmNorm})
        if (s == decay_quantity_name(q)) return q;
    throw std::invalid_argument("unknown decay quantity: " + s);
}

struct DecayFit {
    DecayQuantity quantity;
    std::vector<double> radii;   // usable rungs, ascending
    std::vector<double> values;  // shell max of the quantity
    double exponent = 0.0;
    double stderr_ = 0.0;
    int samples_per_shell = 0;
    int dropped_underflow = 0;
    int dropped_preasymptotic = 0;
    bool no_signal = false;  // all shells below the underflow floor
};

inline DecayFit decay_fit(const MetricChart& chart, DecayQuantity q, double r0, double rho,
                          int rungs, int samples, Rng& rng, double tol_scale = 1.0) {
    if (rungs < 6) throw std::invalid_argument("decay_fit needs at least 6 rungs");
    if (!(rho > 1.0) || !(r0 > 0.0)) throw std::invalid_argument("decay_fit: r0 > 0, rho > 1");
    const int n = chart.dim;
    DecayFit fit;
    fit.quantity = q;
    fit.samples_per_shell = samples;

    const bool needs_deriv = q == DecayQuantity::GradRmNorm || q == DecayQuantity::DeltaRmNorm;
    const bool needs_curv = q != DecayQuantity::MetricDeviation;

    for (int k = 0; k < rungs; ++k) {
        double r = r0 * std::pow(rho, k);
        double shell = 0.0;
        for (int s = 0; s < samples; ++s) {
            Eigen::VectorXd x = r * rng.unit_vector(n);
            if (!chart.in_domain(x)) throw std::invalid_argument("decay ladder leaves the domain");
            double v = 0.0;
            if (!needs_curv) {
                Eigen::MatrixXd g = chart.eval(x);
                v = (g - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff();
            } else {
                CurvatureBundle B = curvature_bundle(chart, x, needs_deriv, tol_scale);
                switch (q) {
                    case DecayQuantity::RmNorm: v = B.rm.norm(); break;
                    case DecayQuantity::RcNorm: v = B.rc.norm(); break;
                    case DecayQuantity::GradRmNorm: v = B.grad_rm.norm(); break;
                    case DecayQuantity::DeltaRmNorm: v = B.div_rm.norm(); break;
                    default: break;
                }
            }
            shell = std::max(shell, v);
        }
        if (shell < 1e-300) {
            ++fit.dropped_underflow;
            continue;
        }
        fit.radii.push_back(r);
        fit.values.push_back(shell);
    }
    if (fit.radii.empty()) {
        fit.no_signal = true;
        return fit;
    }

    // drop pre-asymptotic innermost rungs while the local curvature of the
    // log-log data exceeds 0.1
    auto log_second_diff = [&]() {
        if (fit.radii.size() < 3) return 0.0;
        double y0 = std::log(fit.values[0]), y1 = std::log(fit.values[1]),
               y2 = std::log(fit.values[2]);
        return std::abs(y0 - 2 * y1 + y2);
    };
    while (fit.radii.size() > 4 && log_second_diff() > 0.1) {
        fit.radii.erase(fit.radii.begin());
        fit.values.erase(fit.values.begin());
        ++fit.dropped_preasymptotic;
    }
    if (fit.radii.size() < 4) throw std::runtime_error("decay_fit: fewer than 4 usable rungs");

    // least squares: -log(value) = exponent * log(r) + const
    const size_t N = fit.radii.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < N; ++i) {
        double x = std::log(fit.radii[i]), y = -std::log(fit.values[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double denom = N * sxx - sx * sx;
    fit.exponent = (N * sxy - sx * sy) / denom;
    double icept = (sy - fit.exponent * sx) / N;
    double ss = 0.0;
    for (size_t i = 0; i < N; ++i) {
        double x = std::log(fit.radii[i]), y = -std::log(fit.values[i]);
        double e = y - (fit.exponent * x + icept);
        ss += e * e;
    }
    fit.stderr_ = N > 2 ? std::sqrt(ss / (N - 2) * N / denom) : 0.0;
    if (!std::isfinite(fit.exponent)) throw std::runtime_error("decay_fit: non-finite exponent");
    return fit;
}

// ------------------------------------------------------------- pohozaev

// test tensor field with analytic jets (order 0 = scalar, 1 = covector)
struct TestField {
    int dim = 0;
    int order = 0;
    std::string name;
    // components as order-2+ jets at x
    std::function<std::vector<Jet>(const Eigen::VectorXd&)> eval_jets;
};

inline TestField constant_scalar_field(int n, double c) {
    TestField f;
    f.dim = n;
    f.order = 0;
    f.name = "const";
    f.eval_jets = [n, c](const Eigen::VectorXd&) { return std::vector<Jet>{Jet(n, c)}; };
    return f;
}

inline TestField scalar_power_field(int n, double k) {
    TestField f;
    f.dim = n;
    f.order = 0;
    f.name = "|x|^-" + std::to_string(k);
    f.eval_jets = [n, k](const Eigen::VectorXd& x) {
        Jet r2(n);
        for (int i = 0; i < n; ++i) {
            Jet xi = Jet::variable(n, i, x(i));
            r2 += xi * xi;
        }
        return std::vector<Jet>{pow(r2, -0.5 * k)};
    };
    return f;
}

inline TestField radial_covector_field(int n, double k) {
    TestField f;
    f.dim = n;
    f.order = 1;
    f.name = "x|x|^-" + std::to_string(k);
    f.eval_jets = [n, k](const Eigen::VectorXd& x) {
        Jet r2(n);
        std::vector<Jet> xs;
        for (int i = 0; i < n; ++i) {
            xs.push_back(Jet::variable(n, i, x(i)));
            r2 += xs[i] * xs[i];
        }
        Jet fac = pow(r2, -0.5 * k);
        std::vector<Jet> out;
        for (int i = 0; i < n; ++i) out.push_back(xs[i] * fac);
        return out;
    };
    return f;
}

struct PohozaevTerms {
    double lhs = 0.0;         // \int <Delta T, grad_X T>
    double bulk_main = 0.0;   // \int (n-2)/2 |grad T|^2
    double bulk_gamma = 0.0;  // Gamma corrections of grad X and div X
    double bulk_rm = 0.0;     // curvature commutator term
    double flux_outer = 0.0;  // outward flux at r_out
    double flux_inner = 0.0;  // outward flux at r_in
    double kcomm_check = 0.0; // max |Rm-commutator - antisymmetrized Hessian|
    double residual() const {
        return lhs - (bulk_main + bulk_gamma + bulk_rm + flux_outer - flux_inner);
    }
    double scale() const {
        double s = 1e-300;
        for (double v : {lhs, bulk_main, bulk_gamma, bulk_rm, flux_outer, flux_inner})
            s = std::max(s, std::abs(v));
        return s;
    }
};

struct PohozaevReport {
    PohozaevTerms coarse, fine;
    double quad_error = 0.0;     // max term difference across the levels
    double rel_residual = 0.0;   // fine residual over term scale
    double rate = 0.0;           // log2(coarse residual / fine residual)
};

namespace detail {

struct SphereRule {
    std::vector<Eigen::VectorXd> dirs;
    std::vector<double> weights;  // sum = |S^{n-1}|
};

inline SphereRule sphere_rule(int n, int q) {
    SphereRule R;
    if (n == 2) {
        int M = std::max(8, 4 * q);
        for (int i = 0; i < M; ++i) {
            double phi = 2.0 * M_PI * i / M;
            Eigen::VectorXd d(2);
            d << std::cos(phi), std::sin(phi);
            R.dirs.push_back(d);
            R.weights.push_back(2.0 * M_PI / M);
        }
        return R;
    }
    // angles theta_1..theta_{n-2} in (0, pi) with weight sin^{n-1-k},
    // final angle phi uniform on the circle
    GaussLegendre gl(q);
    int M = std::max(8, 2 * q);
    int na = n - 2;
    std::vector<int> idx(na, 0);
    while (true) {
        double w = 1.0;
        std::vector<double> th(na);
        for (int k = 0; k < na; ++k) {
            double t = 0.5 * M_PI * (gl.node[idx[k]] + 1.0);
            th[k] = t;
            w *= gl.weight[idx[k]] * 0.5 * M_PI * std::pow(std::sin(t), n - 2 - k);
        }
        for (int i = 0; i < M; ++i) {
            double phi = 2.0 * M_PI * i / M;
            Eigen::VectorXd d(n);
            double s = 1.0;
            for (int k = 0; k < na; ++k) {
                d(k) = s * std::cos(th[k]);
                s *= std::sin(th[k]);
            }
            d(n - 2) = s * std::cos(phi);
            d(n - 1) = s * std::sin(phi);
            R.dirs.push_back(d);
            R.weights.push_back(w * 2.0 * M_PI / M);
        }
        int k = na - 1;
        while (k >= 0 && ++idx[k] == q) idx[k--] = 0;
        if (k < 0) break;
    }
    return R;
}

// all local Pohozaev densities at one point
struct PohLocal {
    double lhs, main_term, gamma_term, rm_term, flux, kcomm;
    double sqrtg;
};

inline PohLocal pohozaev_local(const MetricChart& chart, const TestField& field,
                               const Eigen::VectorXd& x) {
    const int n = chart.dim;
    MetricJets J = chart.eval_jets(x, 2);
    Eigen::MatrixXd gi = J.g.inverse();
    // Christoffel and its first partials
    std::vector<double> gam((size_t)n * n * n), dgam((size_t)n * n * n * n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += gi(k, l) * (J.dg[i](j, l) + J.dg[j](i, l) - J.dg[l](i, j));
                gam[((size_t)k * n + i) * n + j] = 0.5 * s;
            }
    auto G = [&](int k, int i, int j) { return gam[((size_t)k * n + i) * n + j]; };
    for (int p = 0; p < n; ++p) {
        Eigen::MatrixXd dgi = -gi * J.dg[p] * gi;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (int l = 0; l < n; ++l)
                        s += dgi(k, l) * (J.dg[i](j, l) + J.dg[j](i, l) - J.dg[l](i, j)) +
                             gi(k, l) * (J.d2(p, i)(j, l) + J.d2(p, j)(i, l) - J.d2(p, l)(i, j));
                    dgam[(((size_t)p * n + k) * n + i) * n + j] = 0.5 * s;
                }
    }
    auto DG = [&](int p, int k, int i, int j) {
        return dgam[(((size_t)p * n + k) * n + i) * n + j];
    };
    auto Riem = [&](int l, int i, int j, int k) {  // Riem^l_{ijk}
        double s = DG(i, l, j, k) - DG(j, l, i, k);
        for (int m = 0; m < n; ++m)
            s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
        return s;
    };

    std::vector<Jet> T = field.eval_jets(x);
    PohLocal out{};
    out.sqrtg = std::sqrt(J.g.determinant());

    if (field.order == 0) {
        const Jet& f = T[0];
        Eigen::VectorXd d1(n);
        for (int i = 0; i < n; ++i) d1(i) = f.d1(i);
        // covariant Hessian
        Eigen::MatrixXd H(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = f.d2(i, j);
                for (int p = 0; p < n; ++p) s -= G(p, i, j) * d1(p);
                H(i, j) = s;
            }
        double lap = (gi * H).trace();
        double gradX = x.dot(d1);
        double norm2 = d1.dot(gi * d1);
        out.lhs = lap * gradX;
        out.main_term = 0.5 * (n - 2) * norm2;
        double trGx = 0.0, pair = 0.0;
        for (int i = 0; i < n; ++i)
            for (int p = 0; p < n; ++p) trGx += G(i, i, p) * x(p);
        Eigen::VectorXd up = gi * d1;  // grad^j T
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int p = 0; p < n; ++p) pair += G(i, j, p) * x(p) * up(j) * d1(i);
        out.gamma_term = -pair + 0.5 * trGx * norm2;
        out.rm_term = 0.0;
        out.kcomm = 0.0;
        Eigen::VectorXd nh = x / x.norm();
        out.flux = (up * gradX - 0.5 * norm2 * x).dot(nh);
        return out;
    }

    // covector field
    std::vector<double> t(n), cd1((size_t)n * n), cd2((size_t)n * n * n);
    for (int k = 0; k < n; ++k) t[k] = T[k].value();
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            double s = T[k].d1(j);
            for (int p = 0; p < n; ++p) s -= G(p, j, k) * t[p];
            cd1[(size_t)j * n + k] = s;
        }
    auto C1 = [&](int j, int k) { return cd1[(size_t)j * n + k]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double s = T[k].d2(i, j);
                for (int p = 0; p < n; ++p)
                    s -= DG(i, p, j, k) * t[p] + G(p, j, k) * T[p].d1(i) +
                         G(p, i, j) * C1(p, k) + G(p, i, k) * C1(j, p);
                cd2[((size_t)i * n + j) * n + k] = s;
            }
    auto C2 = [&](int i, int j, int k) { return cd2[((size_t)i * n + j) * n + k]; };

    std::vector<double> lapT(n, 0.0), gradXT(n, 0.0);
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) lapT[k] += gi(i, j) * C2(i, j, k);
        for (int i = 0; i < n; ++i) gradXT[k] += x(i) * C1(i, k);
    }
    double norm2 = 0.0;
    for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m)
                    norm2 += gi(j, l) * gi(k, m) * C1(j, k) * C1(l, m);
    out.lhs = 0.0;
    for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) out.lhs += gi(k, m) * lapT[k] * gradXT[m];
    out.main_term = 0.5 * (n - 2) * norm2;

    double trGx = 0.0, pair = 0.0;
    for (int i = 0; i < n; ++i)
        for (int p = 0; p < n; ++p) trGx += G(i, i, p) * x(p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double gx = 0.0;
            for (int p = 0; p < n; ++p) gx += G(i, j, p) * x(p);
            if (gx == 0.0) continue;
            double inner = 0.0;
            for (int l = 0; l < n; ++l)
                for (int k = 0; k < n; ++k)
                    for (int m = 0; m < n; ++m)
                        inner += gi(j, l) * gi(k, m) * C1(l, k) * C1(i, m);
            pair += gx * inner;
        }
    out.gamma_term = -pair + 0.5 * trGx * norm2;

    // curvature commutator: (K_{ji} T)_m = -Riem^p_{jim} T_p, cross-checked
    // against the antisymmetrized second covariant derivative
    out.rm_term = 0.0;
    out.kcomm = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < n; ++m) {
                double K = 0.0;
                for (int p = 0; p < n; ++p) K -= Riem(p, j, i, m) * t[p];
                out.kcomm = std::max(out.kcomm, std::abs(K - (C2(j, i, m) - C2(i, j, m))));
                double inner = 0.0;
                for (int l = 0; l < n; ++l)
                    for (int k = 0; k < n; ++k)
                        for (int mm = 0; mm < n; ++mm)
                            inner += gi(j, l) * gi(k, mm) * C1(l, k) * ((mm == m) ? 1.0 : 0.0);
                // inner = g^{jl} g^{km} C1(l,k) with free index m
                out.rm_term += -x(i) * inner * K;
            }

    Eigen::VectorXd nh = x / x.norm();
    double flux1 = 0.0, flux2 = 0.0;
    for (int j = 0; j < n; ++j) {
        double Vj = 0.0;
        for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k)
                for (int m = 0; m < n; ++m)
                    Vj += gi(j, l) * gi(k, m) * C1(l, k) * gradXT[m];
        flux1 += Vj * nh(j);
        flux2 += 0.5 * norm2 * x(j) * nh(j);
    }
    out.flux = flux1 - flux2;
    return out;
}

inline PohozaevTerms pohozaev_level(const MetricChart& chart, const TestField& field, double r_in,
                                    double r_out, int radial_segments, const SphereRule& sph) {
    const int n = chart.dim;
    PohozaevTerms T;
    // radial composite 2-point Gauss (4th order) over the annulus
    const double g2 = 1.0 / std::sqrt(3.0);
    for (int s = 0; s < radial_segments; ++s) {
        double lo = r_in + (r_out - r_in) * s / radial_segments;
        double hi = r_in + (r_out - r_in) * (s + 1) / radial_segments;
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (double node : {-g2, g2}) {
            double r = mid + half * node;
            double wr = half;  // weight 1 each
            for (size_t d = 0; d < sph.dirs.size(); ++d) {
                Eigen::VectorXd x = r * sph.dirs[d];
                PohLocal L = pohozaev_local(chart, field, x);
                double w = wr * sph.weights[d] * std::pow(r, n - 1) * L.sqrtg;
                T.lhs += w * L.lhs;
                T.bulk_main += w * L.main_term;
                T.bulk_gamma += w * L.gamma_term;
                T.bulk_rm += w * L.rm_term;
                T.kcomm_check = std::max(T.kcomm_check, L.kcomm);
            }
        }
    }
    for (size_t d = 0; d < sph.dirs.size(); ++d) {
        for (double r : {r_out, r_in}) {
            Eigen::VectorXd x = r * sph.dirs[d];
            PohLocal L = pohozaev_local(chart, field, x);
            double w = sph.weights[d] * std::pow(r, n - 1) * L.sqrtg;
            if (r == r_out)
                T.flux_outer += w * L.flux;
            else
                T.flux_inner += w * L.flux;
        }
    }
    return T;
}

}  // namespace detail

inline PohozaevReport pohozaev_residual(const MetricChart& chart, const TestField& field,
                                        double r_in, double r_out, int quad_order = 12) {
    if (!(r_in > 0.0) || !(r_out > r_in))
        throw std::invalid_argument("pohozaev: need 0 < r_in < r_out");
    if (field.dim != chart.dim) throw std::invalid_argument("pohozaev: field/chart dim mismatch");
    detail::SphereRule sph = detail::sphere_rule(chart.dim, std::max(8, quad_order));
    PohozaevReport rep;
    rep.coarse = detail::pohozaev_level(chart, field, r_in, r_out, quad_order, sph);
    rep.fine = detail::pohozaev_level(chart, field, r_in, r_out, 2 * quad_order, sph);
    double qe = 0.0;
    qe = std::max(qe, std::abs(rep.coarse.lhs - rep.fine.lhs));
    qe = std::max(qe, std::abs(rep.coarse.bulk_main - rep.fine.bulk_main));
    qe = std::max(qe, std::abs(rep.coarse.bulk_gamma - rep.fine.bulk_gamma));
    qe = std::max(qe, std::abs(rep.coarse.bulk_rm - rep.fine.bulk_rm));
    rep.quad_error = qe;
    rep.rel_residual = std::abs(rep.fine.residual()) / rep.fine.scale();
    double rc = std::abs(rep.coarse.residual()), rf = std::abs(rep.fine.residual());
    rep.rate = (rf > 0.0 && rc > 0.0) ? std::log2(rc / rf) : 0.0;
    return rep;
}

// ------------------------------------------------------------------ ode

struct OdeEnvelope {
    double a, b, C0, f1;
    std::vector<double> r, f_numeric, f_closed;
    double max_rel_dev = 0.0;
    double tail_exponent = 0.0;
};

// saturating comparison ODE f' = -(a/r) f + (a/r) C0 r^{-b}, f(1) = f1,
// integrated in s = ln r by classical RK4
inline OdeEnvelope ode_envelope(double a, double b, double C0, double f1, double r_max) {
    if (!(a > 0.0) || !(b > 0.0) || C0 < 0.0 || f1 < 0.0 || !(r_max > 1.0))
        throw std::invalid_argument("ode_envelope: need a,b > 0, C0,f1 >= 0, r_max > 1");
    OdeEnvelope env{a, b, C0, f1, {}, {}, {}, 0.0, 0.0};
    const double s_max = std::log(r_max);
    const int N = std::max(4000, (int)(s_max * 800));
    const double h = s_max / N;
    auto rhs = [&](double s, double f) { return -a * f + a * C0 * std::exp(-b * s); };
    double f = f1, s = 0.0;
    const int stride = std::max(1, N / 400);
    auto closed = [&](double r) {
        if (a != b) return (f1 - a * C0 / (a - b)) * std::pow(r, -a) +
                           (a * C0 / (a - b)) * std::pow(r, -b);
        return f1 * std::pow(r, -a) + a * C0 * std::pow(r, -a) * std::log(r);
    };
    auto record = [&](double ss, double ff) {
        double rr = std::exp(ss);
        env.r.push_back(rr);
        env.f_numeric.push_back(ff);
        env.f_closed.push_back(closed(rr));
    };
    record(0.0, f);
    for (int i = 0; i < N; ++i) {
        double k1 = rhs(s, f);
        double k2 = rhs(s + 0.5 * h, f + 0.5 * h * k1);
        double k3 = rhs(s + 0.5 * h, f + 0.5 * h * k2);
        double k4 = rhs(s + h, f + h * k3);
        f += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        s += h;
        if ((i + 1) % stride == 0 || i + 1 == N) record(s, f);
    }
    for (size_t i = 0; i < env.r.size(); ++i) {
        if (env.f_numeric[i] < 0.0) throw std::runtime_error("ode_envelope: negative solution");
        double denom = std::max(std::abs(env.f_closed[i]), 1e-300);
        env.max_rel_dev = std::max(env.max_rel_dev,
                                   std::abs(env.f_numeric[i] - env.f_closed[i]) / denom);
    }
    // tail exponent: slope over the last 20% of the log-radius range
    double s_lo = 0.8 * s_max;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (size_t i = 0; i < env.r.size(); ++i) {
        double ss = std::log(env.r[i]);
        if (ss < s_lo || env.f_numeric[i] <= 0.0) continue;
        double y = -std::log(env.f_numeric[i]);
        sx += ss; sy += y; sxx += ss * ss; sxy += ss * y;
        ++cnt;
    }
    if (cnt >= 2) env.tail_exponent = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    return env;
}

// --------------------------------------------------------------- volume

struct VolumeFit {
    double c_lead = 0.0, c_sub = 0.0;
    double fit_residual = 0.0;  // rms relative deviation of the 2-term model
    std::vector<double> radii, volumes;
};

inline double sphere_area(int nm1) {  // |S^{nm1}| for S^{n-1}
    int n = nm1 + 1;
    return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

// Vol(rho <= r) in the complex chart: \int det G dx over { y(u) <= r^2 },
// radial reduction to (1/2)|S^{2m-1}| \int_0^{u_r} (det g_{i jbar})^2 u^{m-1} du
inline VolumeFit volume_expansion_fit(const KahlerProfile& prof, const std::vector<double>& radii) {
    if (radii.size() < 4) throw std::invalid_argument("volume fit needs >= 4 radii");
    const int m = prof.m();
    const double S = sphere_area(2 * m - 1);
    VolumeFit out;
    out.radii = radii;
    const double u_min = 1e-8 * prof.a() * prof.a();
    for (double r : radii) {
        double u_r = prof.u_of_y(r * r);
        // geometric segments resolve both the a^2 scale and the far field
        const int nseg = 240;
        double V = 0.0;
        double lo = u_min;
        double ratio = std::pow(u_r / u_min, 1.0 / nseg);
        for (int s = 0; s < nseg; ++s) {
            double hi = lo * ratio;
            V += detail::gl16().integrate(
                [&](double u) {
                    double d = hermitian_det(prof, u);
                    return d * d * std::pow(u, m - 1);
                },
                lo, hi);
            lo = hi;
        }
        out.volumes.push_back(0.5 * S * V);
    }
    // least squares for Vol = c_lead r^{2m} + c_sub r^2
    Eigen::MatrixXd A(radii.size(), 2);
    Eigen::VectorXd y(radii.size());
    for (size_t i = 0; i < radii.size(); ++i) {
        A(i, 0) = std::pow(radii[i], 2 * m);
        A(i, 1) = radii[i] * radii[i];
        y(i) = out.volumes[i];
    }
    Eigen::Vector2d c = (A.transpose() * A).ldlt().solve(A.transpose() * y);
    out.c_lead = c(0);
    out.c_sub = c(1);
    double ss = 0.0;
    for (size_t i = 0; i < radii.size(); ++i) {
        double model = c(0) * A(i, 0) + c(1) * A(i, 1);
        double e = (y(i) - model) / y(i);
        ss += e * e;
    }
    out.fit_residual = std::sqrt(ss / radii.size());
    return out;
}

}  // namespace alegeo
