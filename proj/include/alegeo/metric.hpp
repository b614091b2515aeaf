#pragma once

// Coordinate metric fields with exact jets to third order, plus the two
// derivative backends: (A) truncated Taylor (jet) arithmetic through the
// chart's analytic evaluator, (B) Richardson-extrapolated central
// differences. Every consumer can demand cross-agreement.

#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alegeo/jet.hpp"

namespace alegeo {

struct MetricJets {
    int n = 0;
    int order = 0;
    Eigen::MatrixXd g;
    std::vector<Eigen::MatrixXd> dg;    // dg[i](a,b) = d_i g_ab
    std::vector<Eigen::MatrixXd> d2g;   // [i*n+j]
    std::vector<Eigen::MatrixXd> d3g;   // [(i*n+j)*n+k]

    void resize(int dim, int ord) {
        n = dim;
        order = ord;
        g = Eigen::MatrixXd::Zero(n, n);
        dg.assign(ord >= 1 ? n : 0, Eigen::MatrixXd::Zero(n, n));
        d2g.assign(ord >= 2 ? n * n : 0, Eigen::MatrixXd::Zero(n, n));
        d3g.assign(ord >= 3 ? n * n * n : 0, Eigen::MatrixXd::Zero(n, n));
    }
    const Eigen::MatrixXd& d2(int i, int j) const { return d2g[i * n + j]; }
    Eigen::MatrixXd& d2(int i, int j) { return d2g[i * n + j]; }
    const Eigen::MatrixXd& d3(int i, int j, int k) const { return d3g[(i * n + j) * n + k]; }
    Eigen::MatrixXd& d3(int i, int j, int k) { return d3g[(i * n + j) * n + k]; }

    double level_max_abs(int k) const {
        double m = 0.0;
        if (k == 0) m = g.cwiseAbs().maxCoeff();
        if (k == 1)
            for (const auto& M : dg) m = std::max(m, M.cwiseAbs().maxCoeff());
        if (k == 2)
            for (const auto& M : d2g) m = std::max(m, M.cwiseAbs().maxCoeff());
        if (k == 3)
            for (const auto& M : d3g) m = std::max(m, M.cwiseAbs().maxCoeff());
        return m;
    }
};

struct MetricChart {
    int dim = 0;
    std::string name;
    std::function<bool(const Eigen::VectorXd&)> in_domain;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> eval;
    // analytic jets through truncated Taylor arithmetic
    std::function<MetricJets(const Eigen::VectorXd&, int)> eval_jets;
};

// Build a MetricChart from a component functor usable with double and Jet
// scalars: f(x_span) -> row-major n*n components.
template <class F>
MetricChart make_chart(int n, std::string name, F f,
                       std::function<bool(const Eigen::VectorXd&)> domain) {
    MetricChart c;
    c.dim = n;
    c.name = std::move(name);
    c.in_domain = std::move(domain);
    c.eval = [n, f](const Eigen::VectorXd& x) {
        std::vector<double> xs(x.data(), x.data() + n);
        std::vector<double> comp(n * n);
        f(xs, comp);
        Eigen::MatrixXd g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = comp[i * n + j];
        return g;
    };
    c.eval_jets = [n, f](const Eigen::VectorXd& x, int order) {
        std::vector<Jet> xs;
        xs.reserve(n);
        for (int i = 0; i < n; ++i) xs.push_back(Jet::variable(n, i, x(i)));
        std::vector<Jet> comp(n * n, Jet(n));
        f(xs, comp);
        MetricJets mj;
        mj.resize(n, order);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const Jet& J = comp[a * n + b];
                mj.g(a, b) = J.value();
                if (order >= 1)
                    for (int i = 0; i < n; ++i) mj.dg[i](a, b) = J.d1(i);
                if (order >= 2)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) mj.d2(i, j)(a, b) = J.d2(i, j);
                if (order >= 3)
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            for (int k = 0; k < n; ++k) mj.d3(i, j, k)(a, b) = J.d3(i, j, k);
            }
        return mj;
    };
    return c;
}

namespace detail {

inline Eigen::MatrixXd fd_d1(const MetricChart& c, Eigen::VectorXd x, int i, double h) {
    auto delta = [&](double hh) {
        Eigen::VectorXd xp = x, xm = x;
        xp(i) += hh;
        xm(i) -= hh;
        return ((c.eval(xp) - c.eval(xm)) / (2.0 * hh)).eval();
    };
    Eigen::MatrixXd A = delta(h), B = delta(h / 2.0);
    return (4.0 * B - A) / 3.0;
}

inline Eigen::MatrixXd fd_d2(const MetricChart& c, Eigen::VectorXd x, int i, int j, double h) {
    auto stencil = [&](double hh) -> Eigen::MatrixXd {
        if (i == j) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += hh;
            xm(i) -= hh;
            return (c.eval(xp) - 2.0 * c.eval(x) + c.eval(xm)) / (hh * hh);
        }
        Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
        xpp(i) += hh; xpp(j) += hh;
        xpm(i) += hh; xpm(j) -= hh;
        xmp(i) -= hh; xmp(j) += hh;
        xmm(i) -= hh; xmm(j) -= hh;
        return (c.eval(xpp) - c.eval(xpm) - c.eval(xmp) + c.eval(xmm)) / (4.0 * hh * hh);
    };
    Eigen::MatrixXd A = stencil(h), B = stencil(h / 2.0);
    return (4.0 * B - A) / 3.0;
}

inline Eigen::MatrixXd fd_d3(const MetricChart& c, Eigen::VectorXd x, int i, int j, int k,
                             double h) {
    auto d2_at = [&](const Eigen::VectorXd& y) { return fd_d2(c, y, i, j, h); };
    auto delta = [&](double hh) {
        Eigen::VectorXd xp = x, xm = x;
        xp(k) += hh;
        xm(k) -= hh;
        return ((d2_at(xp) - d2_at(xm)) / (2.0 * hh)).eval();
    };
    Eigen::MatrixXd A = delta(h), B = delta(h / 2.0);
    return (4.0 * B - A) / 3.0;
}

}  // namespace detail

// Backend (B): Richardson-extrapolated central differences,
// base step h = 1e-3 * (1 + |x|).
inline MetricJets fd_jets(const MetricChart& c, const Eigen::VectorXd& x, int order) {
    const int n = c.dim;
    const double h = 1e-3 * (1.0 + x.norm());
    MetricJets mj;
    mj.resize(n, order);
    mj.g = c.eval(x);
    if (order >= 1)
        for (int i = 0; i < n; ++i) mj.dg[i] = detail::fd_d1(c, x, i, h);
    if (order >= 2)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                mj.d2(i, j) = detail::fd_d2(c, x, i, j, h);
                if (j != i) mj.d2(j, i) = mj.d2(i, j);
            }
    if (order >= 3)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    mj.d3(i, j, k) = detail::fd_d3(c, x, i, j, k, h);
                    if (j != i) mj.d3(j, i, k) = mj.d3(i, j, k);
                }
    return mj;
}

// Both backends, gated on agreement. The gate is 1e-6 relative per
// derivative level plus a finite-difference roundoff allowance
// (eps-level noise divided by h^k survives Richardson extrapolation).
inline MetricJets derivative_backend_eval(const MetricChart& c, const Eigen::VectorXd& x,
                                          int order, double tol_scale = 1.0) {
    if (!c.in_domain(x)) throw std::invalid_argument("point outside chart domain: " + c.name);
    if (order < 0 || order > 3) throw std::invalid_argument("jet order must be 0..3");
    MetricJets A = c.eval_jets(x, order);
    MetricJets B = fd_jets(c, x, order);
    const double h = 1e-3 * (1.0 + x.norm());
    const double gmax = std::max(1.0, A.level_max_abs(0));
    for (int k = 1; k <= order; ++k) {
        double roundoff = 200.0 * 2.2e-16 * gmax / std::pow(h, k);
        double tol = tol_scale * (1e-6 * A.level_max_abs(k) + roundoff);
        auto check = [&](const Eigen::MatrixXd& Ma, const Eigen::MatrixXd& Mb,
                         const std::string& tag) {
            double d = (Ma - Mb).cwiseAbs().maxCoeff();
            if (d > tol) {
                std::ostringstream os;
                os << "backend disagreement on " << c.name << " at order " << k << " (" << tag
                   << "): |A-B| = " << d << " > " << tol;
                throw std::runtime_error(os.str());
            }
        };
        if (k == 1)
            for (int i = 0; i < c.dim; ++i) check(A.dg[i], B.dg[i], "d" + std::to_string(i));
        if (k == 2)
            for (int i = 0; i < c.dim; ++i)
                for (int j = 0; j < c.dim; ++j)
                    check(A.d2(i, j), B.d2(i, j), "d2_" + std::to_string(i) + std::to_string(j));
        if (k == 3)
            for (int i = 0; i < c.dim; ++i)
                for (int j = 0; j < c.dim; ++j)
                    for (int l = 0; l < c.dim; ++l)
                        check(A.d3(i, j, l), B.d3(i, j, l),
                              "d3_" + std::to_string(i) + std::to_string(j) + std::to_string(l));
    }
    return A;
}

}  // namespace alegeo
