#pragma once

// The scalar-flat Kähler ALE family on C^m: U(m)-invariant metrics
//   g = phi'(u) |dz|^2-part + phi''(u) (z-bar z)-part,   u = |z|^2,
// with radial potential determined by y(u) = u phi'(u) solving
//   u y^{m-1} y' = P(y),  P(y) = y^m + alpha y + beta,
//   alpha = (p-m) a^{2(m-1)},  beta = (m-1-p) a^{2m},  1 <= p <= m.
// The normalization y(u)/u -> 1 at infinity fixes the solution branch
// with y(0+) = a^2. For p in {m-1, m} the profile is in closed form;
// otherwise it is inverted from ln u(y) = ln y - \int_y^infty h(s) ds,
// h(s) = (-alpha s - beta)/(s P(s)), tabulated in w = ln((y-a^2)/a^2).

#include <algorithm>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "alegeo/metric.hpp"

namespace alegeo {

namespace detail {

struct GaussLegendre {
    std::vector<double> node, weight;  // on [-1, 1]
    explicit GaussLegendre(int n) : node(n), weight(n) {
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            node[i] = x;
            weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }
    template <class F>
    double integrate(F f, double lo, double hi) const {
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo), s = 0.0;
        for (size_t i = 0; i < node.size(); ++i) s += weight[i] * f(mid + half * node[i]);
        return s * half;
    }
};

inline const GaussLegendre& gl16() {
    static GaussLegendre g(16);
    return g;
}
inline const GaussLegendre& gl32() {
    static GaussLegendre g(32);
    return g;
}

}  // namespace detail

class KahlerProfile {
public:
    KahlerProfile(int m, int p, double a, bool force_table = false)
        : m_(m), p_(p), a_(a) {
        if (m < 2 || m > 4) throw std::invalid_argument("kahler profile: 2 <= m <= 4");
        if (p < 1 || p > m + 1) throw std::invalid_argument("kahler profile: 1 <= p <= m+1");
        if (!(a > 0.0)) throw std::invalid_argument("kahler profile: a > 0");
        alpha_ = (p - m) * std::pow(a, 2 * (m - 1));
        beta_ = (m - 1 - p) * std::pow(a, 2 * m);
        use_table_ = force_table || (p != m && p != m - 1);
        if (use_table_) build_table();
    }

    int m() const { return m_; }
    int p() const { return p_; }
    double a() const { return a_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

    double P(double y) const { return std::pow(y, m_) + alpha_ * y + beta_; }

    // the normalized profile: y with y(0+) = a^2, y(u)/u -> 1
    double y_of_u(double u) const {
        if (!(u > 0.0)) throw std::invalid_argument("y_of_u: u > 0 required");
        if (!use_table_) {
            if (p_ == m_) return std::pow(std::pow(a_, 2 * m_) + std::pow(u, m_), 1.0 / m_);
            // p = m-1
            int q = m_ - 1;
            return std::pow(std::pow(a_, 2 * q) + std::pow(u, q), 1.0 / q);
        }
        return invert(u);
    }

    // order-4 Taylor of y(u0 + t), from the ODE by Picard iteration
    Series4 y_series(double u0) const {
        double y0 = y_of_u(u0);
        Series4 U = Series4::linear(u0);
        Series4 y = Series4::constant(y0);
        for (int it = 0; it < 6; ++it) {
            Series4 rhs = pser(y) / (U * y.pow_int(m_ - 1));
            y = rhs.integrate() + y0;
        }
        return y;
    }

    // inverse profile: the u with y(u) = y_target (Newton, monotone)
    double u_of_y(double y_target) const {
        if (!(y_target > a_ * a_))
            throw std::invalid_argument("u_of_y: target must exceed a^2");
        double u = y_target;  // y(u) ~ u at infinity
        for (int it = 0; it < 80; ++it) {
            double y = y_of_u(u);
            double yp = P(y) / (u * std::pow(y, m_ - 1));
            double du = (y - y_target) / yp;
            // keep the iterate positive
            while (u - du <= 0.0) du *= 0.5;
            u -= du;
            if (std::abs(du) < 1e-14 * u) break;
        }
        return u;
    }

    // phi'(u), phi''(u) pointwise
    std::pair<double, double> phi_derivs(double u) const {
        double y = y_of_u(u);
        // y'u - y = (P(y) - y^m)/y^{m-1} = (alpha y + beta)/y^{m-1}, which
        // avoids the cancellation of the raw difference in the far field
        double phi2 = (alpha_ * y + beta_) / (std::pow(y, m_ - 1) * u * u);
        return {y / u, phi2};
    }

    // phi'(u), phi''(u) as order-4 series at u0
    std::pair<Series4, Series4> phi_series(double u0) const {
        Series4 U = Series4::linear(u0);
        Series4 y = y_series(u0);
        // same cancellation-free form as phi_derivs
        Series4 phi2 = (alpha_ * y + beta_) / (y.pow_int(m_ - 1) * U * U);
        // build phi' from phi'' instead of dividing y/U: the division
        // recursion subtracts y' - y/u, which cancels badly in the far
        // field (phi' derivatives are phi'' shifted down one slot)
        Series4 phi1;
        phi1.c[0] = y.c[0] / u0;
        for (int k = 1; k < 5; ++k) phi1.c[k] = phi2.c[k - 1] / k;
        return {phi1, phi2};
    }

private:
    Series4 pser(const Series4& y) const { return y.pow_int(m_) + alpha_ * y + beta_; }

    double h_of(double s) const { return (-alpha_ * s - beta_) / (s * P(s)); }

    // P(a^2 + delta), expanded about the root so no cancellation occurs
    double P_shift(double delta) const {
        double a2 = a_ * a_;
        double s = alpha_ * delta, binom = 1.0, pw = 1.0;
        for (int k = 1; k <= m_; ++k) {
            binom *= (double)(m_ - k + 1) / k;
            pw *= delta;
            s += binom * std::pow(a2, m_ - k) * pw;
        }
        return s;
    }

    double H_of(double w) const {
        double a2 = a_ * a_;
        double d = a2 * std::exp(w);
        double y = a2 + d;
        return (-alpha_ * y - beta_) * d / (y * P_shift(d));
    }
    double tail_of_y(double y) const {
        // \int_y^infty h(s) ds with s = y/t
        return detail::gl32().integrate(
            [&](double t) { return h_of(y / t) * y / (t * t); }, 1e-12, 1.0);
    }

    void build_table() {
        const double a2 = a_ * a_;
        wmin_ = -40.0;
        wmax_ = std::max(5.0, std::log(1e12 / a2));
        const double step = 0.25;
        int nseg = (int)std::ceil((wmax_ - wmin_) / step);
        wgrid_.resize(nseg + 1);
        for (int i = 0; i <= nseg; ++i)
            wgrid_[i] = wmin_ + (wmax_ - wmin_) * i / nseg;
        Icum_.assign(nseg + 1, 0.0);
        Icum_[nseg] = tail_of_y(a2 * (1.0 + std::exp(wgrid_[nseg])));
        for (int i = nseg - 1; i >= 0; --i)
            Icum_[i] = Icum_[i + 1] +
                       detail::gl16().integrate([&](double w) { return H_of(w); }, wgrid_[i],
                                                wgrid_[i + 1]);
    }

    double I_of(double w) const {
        if (w <= wmin_) return Icum_.front() + (wmin_ - w) / p_;
        if (w >= wmax_) return tail_of_y(a_ * a_ * (1.0 + std::exp(w)));
        auto it = std::upper_bound(wgrid_.begin(), wgrid_.end(), w);
        size_t k = (size_t)(it - wgrid_.begin());  // w < wgrid_[k]
        return Icum_[k] +
               detail::gl16().integrate([&](double ww) { return H_of(ww); }, w, wgrid_[k]);
    }

    double invert(double u) const {
        const double a2 = a_ * a_;
        const double L = std::log(u);
        auto phi = [&](double w) {
            return std::log(a2) + std::log1p(std::exp(w)) - I_of(w);
        };
        // bracket on the grid, asymptotics outside
        double w;
        if (L <= phi(wmin_)) {
            w = wmin_ - p_ * (phi(wmin_) - L);
        } else if (L >= phi(wmax_)) {
            w = std::log(std::max(u, 2.0 * a2) / a2);
        } else {
            size_t lo = 0, hi = wgrid_.size() - 1;
            while (hi - lo > 1) {
                size_t mid = (lo + hi) / 2;
                if (std::log(a2) + std::log1p(std::exp(wgrid_[mid])) - Icum_[mid] < L)
                    lo = mid;
                else
                    hi = mid;
            }
            w = 0.5 * (wgrid_[lo] + wgrid_[hi]);
        }
        for (int it = 0; it < 60; ++it) {
            double f = phi(w) - L;
            double e = std::exp(w);
            double df = e / (1.0 + e) + (w <= wmin_ ? 1.0 / p_ : H_of(w));
            double dw = f / df;
            w -= dw;
            if (std::abs(dw) < 1e-15 * std::max(1.0, std::abs(w))) break;
        }
        return a2 * (1.0 + std::exp(w));
    }

    int m_, p_;
    double a_, alpha_, beta_;
    bool use_table_ = false;
    double wmin_ = 0.0, wmax_ = 0.0;
    std::vector<double> wgrid_, Icum_;
};

namespace detail {

inline std::pair<double, double> phi_pair(const KahlerProfile& prof, double u) {
    return prof.phi_derivs(u);
}

inline std::pair<Jet, Jet> phi_pair(const KahlerProfile& prof, const Jet& u) {
    auto [s1, s2] = prof.phi_series(u.value());
    Jet p1 = u.compose(s1.deriv(0), s1.deriv(1), s1.deriv(2), s1.deriv(3));
    Jet p2 = u.compose(s2.deriv(0), s2.deriv(1), s2.deriv(2), s2.deriv(3));
    return {p1, p2};
}

}  // namespace detail

// det of the Hermitian metric, det g_{i jbar} = (y/u)^{m-1} y'(u);
// equals sqrt(det G) for the real 2m x 2m metric G.
inline double hermitian_det(const KahlerProfile& prof, double u) {
    double y = prof.y_of_u(u);
    double yp = prof.P(y) / (u * std::pow(y, prof.m() - 1));
    return std::pow(y / u, prof.m() - 1) * yp;
}

// Real chart on R^{2m} = C^m, coordinates (x_1..x_m, y_1..y_m),
// z_j = x_j + i y_j. With A_ij = phi' delta_ij + phi''(x_i x_j + y_i y_j)
// and B_ij = phi''(x_i y_j - y_i x_j), the metric is G = [[A,B],[-B,A]].
inline MetricChart kahler_chart(const KahlerProfile& prof) {
    const int m = prof.m();
    const int n = 2 * m;
    const double a = prof.a();
    auto f = [prof, m, n](const auto& x, auto& g) {
        using T = std::decay_t<decltype(x[0])>;
        T u = x[0] * x[0];
        for (int i = 1; i < n; ++i) u += x[i] * x[i];
        auto [p1, p2] = detail::phi_pair(prof, u);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                T A = p2 * (x[i] * x[j] + x[m + i] * x[m + j]);
                if (i == j) A += p1;
                T B = p2 * (x[i] * x[m + j] - x[m + i] * x[j]);
                g[i * n + j] = A;
                g[(m + i) * n + (m + j)] = A;
                g[i * n + (m + j)] = B;
                g[(m + i) * n + j] = -1.0 * B;
            }
    };
    std::string name = "kahler:m=" + std::to_string(m) + ",p=" + std::to_string(prof.p()) +
                       ",a=" + std::to_string(prof.a());
    return make_chart(n, std::move(name), f,
                      [a](const Eigen::VectorXd& x) { return x.norm() > 1e-3 * a; });
}

}  // namespace alegeo
