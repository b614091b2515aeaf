#pragma once

// Explicit metric charts: flat (Cartesian and polar-like curvilinear),
// the Schwarzschild ALE family, and a round 2-sphere sanity chart.

#include <stdexcept>

#include "alegeo/metric.hpp"

namespace alegeo {

inline MetricChart flat_chart(int n, bool curvilinear = false) {
    if (n < 2 || n > 8) throw std::invalid_argument("flat_chart: 2 <= n <= 8");
    if (!curvilinear) {
        auto f = [n](const auto& x, auto& g) {
            using T = std::decay_t<decltype(x[0])>;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) g[i * n + j] = (i == j) ? T(x[0] * 0.0 + 1.0) : T(x[0] * 0.0);
        };
        return make_chart(n, "flat:n=" + std::to_string(n), f,
                          [](const Eigen::VectorXd&) { return true; });
    }
    // polar-like pullback in the first two coordinates: (r, theta, rest),
    // flat metric diag(1, r^2, 1, ...)
    auto f = [n](const auto& x, auto& g) {
        using T = std::decay_t<decltype(x[0])>;
        T zero = x[0] * 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g[i * n + j] = zero;
        g[0 * n + 0] = zero + 1.0;
        g[1 * n + 1] = x[0] * x[0];
        for (int i = 2; i < n; ++i) g[i * n + i] = zero + 1.0;
    };
    return make_chart(n, "flatpolar:n=" + std::to_string(n), f,
                      [](const Eigen::VectorXd& x) { return x(0) > 0.05; });
}

inline MetricChart schwarzschild_chart(int n, double mu) {
    if (n < 4 || n > 8) throw std::invalid_argument("schwarzschild_chart: 4 <= n <= 8");
    if (mu < 0) throw std::invalid_argument("schwarzschild_chart: mu >= 0");
    const double expo = 4.0 / (n - 2);
    auto f = [n, mu, expo](const auto& x, auto& g) {
        using T = std::decay_t<decltype(x[0])>;
        using std::pow;
        T r2 = x[0] * x[0];
        for (int i = 1; i < n; ++i) r2 += x[i] * x[i];
        // (1 + mu r^{-(n-2)})^{4/(n-2)}
        T conf = pow(1.0 + mu * pow(r2, -0.5 * (n - 2)), expo);
        T zero = x[0] * 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g[i * n + j] = (i == j) ? conf : zero;
    };
    return make_chart(n, "schwarzschild:n=" + std::to_string(n) + ",mu=" + std::to_string(mu), f,
                      [](const Eigen::VectorXd& x) { return x.norm() > 1e-6; });
}

// Unit round 2-sphere in polar coordinates, for constant-curvature checks.
inline MetricChart sphere2_chart() {
    auto f = [](const auto& x, auto& g) {
        using T = std::decay_t<decltype(x[0])>;
        using std::sin;
        T s = sin(x[0]);
        T zero = x[0] * 0.0;
        g[0] = zero + 1.0;
        g[1] = zero;
        g[2] = zero;
        g[3] = s * s;
    };
    return make_chart(2, "sphere2", f, [](const Eigen::VectorXd& x) {
        return x(0) > 0.2 && x(0) < M_PI - 0.2;
    });
}

}  // namespace alegeo
