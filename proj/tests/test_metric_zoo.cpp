#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alegeo/charts.hpp"
#include "alegeo/kahler.hpp"
#include "alegeo/metric.hpp"

using namespace alegeo;

TEST_CASE("flat cartesian chart has identity metric and vanishing jets") {
    MetricChart c = flat_chart(4);
    Eigen::VectorXd x(4);
    x << 0.3, -1.1, 0.7, 2.0;
    MetricJets J = derivative_backend_eval(c, x, 3);
    CHECK((J.g - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(J.level_max_abs(1) == 0.0);
    CHECK(J.level_max_abs(2) == 0.0);
    CHECK(J.level_max_abs(3) == 0.0);
}

TEST_CASE("flat polar chart jets match the closed form diag(1, r^2, 1, ...)") {
    MetricChart c = flat_chart(3, true);
    Eigen::VectorXd x(3);
    x << 1.7, 0.4, -0.2;
    MetricJets J = derivative_backend_eval(c, x, 3);
    CHECK(J.g(1, 1) == doctest::Approx(1.7 * 1.7).epsilon(1e-14));
    CHECK(J.dg[0](1, 1) == doctest::Approx(2 * 1.7).epsilon(1e-14));
    CHECK(J.d2(0, 0)(1, 1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(J.d3(0, 0, 0)(1, 1) == doctest::Approx(0.0));
    // only g_11 depends on the coordinates
    CHECK(J.dg[1].cwiseAbs().maxCoeff() == 0.0);
    CHECK(J.dg[2].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("schwarzschild chart first jets match the analytic oracle") {
    const int n = 4;
    const double mu = 2.0;
    MetricChart c = schwarzschild_chart(n, mu);
    Eigen::VectorXd x(n);
    x << 1.1, 0.3, -0.5, 0.7;
    MetricJets J = derivative_backend_eval(c, x, 3);

    double r = x.norm();
    double u = 1.0 + mu * std::pow(r, -(n - 2));
    double conf = std::pow(u, 4.0 / (n - 2));
    CHECK(J.g(2, 2) == doctest::Approx(conf).epsilon(1e-14));
    CHECK(J.g(0, 1) == 0.0);
    for (int i = 0; i < n; ++i) {
        // d_i u = -mu (n-2) x_i r^{-n}
        double du = -mu * (n - 2) * x(i) * std::pow(r, -n);
        double dconf = (4.0 / (n - 2)) * std::pow(u, 4.0 / (n - 2) - 1.0) * du;
        for (int a = 0; a < n; ++a)
            CHECK(J.dg[i](a, a) == doctest::Approx(dconf).epsilon(1e-12));
    }
}

TEST_CASE("chart argument validation") {
    CHECK_THROWS(schwarzschild_chart(3, 1.0));
    CHECK_THROWS(schwarzschild_chart(9, 1.0));
    CHECK_THROWS(schwarzschild_chart(4, -0.5));
    CHECK_THROWS(flat_chart(1));

    MetricChart c = schwarzschild_chart(4, 1.0);
    Eigen::VectorXd origin = Eigen::VectorXd::Zero(4);
    CHECK_THROWS(derivative_backend_eval(c, origin, 1));

    MetricChart s = sphere2_chart();
    Eigen::VectorXd pole(2);
    pole << 0.05, 0.3;
    CHECK_THROWS(derivative_backend_eval(s, pole, 1));
    Eigen::VectorXd ok(2);
    ok << 1.0, 0.5;
    MetricJets J = derivative_backend_eval(s, ok, 2);
    CHECK(J.g(1, 1) == doctest::Approx(std::sin(1.0) * std::sin(1.0)).epsilon(1e-14));
}

TEST_CASE("backend disagreement is detected") {
    // chart whose pointwise evaluator and jet evaluator tell different
    // stories about d_0 g_00
    MetricChart c = flat_chart(2);
    auto good_eval = c.eval;
    c.eval = [good_eval](const Eigen::VectorXd& x) {
        Eigen::MatrixXd g = good_eval(x);
        g(0, 0) += 0.5 * x(0);  // jets path still reports d_0 g_00 = 0
        return g;
    };
    Eigen::VectorXd x(2);
    x << 0.4, -0.9;
    CHECK_THROWS_AS(derivative_backend_eval(c, x, 1), std::runtime_error);
    // order 0 alone does not compare derivatives
    CHECK_NOTHROW(derivative_backend_eval(c, x, 0));
}

TEST_CASE("kahler profile coefficients and root") {
    KahlerProfile prof(3, 1, 1.3);
    double a = 1.3;
    CHECK(prof.alpha() == doctest::Approx((1 - 3) * std::pow(a, 4)).epsilon(1e-14));
    CHECK(prof.beta() == doctest::Approx((3 - 1 - 1) * std::pow(a, 6)).epsilon(1e-14));
    CHECK(prof.P(a * a) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS(KahlerProfile(2, 0, 1.0));
    CHECK_NOTHROW(KahlerProfile(2, 3, 1.0));  // p = m+1 is admissible
    CHECK_THROWS(KahlerProfile(2, 4, 1.0));
    CHECK_THROWS(KahlerProfile(5, 1, 1.0));
    CHECK_THROWS(KahlerProfile(2, 1, -1.0));
}

TEST_CASE("profile inversion matches the closed forms") {
    for (auto [m, p, a] : {std::tuple{2, 2, 0.8}, {2, 1, 1.5}, {3, 3, 1.1}, {3, 2, 0.9}}) {
        KahlerProfile closed(m, p, a);
        KahlerProfile table(m, p, a, /*force_table=*/true);
        for (double u : {1e-4, 1e-2, 0.5, 1.0, 3.7, 50.0, 1e4, 1e6}) {
            double yc = closed.y_of_u(u);
            double yt = table.y_of_u(u);
            CHECK(yt == doctest::Approx(yc).epsilon(1e-9));
        }
    }
}

TEST_CASE("profile normalization y(u)/u -> 1 and boundary value y(0+) = a^2") {
    for (auto [m, p, a] : {std::tuple{2, 1, 1.0}, {3, 1, 1.2}, {3, 2, 0.7}}) {
        KahlerProfile prof(m, p, a);
        CHECK(prof.y_of_u(1e8) / 1e8 == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(prof.y_of_u(1e-8) == doctest::Approx(a * a).epsilon(1e-6));
    }
}

TEST_CASE("local ODE series matches the closed-form derivative") {
    // p = m: y = (a^{2m} + u^m)^{1/m}, y' = u^{m-1} (a^{2m} + u^m)^{1/m - 1}
    int m = 3;
    double a = 1.1, u0 = 2.3;
    KahlerProfile prof(m, m, a);
    Series4 y = prof.y_series(u0);
    double c = std::pow(a, 2 * m) + std::pow(u0, m);
    CHECK(y.deriv(0) == doctest::Approx(std::pow(c, 1.0 / m)).epsilon(1e-12));
    CHECK(y.deriv(1) ==
          doctest::Approx(std::pow(u0, m - 1) * std::pow(c, 1.0 / m - 1.0)).epsilon(1e-11));
    // second derivative by differentiating once more
    double d2 = (m - 1) * std::pow(u0, m - 2) * std::pow(c, 1.0 / m - 1.0) +
                (1.0 - m) * std::pow(u0, 2 * (m - 1)) * std::pow(c, 1.0 / m - 2.0);
    CHECK(y.deriv(2) == doctest::Approx(d2).epsilon(1e-10));
}

TEST_CASE("kahler chart structure") {
    int m = 2;
    KahlerProfile prof(m, 1, 1.0);  // Burns metric
    MetricChart c = kahler_chart(prof);
    Eigen::VectorXd x(4);
    x << 0.9, -0.4, 0.6, 1.2;
    MetricJets J = derivative_backend_eval(c, x, 3);

    // complex structure J0 = [[0, -I], [I, 0]] is an isometry
    Eigen::MatrixXd J0 = Eigen::MatrixXd::Zero(4, 4);
    J0.block(0, 2, 2, 2) = -Eigen::MatrixXd::Identity(2, 2);
    J0.block(2, 0, 2, 2) = Eigen::MatrixXd::Identity(2, 2);
    CHECK(((J0.transpose() * J.g * J0) - J.g).cwiseAbs().maxCoeff() < 1e-12);

    // radial-radial component equals y'(u)
    double u = x.squaredNorm();
    Eigen::VectorXd e = x / x.norm();
    double y = prof.y_of_u(u);
    double yp = prof.P(y) / (u * std::pow(y, m - 1));
    CHECK(e.dot(J.g * e) == doctest::Approx(yp).epsilon(1e-12));

    // det G = (det g_{i jbar})^2
    CHECK(J.g.determinant() == doctest::Approx(std::pow(hermitian_det(prof, u), 2)).epsilon(1e-12));

    // asymptotically euclidean
    Eigen::VectorXd far(4);
    far << 80.0, 10.0, -30.0, 5.0;
    Eigen::MatrixXd gfar = c.eval(far);
    CHECK((gfar - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("kahler chart passes the dual-backend gate, table path included") {
    for (auto [m, p, a] : {std::tuple{2, 2, 1.0}, {2, 1, 0.8}, {3, 1, 1.1}}) {
        KahlerProfile prof(m, p, a);
        MetricChart c = kahler_chart(prof);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * m);
        x(0) = 1.1;
        x(1) = -0.5;
        x(2 * m - 1) = 0.8;
        CHECK_NOTHROW(derivative_backend_eval(c, x, 3));
    }
}
