#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alegeo/charts.hpp"
#include "alegeo/curvature.hpp"
#include "alegeo/kahler.hpp"

using namespace alegeo;

TEST_CASE("flat cartesian chart is exactly flat") {
    MetricChart c = flat_chart(4);
    Eigen::VectorXd x(4);
    x << 0.2, 1.4, -0.8, 0.5;
    CurvatureBundle B = curvature_bundle(c, x, true);
    CHECK(B.gamma.max_abs() == 0.0);
    CHECK(B.rm.max_abs() == 0.0);
    CHECK(B.grad_rm.max_abs() == 0.0);
}

TEST_CASE("flat polar chart is flat up to jet roundoff") {
    MetricChart c = flat_chart(4, true);
    Eigen::VectorXd x(4);
    x << 1.3, 0.7, -0.4, 2.1;
    CurvatureBundle B = curvature_bundle(c, x, true);
    CHECK(B.gamma.max_abs() > 0.1);  // the chart is genuinely curvilinear
    CHECK(B.rm.max_abs() < 1e-8);
    CHECK(B.grad_rm.max_abs() < 1e-8);
    // frame orthonormality F^T g F = I
    Eigen::MatrixXd I = B.frame.transpose() * B.g * B.frame;
    CHECK((I - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("unit 2-sphere has scalar curvature 2 and parallel curvature") {
    MetricChart c = sphere2_chart();
    for (double th : {0.6, 1.1, 2.3}) {
        Eigen::VectorXd x(2);
        x << th, 0.8;
        CurvatureBundle B = curvature_bundle(c, x, true);
        CHECK(B.r_scalar == doctest::Approx(2.0).epsilon(1e-8));
        // frame sectional curvature rm_0101 = +1 and Rc = g
        CHECK(B.rm.at4(0, 1, 0, 1) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(B.rc.at2(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(B.rc.at2(1, 1) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(B.grad_rm.max_abs() < 1e-7);
    }
}

TEST_CASE("schwarzschild is scalar flat and conformally flat") {
    for (int n : {4, 5}) {
        MetricChart c = schwarzschild_chart(n, 1.0);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
        x(0) = 1.2;
        x(1) = -0.6;
        x(2) = 0.9;
        CurvatureBundle B = curvature_bundle(c, x, true);
        double scale = std::max(1.0, B.rm.max_abs());
        CHECK(B.rm.max_abs() > 1e-3);  // genuinely curved
        CHECK(std::abs(B.r_scalar) < 1e-9 * scale);
        CHECK(B.w.max_abs() < 1e-8 * scale);  // W = 0: conformally flat

        // invariants of the derivative layer
        double dscale = std::max(1.0, B.grad_rm.max_abs());
        CHECK(second_bianchi_residual(B.grad_rm) < 1e-8 * dscale);
        CHECK(contracted_bianchi_residual(B) < 1e-8 * dscale);
        // delta Rm antisymmetric in its last two slots
        double worst = 0.0;
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    worst = std::max(worst,
                                     std::abs(B.div_rm.at(std::array<int, 3>{j, k, l}) +
                                              B.div_rm.at(std::array<int, 3>{j, l, k})));
        CHECK(worst < 1e-8 * dscale);

        Eigen::MatrixXd I = B.frame.transpose() * B.g * B.frame;
        CHECK((I - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("kahler family is scalar flat, p = m is Ricci flat") {
    for (auto [m, p, a] : {std::tuple{2, 2, 1.0}, {2, 1, 1.0}, {3, 2, 0.9}, {3, 1, 1.1}}) {
        KahlerProfile prof(m, p, a);
        MetricChart c = kahler_chart(prof);
        Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * m);
        x(0) = 1.3;
        x(m) = 0.7;
        x(1) = -0.4;
        CurvatureBundle B = curvature_bundle(c, x);
        double scale = B.rm.max_abs();
        CHECK(scale > 1e-4);  // genuinely curved
        CHECK(std::abs(B.r_scalar) < 1e-7 * scale);
        if (p == m) CHECK(B.rc.max_abs() < 1e-7 * scale);
        if (p != m) CHECK(B.rc.max_abs() > 1e-6 * scale);
        SymmetryClass sym = curvature_symmetry_class(2 * m);
        CHECK(sym.residual(B.rm) < 1e-8 * std::max(1.0, scale));
    }
}

TEST_CASE("kahler second Bianchi and contracted Bianchi hold") {
    KahlerProfile prof(2, 1, 1.0);
    MetricChart c = kahler_chart(prof);
    Eigen::VectorXd x(4);
    x << 1.1, 0.3, -0.6, 0.9;
    CurvatureBundle B = curvature_bundle(c, x, true);
    double dscale = std::max(1.0, B.grad_rm.max_abs());
    CHECK(second_bianchi_residual(B.grad_rm) < 1e-8 * dscale);
    CHECK(contracted_bianchi_residual(B) < 1e-8 * dscale);
}

TEST_CASE("curvature tensor satisfies the algebraic symmetries") {
    MetricChart c = schwarzschild_chart(4, 0.7);
    Eigen::VectorXd x(4);
    x << 0.9, 0.4, -1.1, 0.2;
    CurvatureBundle B = curvature_bundle(c, x);
    SymmetryClass sym = curvature_symmetry_class(4);
    CHECK(sym.residual(B.rm) < 1e-10 * std::max(1.0, B.rm.max_abs()));
    // rc is symmetric
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(B.rm.at4(0, 1, i, j) == doctest::Approx(B.rm.at4(i, j, 0, 1)).epsilon(1e-10));
}
