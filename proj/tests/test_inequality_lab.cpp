#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alegeo/inequality.hpp"
#include "alegeo/rng.hpp"

using namespace alegeo;

static void check_space_invariants(const ConstraintSpace& sp, bool nonempty = true) {
    const int D = sp.space_dim();
    if (nonempty) REQUIRE(D > 0);
    Eigen::MatrixXd G = sp.basis.transpose() * sp.basis;
    CHECK((G - Eigen::MatrixXd::Identity(D, D)).cwiseAbs().maxCoeff() < 1e-10);
    for (int c = 0; c < std::min(D, 8); ++c)
        CHECK(constraint_residual_max(sp, sp.basis_tensor(c)) < 1e-10);
}

TEST_CASE("constraint spaces satisfy their own invariants") {
    for (int n : {4, 5}) check_space_invariants(constraint_space_build(SpaceKind::RmDerivDivfree, n));
    {
        // at n=2 the divergence condition kills the whole space; reported, not an error
        auto sp = constraint_space_build(SpaceKind::RmDerivDivfree, 2);
        CHECK(sp.space_dim() == 0);
        MESSAGE("rm-deriv-divfree n=2 space_dim = " << sp.space_dim());
    }
    check_space_invariants(constraint_space_build(SpaceKind::WeylDerivDivfree, 4));
    check_space_invariants(constraint_space_build(SpaceKind::KahlerRicci, 2));
    check_space_invariants(constraint_space_build(SpaceKind::SelfDualRicci, 4));
    check_space_invariants(constraint_space_build(SpaceKind::RmDerivUnconstrained, 4));
    CHECK_THROWS(constraint_space_build(SpaceKind::SelfDualRicci, 5));
    CHECK_THROWS(space_kind_from_name("nope"));
}

TEST_CASE("directional ratio certificates meet the proved bounds") {
    for (int n : {4, 5, 6}) {
        auto r = directional_ratio_max(constraint_space_build(SpaceKind::RmDerivDivfree, n));
        CHECK(r.lambda_max <= (double)n / (n + 2) + 1e-9);
        CHECK(r.lambda_max >= 0.0);
        CHECK(r.lambda_max <= 1.0);
        CHECK(r.maximizer.norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
    for (int n : {4, 5, 6}) {
        auto r = directional_ratio_max(constraint_space_build(SpaceKind::WeylDerivDivfree, n));
        CHECK(r.lambda_max <= (double)(n - 1) / (n + 1) + 1e-9);
    }
    for (int m : {2, 3}) {
        auto sp = constraint_space_build(SpaceKind::KahlerRicci, m);
        auto r = directional_ratio_max(sp);
        CHECK(r.lambda_max <= (double)(2 * m) / (2 * m + 2) + 1e-9);
        CHECK(constraint_residual_max(sp, r.maximizer) < 1e-9);
    }
    {
        auto r = directional_ratio_max(constraint_space_build(SpaceKind::SelfDualRicci, 4));
        CHECK(r.lambda_max <= 2.0 / 3.0 + 1e-9);
    }
}

TEST_CASE("selfdual space dimension") {
    auto sp = constraint_space_build(SpaceKind::SelfDualRicci, 4);
    // ambient symmetric trace-adjusted count 40 minus 12 twelve-equation
    // rows minus 4 traces, equality up to dependencies
    CHECK(sp.space_dim() >= 24 - 4);
    CHECK(sp.space_dim() <= 40);
    MESSAGE("selfdual-ricci space_dim = " << sp.space_dim());
}

TEST_CASE("rotation invariance of the certificates") {
    Rng rng(42);
    {
        auto sp = constraint_space_build(SpaceKind::RmDerivDivfree, 4);
        double l0 = directional_ratio_max(sp).lambda_max;
        ConstraintSpace cj = conjugate_space(sp, rng.rotation(4));
        CHECK(std::abs(directional_ratio_max(cj).lambda_max - l0) < 1e-9);
        for (int c = 0; c < 4; ++c)
            CHECK(constraint_residual_max(sp, cj.basis_tensor(c)) < 1e-9);
    }
    {
        auto sp = constraint_space_build(SpaceKind::KahlerRicci, 2);
        double l0 = directional_ratio_max(sp).lambda_max;
        // real 4x4 representation of a random unitary on C^2
        Eigen::MatrixXcd U = rng.unitary(2);
        Eigen::MatrixXd R(4, 4);
        R.block(0, 0, 2, 2) = U.real();
        R.block(0, 2, 2, 2) = -U.imag();
        R.block(2, 0, 2, 2) = U.imag();
        R.block(2, 2, 2, 2) = U.real();
        ConstraintSpace cj = conjugate_space(sp, R);
        CHECK(std::abs(directional_ratio_max(cj).lambda_max - l0) < 1e-9);
        for (int c = 0; c < 4; ++c)
            CHECK(constraint_residual_max(sp, cj.basis_tensor(c)) < 1e-9);
    }
    {
        auto sp = constraint_space_build(SpaceKind::SelfDualRicci, 4);
        double l0 = directional_ratio_max(sp).lambda_max;
        ConstraintSpace cj = conjugate_space(sp, rng.rotation(4));
        CHECK(std::abs(directional_ratio_max(cj).lambda_max - l0) < 1e-9);
        for (int c = 0; c < 4; ++c)
            CHECK(constraint_residual_max(sp, cj.basis_tensor(c)) < 1e-9);
    }
}

TEST_CASE("a raw rank-one tensor on the last slot saturates the ratio") {
    // outside any constraint space, |T . e_1|^2 / |T|^2 = 1 when T = B x e_1
    Rng rng(5);
    DenseTensor B(4, 4);
    for (size_t i = 0; i < B.size(); ++i) B[i] = rng.gaussian();
    DenseTensor T(4, 5);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) T.at5(i, j, k, l, 0) = B.at4(i, j, k, l);
    std::vector<double> e1 = {1, 0, 0, 0};
    CHECK(directional_norm_sq(T, e1) == doctest::Approx(T.norm_sq()).epsilon(1e-12));
}

TEST_CASE("matrix claim") {
    auto [l2, w2] = matrix_claim_max(2);
    CHECK(l2 == 0.0);
    auto [l3, w3] = matrix_claim_max(3);
    CHECK(l3 == doctest::Approx(3.0).epsilon(1e-12));
    for (int d = 4; d <= 12; ++d) {
        auto [l, w] = matrix_claim_max(d);
        CHECK(l <= d + 1e-12);
        CHECK(l >= 0.0);
        // witness respects the constraints
        for (int a = 0; a < d; ++a) {
            CHECK(std::abs(w(a, a)) < 1e-12);
            CHECK(std::abs(w.row(a).sum()) < 1e-10);
        }
    }
    CHECK_THROWS(matrix_claim_max(1));
    CHECK_THROWS(matrix_claim_max(13));
}

TEST_CASE("fitted delta-term constant") {
    Rng rng1(77), rng2(77);
    double c_small = fit_minimal_C(SpaceKind::RmDerivDivfree, 4, 200, rng1);
    double c_large = fit_minimal_C(SpaceKind::RmDerivDivfree, 4, 2000, rng2);
    CHECK(std::isfinite(c_large));
    CHECK(c_large >= c_small);  // max over a superset dominates
    // on the divergence-free space itself the excess is never positive
    auto sp = constraint_space_build(SpaceKind::RmDerivDivfree, 4);
    Rng rng3(3);
    for (int s = 0; s < 50; ++s) {
        Eigen::VectorXd c = rng3.gaussian_vector(sp.space_dim());
        c.normalize();
        DenseTensor t = DenseTensor::from_vec(4, 5, sp.basis * c);
        std::vector<double> e1 = {1, 0, 0, 0};
        CHECK(directional_norm_sq(t, e1) <= 4.0 / 6.0 + 1e-9);
    }
}
