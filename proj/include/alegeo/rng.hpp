#pragma once

// Deterministic random source. std:: distributions are implementation
// defined, so all sampling goes through this generator to keep seeded
// runs byte-reproducible across toolchains.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace alegeo {

class Rng {
public:
    explicit Rng(uint64_t seed) {
        // splitmix64 expansion of the seed into xoshiro256** state
        uint64_t x = seed;
        for (auto& si : s_) {
            x += 0x9e3779b97f4a7c15ULL;
            uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            si = z ^ (z >> 31);
        }
    }

    uint64_t next_u64() {
        auto rotl = [](uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform() {  // [0, 1)
        return (next_u64() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        // Box-Muller, one value per call (cache the pair)
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        have_cached_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    Eigen::VectorXd gaussian_vector(int n) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v(i) = gaussian();
        return v;
    }

    Eigen::VectorXd unit_vector(int n) {
        Eigen::VectorXd v = gaussian_vector(n);
        while (v.norm() < 1e-8) v = gaussian_vector(n);
        return v / v.norm();
    }

    // Haar-ish random rotation from QR of a Gaussian matrix.
    Eigen::MatrixXd rotation(int n) {
        Eigen::MatrixXd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = gaussian();
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
        Eigen::MatrixXd Q = qr.householderQ();
        Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < n; ++i)
            if (R(i, i) < 0) Q.col(i) *= -1.0;
        if (Q.determinant() < 0) Q.col(0) *= -1.0;
        return Q;
    }

    Eigen::MatrixXcd unitary(int n) {
        Eigen::MatrixXcd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = std::complex<double>(gaussian(), gaussian());
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
        Eigen::MatrixXcd Q = qr.householderQ();
        Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
        for (int i = 0; i < n; ++i) {
            std::complex<double> d = R(i, i);
            if (std::abs(d) > 0) Q.col(i) *= d / std::abs(d);
        }
        return Q;
    }

private:
    uint64_t s_[4];
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace alegeo
