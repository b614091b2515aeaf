#pragma once

// Truncated Taylor arithmetic used as the analytic derivative backend.
// Jet carries value and all partial derivatives up to third order in
// nvars coordinates; Series4 is the univariate order-4 counterpart used
// when propagating profile ODE solutions.

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace alegeo {

constexpr int kMaxDim = 8;

class Jet {
public:
    Jet() : n_(0) {}
    explicit Jet(int nvars, double value = 0.0) : n_(nvars), val_(value) {
        assert(nvars >= 1 && nvars <= kMaxDim);
        d1_.assign(n_, 0.0);
        d2_.assign(n_ * n_, 0.0);
        d3_.assign(n_ * n_ * n_, 0.0);
    }

    // independent variable i at value v
    static Jet variable(int nvars, int i, double v) {
        Jet j(nvars, v);
        j.d1_[i] = 1.0;
        return j;
    }

    int nvars() const { return n_; }
    double value() const { return val_; }
    double d1(int i) const { return d1_[i]; }
    double d2(int i, int j) const { return d2_[i * n_ + j]; }
    double d3(int i, int j, int k) const { return d3_[(i * n_ + j) * n_ + k]; }

    double& value() { return val_; }
    double& d1(int i) { return d1_[i]; }
    double& d2(int i, int j) { return d2_[i * n_ + j]; }
    double& d3(int i, int j, int k) { return d3_[(i * n_ + j) * n_ + k]; }

    Jet& operator+=(const Jet& o) {
        val_ += o.val_;
        for (size_t i = 0; i < d1_.size(); ++i) d1_[i] += o.d1_[i];
        for (size_t i = 0; i < d2_.size(); ++i) d2_[i] += o.d2_[i];
        for (size_t i = 0; i < d3_.size(); ++i) d3_[i] += o.d3_[i];
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        val_ -= o.val_;
        for (size_t i = 0; i < d1_.size(); ++i) d1_[i] -= o.d1_[i];
        for (size_t i = 0; i < d2_.size(); ++i) d2_[i] -= o.d2_[i];
        for (size_t i = 0; i < d3_.size(); ++i) d3_[i] -= o.d3_[i];
        return *this;
    }
    Jet& operator*=(double s) {
        val_ *= s;
        for (auto& x : d1_) x *= s;
        for (auto& x : d2_) x *= s;
        for (auto& x : d3_) x *= s;
        return *this;
    }

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator*(Jet a, double s) { a *= s; return a; }
    friend Jet operator*(double s, Jet a) { a *= s; return a; }
    friend Jet operator+(Jet a, double c) { a.val_ += c; return a; }
    friend Jet operator+(double c, Jet a) { a.val_ += c; return a; }
    friend Jet operator-(Jet a, double c) { a.val_ -= c; return a; }
    friend Jet operator-(double c, Jet a) { a *= -1.0; a.val_ += c; return a; }
    friend Jet operator-(Jet a) { a *= -1.0; return a; }

    friend Jet operator*(const Jet& a, const Jet& b) {
        const int n = a.n_;
        assert(n == b.n_);
        Jet r(n);
        r.val_ = a.val_ * b.val_;
        for (int i = 0; i < n; ++i)
            r.d1_[i] = a.d1_[i] * b.val_ + a.val_ * b.d1_[i];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                r.d2(i, j) = a.d2(i, j) * b.val_ + a.d1(i) * b.d1(j) +
                             a.d1(j) * b.d1(i) + a.val_ * b.d2(i, j);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    r.d3(i, j, k) = a.d3(i, j, k) * b.val_ +
                                    a.d2(i, j) * b.d1(k) + a.d2(i, k) * b.d1(j) +
                                    a.d2(j, k) * b.d1(i) + a.d1(i) * b.d2(j, k) +
                                    a.d1(j) * b.d2(i, k) + a.d1(k) * b.d2(i, j) +
                                    a.val_ * b.d3(i, j, k);
        return r;
    }

    // f applied to this jet; f0..f3 = f, f', f'', f''' at value()
    Jet compose(double f0, double f1, double f2, double f3) const {
        Jet h = *this;
        h.val_ = 0.0;
        Jet h2 = h * h;
        Jet h3 = h2 * h;
        Jet r = f1 * h + (f2 / 2.0) * h2 + (f3 / 6.0) * h3;
        r.val_ += f0;
        return r;
    }

    friend Jet operator/(const Jet& a, const Jet& b) {
        double v = b.value();
        Jet inv = b.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v),
                            -6.0 / (v * v * v * v));
        return a * inv;
    }
    friend Jet operator/(double c, const Jet& b) {
        double v = b.value();
        Jet inv = b.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v),
                            -6.0 / (v * v * v * v));
        return c * inv;
    }
    friend Jet operator/(Jet a, double s) { a *= 1.0 / s; return a; }

private:
    int n_;
    double val_ = 0.0;
    std::vector<double> d1_, d2_, d3_;
};

inline Jet sqrt(const Jet& a) {
    double v = a.value();
    double s = std::sqrt(v);
    return a.compose(s, 0.5 / s, -0.25 / (s * v), 0.375 / (s * v * v));
}

inline Jet log(const Jet& a) {
    double v = a.value();
    return a.compose(std::log(v), 1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}

inline Jet exp(const Jet& a) {
    double e = std::exp(a.value());
    return a.compose(e, e, e, e);
}

inline Jet pow(const Jet& a, double p) {
    double v = a.value();
    double f0 = std::pow(v, p);
    return a.compose(f0, p * f0 / v, p * (p - 1.0) * f0 / (v * v),
                     p * (p - 1.0) * (p - 2.0) * f0 / (v * v * v));
}

inline Jet sin(const Jet& a) {
    double s = std::sin(a.value()), c = std::cos(a.value());
    return a.compose(s, c, -s, -c);
}

inline Jet cos(const Jet& a) {
    double s = std::sin(a.value()), c = std::cos(a.value());
    return a.compose(c, -s, -c, s);
}

// Univariate truncated Taylor series of order 4 (coefficients, not
// derivatives: f(t) = c0 + c1 t + ... + c4 t^4).
struct Series4 {
    std::array<double, 5> c{};

    static Series4 constant(double v) { Series4 s; s.c[0] = v; return s; }
    static Series4 linear(double v) {  // v + t
        Series4 s; s.c[0] = v; s.c[1] = 1.0; return s;
    }

    friend Series4 operator+(Series4 a, const Series4& b) {
        for (int i = 0; i < 5; ++i) a.c[i] += b.c[i];
        return a;
    }
    friend Series4 operator-(Series4 a, const Series4& b) {
        for (int i = 0; i < 5; ++i) a.c[i] -= b.c[i];
        return a;
    }
    friend Series4 operator*(Series4 a, double s) {
        for (auto& x : a.c) x *= s;
        return a;
    }
    friend Series4 operator*(double s, Series4 a) { return a * s; }
    friend Series4 operator+(Series4 a, double v) { a.c[0] += v; return a; }
    friend Series4 operator*(const Series4& a, const Series4& b) {
        Series4 r;
        for (int i = 0; i < 5; ++i)
            for (int j = 0; i + j < 5; ++j) r.c[i + j] += a.c[i] * b.c[j];
        return r;
    }
    friend Series4 operator/(const Series4& a, const Series4& b) {
        Series4 r;
        for (int i = 0; i < 5; ++i) {
            double s = a.c[i];
            for (int j = 0; j < i; ++j) s -= r.c[j] * b.c[i - j];
            r.c[i] = s / b.c[0];
        }
        return r;
    }

    Series4 pow_int(int k) const {
        Series4 r = constant(1.0);
        for (int i = 0; i < k; ++i) r = r * (*this);
        return r;
    }

    // antiderivative with zero constant term
    Series4 integrate() const {
        Series4 r;
        for (int i = 0; i < 4; ++i) r.c[i + 1] = c[i] / (i + 1);
        return r;
    }

    double deriv(int k) const {  // k-th derivative at t = 0
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[k] * f;
    }
};

}  // namespace alegeo
