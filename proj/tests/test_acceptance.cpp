// Acceptance gate: one pass/fail line per criterion, pinned tolerances.
// The process exit code is the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alegeo/analysis.hpp"
#include "alegeo/chartspec.hpp"
#include "alegeo/curvature.hpp"
#include "alegeo/inequality.hpp"

using namespace alegeo;

namespace {

int failures = 0;
std::chrono::steady_clock::time_point t_start;

void report(int id, bool pass, const std::string& detail) {
    static std::chrono::steady_clock::time_point last = t_start;
    auto now = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(now - last).count();
    last = now;
    std::printf("criterion %2d: %s  %s  (%.1f s)\n", id, pass ? "PASS" : "FAIL", detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// --- 1: scalar flatness of the Kahler family --------------------------

void criterion1() {
    Rng rng(101);
    double worst = 0.0;
    for (int m : {2, 3})
        for (int p : std::set<int>{1, m - 1, m, m + 1})
            for (double a : {0.5, 1.0, 2.0}) {
                KahlerProfile prof(m, p, a);
                MetricChart chart = kahler_chart(prof);
                for (int s = 0; s < 50; ++s) {
                    double r = a * std::exp(rng.uniform(std::log(2.0), std::log(100.0)));
                    Eigen::VectorXd x = r * rng.unit_vector(2 * m);
                    CurvatureBundle B = curvature_bundle(chart, x);
                    worst = std::max(worst,
                                     std::abs(B.r_scalar) / std::max(B.rm.norm(), 1e-30));
                }
            }
    report(1, worst < 1e-7, "scalar-flat Kahler family, max |R|/|Rm| = " + fmt(worst));
}

// --- 2: Kahler decay orders -------------------------------------------

void criterion2() {
    bool ok = true;
    std::ostringstream os;
    auto fit_one = [&](int m, int p, DecayQuantity q, double want, double tol) {
        Rng rng(211 + 10 * m + p);
        MetricChart chart = kahler_chart(KahlerProfile(m, p, 1.0));
        DecayFit f = decay_fit(chart, q, 4.0, 1.5, 10, 5, rng);
        bool good = std::abs(f.exponent - want) < tol;
        ok = ok && good;
        os << " (" << m << "," << p << ")" << decay_quantity_name(q) << "=" << fmt(f.exponent);
    };
    fit_one(2, 1, DecayQuantity::MetricDeviation, 2.0, 0.05);
    fit_one(2, 1, DecayQuantity::RmNorm, 4.0, 0.1);
    fit_one(3, 2, DecayQuantity::MetricDeviation, 4.0, 0.05);
    fit_one(3, 2, DecayQuantity::RmNorm, 6.0, 0.1);
    fit_one(2, 2, DecayQuantity::RmNorm, 6.0, 0.1);   // Calabi: n+2
    fit_one(3, 3, DecayQuantity::RmNorm, 8.0, 0.1);
    report(2, ok, "Kahler decay exponents" + os.str());
}

// --- 3: Schwarzschild --------------------------------------------------

void criterion3() {
    bool ok = true;
    std::ostringstream os;
    for (int n : {4, 5, 6}) {
        Rng rng(307 + n);
        MetricChart chart = schwarzschild_chart(n, 1.0);
        double worst_r = 0.0, worst_h = 0.0;
        for (int s = 0; s < 20; ++s) {
            Eigen::VectorXd x = rng.uniform(2.0, 10.0) * rng.unit_vector(n);
            CurvatureBundle B = curvature_bundle(chart, x, true);
            worst_r = std::max(worst_r, std::abs(B.r_scalar));
            worst_h = std::max(worst_h,
                               B.div_rm.norm() / std::max(B.grad_rm.norm(), 1e-30));
        }
        Rng rng2(350 + n);
        DecayFit f =
            decay_fit(chart, DecayQuantity::MetricDeviation, 5.0, 1.6, 10, 5, rng2);
        bool good = worst_r < 1e-9 && worst_h < 1e-6 && std::abs(f.exponent - (n - 2)) < 0.05;
        ok = ok && good;
        os << " n=" << n << ": |R|=" << fmt(worst_r) << " |dRm|/|gradRm|=" << fmt(worst_h)
           << " tau=" << fmt(f.exponent);
    }
    report(3, ok, "Schwarzschild scalar-flat harmonic ALE;" + os.str());
}

// --- 4: inequality certificates ---------------------------------------

void criterion4() {
    bool ok = true;
    double min_gap = 1e300;
    std::ostringstream os;
    auto one = [&](SpaceKind kind, int n) {
        RatioResult r = directional_ratio_max(constraint_space_build(kind, n));
        ok = ok && r.lambda_max <= r.bound + 1e-9;
        min_gap = std::min(min_gap, r.gap);
    };
    for (int n : {4, 5, 6}) one(SpaceKind::RmDerivDivfree, n);
    for (int n : {4, 5, 6}) one(SpaceKind::WeylDerivDivfree, n);
    for (int m : {2, 3}) one(SpaceKind::KahlerRicci, m);
    one(SpaceKind::SelfDualRicci, 4);
    os << "9 certified sharp constants, min gap = " << fmt(min_gap);
    report(4, ok, os.str());
}

// --- 5: matrix claim ---------------------------------------------------

void criterion5() {
    bool ok = true;
    double l3 = 0.0;
    for (int d = 2; d <= 12; ++d) {
        auto [lam, w] = matrix_claim_max(d);
        ok = ok && lam <= d + 1e-12;
        if (d == 3) {
            l3 = lam;
            ok = ok && std::abs(lam - 3.0) < 1e-12;
        }
    }
    report(5, ok, "matrix claim d=2..12, lambda_max(3) = " + fmt(l3));
}

// --- 6: contracted Bianchi on every chart -----------------------------

void criterion6() {
    double worst = 0.0;
    Rng rng(601);
    for (const char* spec : {"flat:n=4", "flatpolar:n=3", "schwarzschild:n=4",
                             "schwarzschild:n=5", "schwarzschild:n=6", "kahler:m=2,p=1",
                             "kahler:m=2,p=2", "kahler:m=3,p=2"}) {
        MetricChart chart = chart_from_spec(spec);
        for (int s = 0; s < 5; ++s) {
            Eigen::VectorXd x(chart.dim);
            do {
                for (int i = 0; i < chart.dim; ++i) x(i) = rng.uniform(0.7, 2.5);
            } while (!chart.in_domain(x));
            CurvatureBundle B = curvature_bundle(chart, x, true);
            worst = std::max(worst, contracted_bianchi_residual(B) /
                                        std::max(B.grad_rm.norm(), 1.0));
        }
    }
    report(6, worst < 1e-8, "contracted Bianchi identity, max rel residual = " + fmt(worst));
}

// --- 7: Pohozaev -------------------------------------------------------

void criterion7() {
    MetricChart flat = flat_chart(4, false);
    PohozaevReport a = pohozaev_residual(flat, scalar_power_field(4, 1.0), 1.0, 2.0, 8);
    MetricChart sch = schwarzschild_chart(4, 1.0);
    PohozaevReport b = pohozaev_residual(sch, radial_covector_field(4, 1.0), 2.0, 4.0, 3);
    bool ok = a.rel_residual < 1e-6 && std::abs(b.rate - 4.0) < 0.8;
    report(7, ok, "Pohozaev: flat rel residual = " + fmt(a.rel_residual) +
                      ", curved refinement rate = " + fmt(b.rate));
}

// --- 8: ODE comparison lemma ------------------------------------------

void criterion8() {
    bool ok = true;
    std::ostringstream os;
    for (auto [a, b] : {std::pair{2.0, 3.0}, {3.0, 2.0}, {2.0, 2.0}, {4.0, 4.0}}) {
        OdeEnvelope env = ode_envelope(a, b, 1.0, 1.0, 1e6);
        ok = ok && env.max_rel_dev < 1e-6;
        if (a != b) {
            ok = ok && std::abs(env.tail_exponent - std::min(a, b)) < 0.02;
        } else {
            size_t i2 = env.r.size() - 1, i1 = i2;
            while (i1 > 0 && env.r[i1] > std::pow(env.r[i2], 0.8)) --i1;
            double v1 = env.f_numeric[i1] * std::pow(env.r[i1], a);
            double v2 = env.f_numeric[i2] * std::pow(env.r[i2], a);
            double slope = (v2 - v1) / (std::log(env.r[i2]) - std::log(env.r[i1]));
            ok = ok && std::abs(slope - a * 1.0) < 0.01 * a;
        }
        os << " (" << a << "," << b << ")dev=" << fmt(env.max_rel_dev);
    }
    report(8, ok, "ODE envelopes" + os.str());
}

// --- 9: volume expansion ----------------------------------------------

void criterion9() {
    std::vector<double> radii = {50, 75, 110, 165, 250, 400};
    double S = sphere_area(3);
    bool ok = true;
    std::ostringstream os;
    double sub1 = 0, sub3 = 0;
    for (int p : {1, 3}) {
        KahlerProfile prof(2, p, 1.0);
        VolumeFit fit = volume_expansion_fit(prof, radii);
        double want_sub = 0.5 * (2 - 1.5) * prof.alpha() * S;
        ok = ok && std::abs(fit.c_lead - S / 4.0) < 0.005 * S / 4.0;
        ok = ok && std::abs(fit.c_sub - want_sub) < 0.02 * std::abs(want_sub);
        (p == 1 ? sub1 : sub3) = fit.c_sub;
        os << " p=" << p << ": c_lead=" << fmt(fit.c_lead) << " c_sub=" << fmt(fit.c_sub)
           << " (series coeff " << fmt(want_sub) << ")";
    }
    ok = ok && sub1 * sub3 < 0.0;
    os << (sub1 * sub3 < 0.0 ? "; sign flip observed" : "; no sign flip");
    report(9, ok, "volume expansion" + os.str());
}

// --- 10: determinism and runtime --------------------------------------

std::string slurp(const char* path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void criterion10() {
    std::string cli = ALEGEO_CLI_PATH;
    int r1 = std::system((cli + " verify --seed 11 --out acc_v1.json >/dev/null").c_str());
    int r2 = std::system((cli + " verify --seed 11 --out acc_v2.json >/dev/null").c_str());
    std::string a = slurp("acc_v1.json"), b = slurp("acc_v2.json");
    std::remove("acc_v1.json");
    std::remove("acc_v2.json");
    double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    bool ok = r1 == 0 && r2 == 0 && !a.empty() && a == b && total < 1800.0;
    report(10, ok, std::string("verify --seed 11 byte-identical: ") +
                       (a == b && !a.empty() ? "yes" : "NO") +
                       ", suite total = " + fmt(total) + " s");
}

}  // namespace

int main() {
    t_start = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (failures)
        std::printf("%d criterion(s) failed\n", failures);
    else
        std::printf("all criteria passed\n");
    return failures;
}
