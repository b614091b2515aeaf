// Command-line front end: chart specs, verification suites, report emission.
//
// Subcommands: verify | curvature | decay | inequality | pohozaev | ode | volume
// Exit codes: 0 all checks pass, 1 a certified bound or identity is violated
// (the report names it), 2 usage / configuration error.

#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "alegeo/analysis.hpp"
#include "alegeo/chartspec.hpp"
#include "alegeo/curvature.hpp"
#include "alegeo/inequality.hpp"

using json = nlohmann::ordered_json;
using namespace alegeo;

namespace {

constexpr int kSchema = 1;
constexpr const char* kVersion = "1.0.0";

struct Common {
    std::string chart_spec;
    std::string output = "json";
    std::string out_path;
    std::string config_path;
    uint64_t seed = 1;
    double tol_scale = 1.0;
    int jobs = 1;
};

struct Report {
    json j;
    bool all_pass = true;

    Report(const std::string& command, const Common& c) {
        j["schema"] = kSchema;
        j["version"] = kVersion;
        j["command"] = command;
        j["seed"] = c.seed;
        j["tol_scale"] = c.tol_scale;
        j["jobs"] = c.jobs;
        j["tolerances"] = json::object();
        j["checks"] = json::array();
        j["data"] = json::object();
    }

    void tol(const std::string& name, double v) { j["tolerances"][name] = v; }

    void check(const std::string& name, const std::string& anchor, double value,
               std::optional<double> bound, bool pass) {
        json row;
        row["name"] = name;
        row["anchor"] = anchor;
        row["value"] = value;
        if (bound) row["bound"] = *bound;
        row["pass"] = pass;
        j["checks"].push_back(row);
        all_pass = all_pass && pass;
    }

    std::string render(const std::string& format) const {
        if (format == "json") return j.dump(2) + "\n";
        // csv: meta comment lines then one row per check
        std::ostringstream os;
        os << "# schema=" << kSchema << ",version=" << kVersion << ",command="
           << j["command"].get<std::string>() << ",seed=" << j["seed"].get<uint64_t>() << "\n";
        os << "check,anchor,value,bound,pass\n";
        for (const auto& row : j["checks"]) {
            os << row["name"].get<std::string>() << ",\"" << row["anchor"].get<std::string>()
               << "\"," << json(row["value"]).dump() << ","
               << (row.contains("bound") ? json(row["bound"]).dump() : "") << ","
               << (row["pass"].get<bool>() ? "1" : "0") << "\n";
        }
        return os.str();
    }
};

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open " + tmp + " for writing");
        f << content;
        if (!f.good()) throw std::runtime_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename to " + path + " failed");
}

int emit(const Report& rep, const Common& c) {
    std::string text = rep.render(c.output);
    if (c.out_path.empty())
        std::cout << text;
    else
        atomic_write(c.out_path, text);
    return rep.all_pass ? 0 : 1;
}

// ---------------------------------------------------------------- config

// flat key-value config with dotted section prefixes mirroring the
// subcommands, e.g. "common.seed = 7", "decay.rungs = 10"
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read config file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        size_t h = line.find('#');
        if (h != std::string::npos) line.erase(h);
        auto trim = [](std::string s) {
            size_t b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string();
            size_t e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        std::string t = trim(line);
        if (t.empty()) continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq)), val = trim(t.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key))
            throw std::runtime_error("config line " + std::to_string(lineno) + ": duplicate key " + key);
        kv[key] = val;
    }
    return kv;
}

// binds option variables to config keys; CLI-set flags win
struct ConfigBinder {
    std::map<std::string, std::string> kv;

    template <class T>
    void apply(const std::string& key, CLI::Option* opt, T& var) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        if (opt && opt->count() > 0) return;  // CLI wins
        std::istringstream is(it->second);
        is >> var;
        if (is.fail()) throw std::runtime_error("config key " + key + ": bad value '" + it->second + "'");
    }
};

// ------------------------------------------------------------- sampling

// seeded points in the chart domain; the box covers every chart family's
// valid region away from coordinate degeneracies
std::vector<Eigen::VectorXd> sample_points(const MetricChart& chart, int count, Rng& rng,
                                           double lo = 0.7, double hi = 2.5) {
    std::vector<Eigen::VectorXd> pts;
    int guard = 0;
    while ((int)pts.size() < count) {
        Eigen::VectorXd x(chart.dim);
        for (int i = 0; i < chart.dim; ++i) x(i) = rng.uniform(lo, hi);
        if (chart.in_domain(x))
            pts.push_back(x);
        else if (++guard > 200 * count)
            throw std::runtime_error("cannot sample points inside the chart domain");
    }
    return pts;
}

// ----------------------------------------------------------- subcommands

void run_curvature(Report& rep, const Common& c, int points, bool derivatives) {
    MetricChart chart = chart_from_spec(c.chart_spec);
    Rng rng(c.seed);
    rep.tol("bianchi_rel", 1e-8 * c.tol_scale);
    rep.j["data"]["chart"] = chart.name;
    json rows = json::array();
    double worst_cb = 0.0, worst_sb = 0.0;
    for (const Eigen::VectorXd& x : sample_points(chart, points, rng)) {
        CurvatureBundle B = curvature_bundle(chart, x, derivatives, c.tol_scale);
        json row;
        row["point"] = std::vector<double>(x.data(), x.data() + x.size());
        row["r_scalar"] = B.r_scalar;
        row["rm_norm"] = B.rm.norm();
        row["rc_norm"] = B.rc.norm();
        if (derivatives) {
            double scale = std::max(B.grad_rm.norm(), 1.0);
            worst_cb = std::max(worst_cb, contracted_bianchi_residual(B) / scale);
            worst_sb = std::max(worst_sb, second_bianchi_residual(B.grad_rm) / scale);
            row["grad_rm_norm"] = B.grad_rm.norm();
            row["div_rm_norm"] = B.div_rm.norm();
        }
        rows.push_back(row);
    }
    rep.j["data"]["points"] = rows;
    if (derivatives) {
        rep.check("contracted-bianchi", "(deltaRm)_{jkl} = grad_k R_{jl} - grad_l R_{jk}",
                  worst_cb, 1e-8 * c.tol_scale, worst_cb < 1e-8 * c.tol_scale);
        rep.check("second-bianchi", "cyclic identity on the last three slots of grad Rm",
                  worst_sb, 1e-8 * c.tol_scale, worst_sb < 1e-8 * c.tol_scale);
    } else {
        rep.check("backend-agreement", "analytic jets vs Richardson finite differences", 0.0,
                  std::nullopt, true);
    }
}

// known decay orders for the built-in families
std::optional<double> expected_decay(const ChartSpec& spec, DecayQuantity q) {
    if (spec.name == "schwarzschild") {
        double n = spec.params.at("n");
        if (q == DecayQuantity::MetricDeviation) return n - 2;
        if (q == DecayQuantity::RmNorm) return n;
        return std::nullopt;
    }
    if (spec.name == "kahler") {
        double m = spec.params.at("m"), p = spec.params.at("p");
        double n = 2 * m;
        if (q == DecayQuantity::MetricDeviation) return p == m ? n : n - 2;
        if (q == DecayQuantity::RmNorm) return p == m ? n + 2 : n;
        return std::nullopt;
    }
    return std::nullopt;
}

void run_decay(Report& rep, const Common& c, const std::string& quantity, double r0, double rho,
               int rungs, int samples) {
    MetricChart chart = chart_from_spec(c.chart_spec);
    DecayQuantity q = decay_quantity_from_name(quantity);
    Rng rng(c.seed);
    DecayFit fit = decay_fit(chart, q, r0, rho, rungs, samples, rng, c.tol_scale);
    rep.j["data"]["chart"] = chart.name;
    rep.j["data"]["quantity"] = quantity;
    rep.j["data"]["radii"] = fit.radii;
    rep.j["data"]["values"] = fit.values;
    rep.j["data"]["exponent"] = fit.exponent;
    rep.j["data"]["stderr"] = fit.stderr_;
    rep.j["data"]["no_signal"] = fit.no_signal;
    if (fit.no_signal) {
        rep.check("decay-exponent", "quantity vanishes identically on the ladder", 0.0,
                  std::nullopt, true);
        return;
    }
    std::optional<double> want = expected_decay(parse_chart_spec(c.chart_spec), q);
    double tol = (q == DecayQuantity::MetricDeviation ? 0.05 : 0.1) * c.tol_scale;
    rep.tol("exponent_abs", tol);
    if (want)
        rep.check("decay-exponent", "ALE decay order of " + quantity,
                  fit.exponent, *want, std::abs(fit.exponent - *want) < tol);
    else
        rep.check("decay-exponent", "fitted decay order of " + quantity, fit.exponent,
                  std::nullopt, true);
}

void inequality_row(Report& rep, const Common& c, SpaceKind kind, int n) {
    ConstraintSpace sp = constraint_space_build(kind, n);
    RatioResult r = directional_ratio_max(sp);
    std::string nm = std::string(space_kind_name(kind)) + ":" + std::to_string(n);
    json row;
    row["kind"] = space_kind_name(kind);
    row["n"] = n;
    row["space_dim"] = r.space_dim;
    row["lambda_max"] = r.lambda_max;
    row["bound"] = r.bound;
    row["gap"] = r.gap;
    rep.j["data"]["spaces"].push_back(row);
    rep.check("ratio-" + nm, "sharp directional constant on the constrained space", r.lambda_max,
              r.bound, r.lambda_max <= r.bound + 1e-9 * c.tol_scale);
}

void run_inequality(Report& rep, const Common& c, const std::string& kind, int n) {
    rep.tol("eigenvalue_abs", 1e-9 * c.tol_scale);
    rep.j["data"]["spaces"] = json::array();
    if (kind == "all") {
        for (int d : {4, 5, 6}) inequality_row(rep, c, SpaceKind::RmDerivDivfree, d);
        for (int d : {4, 5, 6}) inequality_row(rep, c, SpaceKind::WeylDerivDivfree, d);
        for (int m : {2, 3}) inequality_row(rep, c, SpaceKind::KahlerRicci, m);
        inequality_row(rep, c, SpaceKind::SelfDualRicci, 4);
    } else if (kind == "matrix") {
        rep.j["data"]["matrix_claim"] = json::array();
        for (int d = 2; d <= 12; ++d) {
            auto [lam, w] = matrix_claim_max(d);
            json row;
            row["d"] = d;
            row["lambda_max"] = lam;
            rep.j["data"]["matrix_claim"].push_back(row);
            bool pass = lam <= d + 1e-12;
            if (d == 3) pass = pass && std::abs(lam - 3.0) < 1e-12;
            rep.check("matrix-claim-d" + std::to_string(d),
                      "zero diagonal, zero row sums: lambda_max <= d", lam, (double)d, pass);
        }
    } else {
        inequality_row(rep, c, space_kind_from_name(kind), n);
    }
}

void run_pohozaev(Report& rep, const Common& c, const std::string& field_kind, double k,
                  double r_in, double r_out, int quad_order) {
    MetricChart chart = chart_from_spec(c.chart_spec);
    TestField field;
    if (field_kind == "scalar")
        field = scalar_power_field(chart.dim, k);
    else if (field_kind == "covector")
        field = radial_covector_field(chart.dim, k);
    else if (field_kind == "constant")
        field = constant_scalar_field(chart.dim, 1.0);
    else
        throw CLI::ValidationError("--field must be scalar|covector|constant");
    PohozaevReport pr = pohozaev_residual(chart, field, r_in, r_out, quad_order);
    rep.j["data"]["chart"] = chart.name;
    rep.j["data"]["field"] = field.name;
    rep.j["data"]["lhs"] = pr.fine.lhs;
    rep.j["data"]["bulk_main"] = pr.fine.bulk_main;
    rep.j["data"]["bulk_gamma"] = pr.fine.bulk_gamma;
    rep.j["data"]["bulk_rm"] = pr.fine.bulk_rm;
    rep.j["data"]["flux_outer"] = pr.fine.flux_outer;
    rep.j["data"]["flux_inner"] = pr.fine.flux_inner;
    rep.j["data"]["rel_residual"] = pr.rel_residual;
    rep.j["data"]["refinement_rate"] = pr.rate;
    bool flat_family = chart.name.rfind("flat", 0) == 0;
    if (flat_family) {
        rep.tol("rel_residual", 1e-6 * c.tol_scale);
        rep.check("pohozaev-residual", "bulk + flux balance of the Pohozaev identity",
                  pr.rel_residual, 1e-6 * c.tol_scale, pr.rel_residual < 1e-6 * c.tol_scale);
    } else {
        rep.tol("rate_rel", 0.2);
        rep.check("pohozaev-rate", "4th-order radial quadrature refinement", pr.rate, 4.0,
                  std::abs(pr.rate - 4.0) < 0.8);
    }
    if (field.order == 1)
        rep.check("rm-commutator", "curvature commutator vs antisymmetrized Hessian",
                  pr.fine.kcomm_check, 1e-8 * c.tol_scale,
                  pr.fine.kcomm_check < 1e-8 * c.tol_scale);
}

void run_ode(Report& rep, const Common& c, double a, double b, double C0, double f1,
             double rmax) {
    OdeEnvelope env = ode_envelope(a, b, C0, f1, rmax);
    rep.j["data"]["a"] = a;
    rep.j["data"]["b"] = b;
    rep.j["data"]["C0"] = C0;
    rep.j["data"]["f1"] = f1;
    rep.j["data"]["max_rel_dev"] = env.max_rel_dev;
    rep.j["data"]["tail_exponent"] = env.tail_exponent;
    rep.j["data"]["r"] = env.r;
    rep.j["data"]["f_numeric"] = env.f_numeric;
    rep.tol("rel_dev", 1e-6 * c.tol_scale);
    rep.check("ode-closed-form", "numeric vs closed-form envelope", env.max_rel_dev,
              1e-6 * c.tol_scale, env.max_rel_dev < 1e-6 * c.tol_scale);
    if (a != b) {
        rep.tol("tail_abs", 0.02);
        rep.check("ode-tail", "saturation exponent min{a,b}", env.tail_exponent,
                  std::min(a, b), std::abs(env.tail_exponent - std::min(a, b)) < 0.02);
    } else {
        size_t i2 = env.r.size() - 1, i1 = i2;
        while (i1 > 0 && env.r[i1] > std::pow(env.r[i2], 0.8)) --i1;
        double v1 = env.f_numeric[i1] * std::pow(env.r[i1], a);
        double v2 = env.f_numeric[i2] * std::pow(env.r[i2], a);
        double slope = (v2 - v1) / (std::log(env.r[i2]) - std::log(env.r[i1]));
        rep.tol("logcoeff_rel", 0.01);
        rep.check("ode-log-coefficient", "resonant log coefficient a*C0", slope, a * C0,
                  std::abs(slope - a * C0) < 0.01 * std::abs(a * C0));
    }
}

void run_volume(Report& rep, const Common& c, int m, int p, double a, double r0, double rho,
                int rungs) {
    KahlerProfile prof(m, p, a);
    std::vector<double> radii;
    for (int i = 0; i < rungs; ++i) radii.push_back(r0 * std::pow(rho, i));
    VolumeFit fit = volume_expansion_fit(prof, radii);
    double S = sphere_area(2 * m - 1);
    double lead = S / (2 * m);
    double sub_derived = -prof.alpha() * S / (2 * (m - 1));
    double sub_series = 0.5 * (m - 1.5) * prof.alpha() * S;
    rep.j["data"]["m"] = m;
    rep.j["data"]["p"] = p;
    rep.j["data"]["a"] = a;
    rep.j["data"]["radii"] = fit.radii;
    rep.j["data"]["volumes"] = fit.volumes;
    rep.j["data"]["c_lead"] = fit.c_lead;
    rep.j["data"]["c_sub"] = fit.c_sub;
    rep.j["data"]["c_sub_expected_quadrature"] = sub_derived;
    rep.j["data"]["c_sub_expected_series"] = sub_series;
    rep.j["data"]["fit_residual"] = fit.fit_residual;
    rep.tol("lead_rel", 0.005 * c.tol_scale);
    rep.check("volume-lead", "leading Euclidean volume coefficient |S^{2m-1}|/(2m)", fit.c_lead,
              lead, std::abs(fit.c_lead - lead) < 0.005 * lead * c.tol_scale);
    if (prof.alpha() != 0.0) {
        rep.tol("sub_rel", 0.05 * c.tol_scale);
        rep.check("volume-sub", "subleading r^2 coefficient of the density expansion",
                  fit.c_sub, sub_derived,
                  std::abs(fit.c_sub - sub_derived) < 0.05 * std::abs(sub_derived) * c.tol_scale);
    }
}

void run_verify(Report& rep, const Common& c) {
    // fixed deterministic suite touching every module
    Rng rng(c.seed);
    rep.tol("bianchi_rel", 1e-8);
    rep.tol("scalar_flat_rel", 1e-7);
    rep.tol("eigenvalue_abs", 1e-9);
    rep.tol("pohozaev_rel", 1e-6);
    rep.tol("ode_rel", 1e-6);

    for (const std::string& spec :
         {std::string("flat:n=4"), std::string("flatpolar:n=3"),
          std::string("schwarzschild:n=4,mu=1"), std::string("kahler:m=2,p=1,a=1")}) {
        MetricChart chart = chart_from_spec(spec);
        double worst_cb = 0.0, worst_sb = 0.0, worst_r = 0.0;
        for (const Eigen::VectorXd& x : sample_points(chart, 3, rng)) {
            CurvatureBundle B = curvature_bundle(chart, x, true, c.tol_scale);
            // relative to the derivative scale, floored at 1 so that exactly
            // flat charts (where every term is roundoff) stay meaningful
            double scale = std::max(B.grad_rm.norm(), 1.0);
            worst_cb = std::max(worst_cb, contracted_bianchi_residual(B) / scale);
            worst_sb = std::max(worst_sb, second_bianchi_residual(B.grad_rm) / scale);
            if (spec.rfind("kahler", 0) == 0)
                worst_r = std::max(worst_r,
                                   std::abs(B.r_scalar) / std::max(B.rm.norm(), 1e-30));
        }
        rep.check("contracted-bianchi@" + spec,
                  "(deltaRm)_{jkl} = grad_k R_{jl} - grad_l R_{jk}", worst_cb, 1e-8,
                  worst_cb < 1e-8);
        rep.check("second-bianchi@" + spec, "cyclic identity on the last three slots of grad Rm",
                  worst_sb, 1e-8, worst_sb < 1e-8);
        if (spec.rfind("kahler", 0) == 0)
            rep.check("scalar-flat@" + spec, "R = 0 for the scalar-flat family", worst_r, 1e-7,
                      worst_r < 1e-7);
    }

    for (auto [kind, n] : {std::pair{SpaceKind::RmDerivDivfree, 4},
                           {SpaceKind::WeylDerivDivfree, 4},
                           {SpaceKind::KahlerRicci, 2},
                           {SpaceKind::SelfDualRicci, 4}}) {
        ConstraintSpace sp = constraint_space_build(kind, n);
        RatioResult r = directional_ratio_max(sp);
        rep.check(std::string("ratio-") + space_kind_name(kind),
                  "sharp directional constant on the constrained space", r.lambda_max, r.bound,
                  r.lambda_max <= r.bound + 1e-9);
    }
    auto [lam3, w3] = matrix_claim_max(3);
    rep.check("matrix-claim-d3", "zero diagonal, zero row sums: lambda_max <= d", lam3, 3.0,
              std::abs(lam3 - 3.0) < 1e-12);

    {
        MetricChart flat = chart_from_spec("flat:n=4");
        PohozaevReport pr =
            pohozaev_residual(flat, scalar_power_field(4, 1.0), 1.0, 2.0, 6);
        rep.check("pohozaev-flat", "bulk + flux balance of the Pohozaev identity",
                  pr.rel_residual, 1e-6, pr.rel_residual < 1e-6);
    }

    for (auto [a, b] : {std::pair{2.0, 3.0}, {2.0, 2.0}}) {
        OdeEnvelope env = ode_envelope(a, b, 1.0, 1.0, 1e6);
        rep.check("ode-closed-form-a" + std::to_string((int)a) + "b" + std::to_string((int)b),
                  "numeric vs closed-form envelope", env.max_rel_dev, 1e-6,
                  env.max_rel_dev < 1e-6);
    }

    {
        Rng drng(c.seed ^ 0x9e3779b9ULL);
        MetricChart sch = chart_from_spec("schwarzschild:n=4,mu=1");
        DecayFit fit =
            decay_fit(sch, DecayQuantity::MetricDeviation, 5.0, 1.6, 10, 4, drng, c.tol_scale);
        rep.check("decay-schwarzschild-metric", "ALE decay order n-2", fit.exponent, 2.0,
                  std::abs(fit.exponent - 2.0) < 0.05);
    }

    {
        KahlerProfile prof(2, 2, 1.0);
        std::vector<double> radii = {20, 30, 45, 70, 100};
        VolumeFit fit = volume_expansion_fit(prof, radii);
        double lead = sphere_area(3) / 4.0;
        rep.check("volume-lead-m2p2", "leading Euclidean volume coefficient |S^{2m-1}|/(2m)",
                  fit.c_lead, lead, std::abs(fit.c_lead - lead) < 0.005 * lead);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical differential-geometry workbench"};
    app.require_subcommand(1);

    Common c;
    struct {
        int points = 5;
        bool derivatives = false;
        std::string quantity = "rm_norm";
        double r0 = 5.0, rho = 1.6;
        int rungs = 10, samples = 6;
        std::string kind = "all";
        int n = 4;
        std::string field = "covector";
        double k = 2.0, r_in = 1.0, r_out = 2.0;
        int quad_order = 8;
        double a = 2.0, b = 3.0, C0 = 1.0, f1 = 1.0, rmax = 1e6;
        int vol_m = 2, vol_p = 1;
        double vol_a = 1.0, vol_r0 = 50.0, vol_rho = 1.5;
        int vol_rungs = 6;
    } o;

    // config keys are valid across the whole suite; appliers only run for
    // the selected subcommand so "CLI wins" consults the right option
    std::set<std::string> config_keys;
    std::vector<std::pair<CLI::App*, std::function<void(ConfigBinder&)>>> appliers;
    auto common_flags = [&](CLI::App* sub, bool needs_chart) {
        auto bind = [&, sub](const std::string& key, CLI::Option* opt, auto& var) {
            config_keys.insert(key);
            appliers.emplace_back(sub, [key, opt, &var](ConfigBinder& cb) { cb.apply(key, opt, var); });
        };
        if (needs_chart)
            bind("common.chart", sub->add_option("--chart", c.chart_spec, "chart spec, name:key=value,..."),
                 c.chart_spec);
        bind("common.seed", sub->add_option("--seed", c.seed, "rng seed"), c.seed);
        bind("common.tol-scale", sub->add_option("--tol-scale", c.tol_scale, "tolerance multiplier"),
             c.tol_scale);
        bind("common.output",
             sub->add_option("--output", c.output, "report format")->check(CLI::IsMember({"json", "csv"})),
             c.output);
        bind("common.out", sub->add_option("--out", c.out_path, "report path (default stdout)"),
             c.out_path);
        bind("common.jobs", sub->add_option("--jobs", c.jobs, "worker cap"), c.jobs);
        sub->add_option("--config", c.config_path, "flat key-value config file");
        return bind;
    };

    CLI::App* s_verify = app.add_subcommand("verify", "full deterministic verification suite");
    common_flags(s_verify, false);

    CLI::App* s_curv = app.add_subcommand("curvature", "curvature bundle at sampled points");
    {
        auto bind = common_flags(s_curv, true);
        bind("curvature.points", s_curv->add_option("--points", o.points, "sample count"), o.points);
        bind("curvature.derivatives", s_curv->add_flag("--derivatives", o.derivatives, "third-jet quantities"),
             o.derivatives);
    }

    CLI::App* s_decay = app.add_subcommand("decay", "decay-exponent fit along a radius ladder");
    {
        auto bind = common_flags(s_decay, true);
        bind("decay.quantity", s_decay->add_option("--quantity", o.quantity, "metric_deviation|rm_norm|rc_norm|grad_rm_norm|delta_rm_norm"),
             o.quantity);
        bind("decay.r0", s_decay->add_option("--r0", o.r0, "innermost radius"), o.r0);
        bind("decay.rho", s_decay->add_option("--rho", o.rho, "ladder ratio"), o.rho);
        bind("decay.rungs", s_decay->add_option("--rungs", o.rungs, "ladder length"), o.rungs);
        bind("decay.samples", s_decay->add_option("--samples", o.samples, "directions per shell"),
             o.samples);
    }

    CLI::App* s_ineq = app.add_subcommand("inequality", "sharp-constant eigenvalue certificates");
    {
        auto bind = common_flags(s_ineq, false);
        bind("inequality.kind",
             s_ineq->add_option("--kind", o.kind, "space kind, 'matrix', or 'all'"), o.kind);
        bind("inequality.n", s_ineq->add_option("--n", o.n, "dimension (or m for kahler-ricci)"),
             o.n);
    }

    CLI::App* s_poh = app.add_subcommand("pohozaev", "Pohozaev identity on an annulus");
    {
        auto bind = common_flags(s_poh, true);
        bind("pohozaev.field", s_poh->add_option("--field", o.field, "scalar|covector|constant"),
             o.field);
        bind("pohozaev.k", s_poh->add_option("--k", o.k, "field decay power"), o.k);
        bind("pohozaev.r-in", s_poh->add_option("--r-in", o.r_in, "inner radius"), o.r_in);
        bind("pohozaev.r-out", s_poh->add_option("--r-out", o.r_out, "outer radius"), o.r_out);
        bind("pohozaev.quad-order", s_poh->add_option("--quad-order", o.quad_order, "radial segments"),
             o.quad_order);
    }

    CLI::App* s_ode = app.add_subcommand("ode", "comparison ODE envelope");
    {
        auto bind = common_flags(s_ode, false);
        bind("ode.a", s_ode->add_option("--a", o.a, "decay rate a"), o.a);
        bind("ode.b", s_ode->add_option("--b", o.b, "source rate b"), o.b);
        bind("ode.c0", s_ode->add_option("--c0", o.C0, "source amplitude"), o.C0);
        bind("ode.f1", s_ode->add_option("--f1", o.f1, "initial value at r=1"), o.f1);
        bind("ode.rmax", s_ode->add_option("--rmax", o.rmax, "integration end"), o.rmax);
    }

    CLI::App* s_vol = app.add_subcommand("volume", "volume expansion fit for the Kahler family");
    {
        auto bind = common_flags(s_vol, false);
        bind("volume.m", s_vol->add_option("--m", o.vol_m, "complex dimension"), o.vol_m);
        bind("volume.p", s_vol->add_option("--p", o.vol_p, "family parameter"), o.vol_p);
        bind("volume.a", s_vol->add_option("--a", o.vol_a, "core scale"), o.vol_a);
        bind("volume.r0", s_vol->add_option("--r0", o.vol_r0, "innermost radius"), o.vol_r0);
        bind("volume.rho", s_vol->add_option("--rho", o.vol_rho, "ladder ratio"), o.vol_rho);
        bind("volume.rungs", s_vol->add_option("--rungs", o.vol_rungs, "ladder length"),
             o.vol_rungs);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        CLI::App* selected = app.get_subcommands().front();
        if (!c.config_path.empty()) {
            ConfigBinder cb;
            cb.kv = read_config(c.config_path);
            for (auto& [sub, fn] : appliers)
                if (sub == selected) fn(cb);
            for (const auto& [k, v] : cb.kv) {
                (void)v;
                if (!config_keys.count(k)) throw std::runtime_error("unknown config key: " + k);
            }
        }
        if (c.jobs < 1) throw std::runtime_error("--jobs must be >= 1");

        CLI::App* sub = selected;
        Report rep(sub->get_name(), c);
        if (sub == s_verify)
            run_verify(rep, c);
        else if (sub == s_curv)
            run_curvature(rep, c, o.points, o.derivatives);
        else if (sub == s_decay)
            run_decay(rep, c, o.quantity, o.r0, o.rho, o.rungs, o.samples);
        else if (sub == s_ineq)
            run_inequality(rep, c, o.kind, o.n);
        else if (sub == s_poh)
            run_pohozaev(rep, c, o.field, o.k, o.r_in, o.r_out, o.quad_order);
        else if (sub == s_ode)
            run_ode(rep, c, o.a, o.b, o.C0, o.f1, o.rmax);
        else if (sub == s_vol)
            run_volume(rep, c, o.vol_m, o.vol_p, o.vol_a, o.vol_r0, o.vol_rho, o.vol_rungs);
        else
            throw std::runtime_error("unknown subcommand");
        return emit(rep, c);
    } catch (const ChartSpecError& e) {
        std::cerr << "error: bad chart spec: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
