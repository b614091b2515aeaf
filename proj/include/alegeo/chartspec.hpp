#pragma once

// Chart spec grammar for the CLI:  name [":" key "=" value {"," key "=" value}]
// e.g. "schwarzschild:n=4,mu=1", "kahler:m=2,p=1,a=1", "flat:n=4".
// Parse errors carry the byte position of the first bad token.

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>

#include "alegeo/charts.hpp"
#include "alegeo/kahler.hpp"

namespace alegeo {

struct ChartSpecError : std::runtime_error {
    size_t position;
    ChartSpecError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
};

struct ChartSpec {
    std::string name;
    std::map<std::string, double> params;
};

inline ChartSpec parse_chart_spec(const std::string& s) {
    ChartSpec spec;
    size_t i = 0;
    auto ident = [&]() {
        size_t start = i;
        while (i < s.size() && (std::isalnum((unsigned char)s[i]) || s[i] == '_')) ++i;
        if (i == start) throw ChartSpecError("expected identifier", start);
        return s.substr(start, i - start);
    };
    spec.name = ident();
    if (i == s.size()) return spec;
    if (s[i] != ':') throw ChartSpecError("expected ':' after chart name", i);
    ++i;
    while (true) {
        size_t key_pos = i;
        std::string key = ident();
        if (spec.params.count(key)) throw ChartSpecError("duplicate key '" + key + "'", key_pos);
        if (i == s.size() || s[i] != '=') throw ChartSpecError("expected '=' after key", i);
        ++i;
        size_t val_pos = i;
        while (i < s.size() && s[i] != ',') ++i;
        std::string val = s.substr(val_pos, i - val_pos);
        try {
            size_t used = 0;
            spec.params[key] = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ChartSpecError("expected numeric value", val_pos);
        }
        if (i == s.size()) break;
        ++i;  // consume ','
        if (i == s.size()) throw ChartSpecError("trailing ','", i - 1);
    }
    return spec;
}

namespace detail {

inline double take(ChartSpec& spec, const std::string& key, double fallback,
                   bool required = false) {
    auto it = spec.params.find(key);
    if (it == spec.params.end()) {
        if (required) throw ChartSpecError("missing required key '" + key + "'", 0);
        return fallback;
    }
    double v = it->second;
    spec.params.erase(it);
    return v;
}

inline int take_int(ChartSpec& spec, const std::string& key, int fallback,
                    bool required = false) {
    double v = take(spec, key, fallback, required);
    int k = (int)std::lround(v);
    if (std::abs(v - k) > 1e-12)
        throw ChartSpecError("key '" + key + "' must be an integer", 0);
    return k;
}

}  // namespace detail

inline MetricChart chart_from_spec(const std::string& text) {
    ChartSpec spec = parse_chart_spec(text);
    MetricChart chart;
    if (spec.name == "flat") {
        chart = flat_chart(detail::take_int(spec, "n", 0, true), false);
    } else if (spec.name == "flatpolar") {
        chart = flat_chart(detail::take_int(spec, "n", 0, true), true);
    } else if (spec.name == "schwarzschild") {
        int n = detail::take_int(spec, "n", 0, true);
        chart = schwarzschild_chart(n, detail::take(spec, "mu", 1.0));
    } else if (spec.name == "kahler") {
        int m = detail::take_int(spec, "m", 0, true);
        int p = detail::take_int(spec, "p", 0, true);
        double a = detail::take(spec, "a", 1.0);
        chart = kahler_chart(KahlerProfile(m, p, a));
    } else if (spec.name == "sphere2") {
        chart = sphere2_chart();
    } else {
        throw ChartSpecError("unknown chart family '" + spec.name + "'", 0);
    }
    if (!spec.params.empty())
        throw ChartSpecError("unknown key '" + spec.params.begin()->first + "' for chart '" +
                                 spec.name + "'",
                             0);
    return chart;
}

}  // namespace alegeo
