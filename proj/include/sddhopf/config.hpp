#pragma once

// JSON run configuration shared by the command-line tool and the recipes.
// Every block rejects unknown keys; omitted keys take the defaults below.

#include <array>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sddhopf/error.hpp"
#include "sddhopf/model.hpp"
#include "sddhopf/normal_form.hpp"
#include "sddhopf/simulate.hpp"

namespace sddhopf {

using json = nlohmann::json;

struct NonlinearityConfig {
    std::string kind = "hes1";  ///< "hes1" or "polynomial"
    double alpha_m = 35.0;
    double half = 1200.0;
    double exponent = 5.0;
    double alpha_p = 10.0;
    std::vector<double> f;  ///< polynomial coefficients, constant term first
    std::vector<double> g;
    bool operator==(const NonlinearityConfig&) const = default;
};

struct ModelConfig {
    double mu_m = 0.03;
    double mu_p = 0.04;
    double c = 0.01;
    double eps = 6.0;
    NonlinearityConfig nonlinearity;
    bool operator==(const ModelConfig&) const = default;
};

/// Axis of a sweep grid: explicit values, or `count` points from `from` to `to`.
struct AxisConfig {
    std::string param = "eps";
    std::vector<double> values;
    double from = 0.0;
    double to = 0.0;
    int count = 0;
    /// Values are offsets from the analytic eps0 (param eps) or c0 (param c).
    bool relative = false;
    bool operator==(const AxisConfig&) const = default;

    std::vector<double> grid() const {
        if (!values.empty()) return values;
        std::vector<double> out;
        if (count == 1) out.push_back(from);
        for (int i = 0; count > 1 && i < count; ++i) out.push_back(from + (to - from) * i / (count - 1));
        return out;
    }
};

struct SweepConfig {
    AxisConfig x{"eps", {}, 0.0, 0.0, 0, false};
    AxisConfig y{"c", {}, 0.0, 0.0, 0, false};
    bool operator==(const SweepConfig&) const = default;
};

struct AnalysisConfig {
    std::array<double, 2> seed{10.0, 3000.0};
    bool positive_orthant = true;
    int eps_k = 0;
    std::string terms = "corrected";  ///< cubic term list: "corrected" or "printed"
    std::string system = "transformed";
    double t_end = 3000.0;
    std::array<double, 2> perturbation{0.5, 0.0};
    double rtol = 1e-9;
    double atol = 1e-9;
    /// Fraction of the run discarded before measuring the oscillation.
    double transient = 0.5;
    bool force = false;
    SweepConfig sweep;
    bool operator==(const AnalysisConfig&) const = default;
};

struct OutputConfig {
    std::string format = "text";  ///< "text", "json" or "csv"
    std::string path;             ///< empty writes to stdout
    double sample_dt = 0.5;
    bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
    ModelConfig model;
    AnalysisConfig analysis;
    OutputConfig output;
    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline void reject_unknown(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) throw Error(ErrorKind::Config, where + " must be a JSON object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw Error(ErrorKind::Config, "unknown key '" + item.key() + "' in " + where);
        }
    }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, where + "." + key + ": " + e.what());
    }
}

inline void read_choice(const json& j, const char* key, std::string& out, const std::string& where,
                        std::initializer_list<const char*> choices) {
    read(j, key, out, where);
    for (const char* c : choices) {
        if (out == c) return;
    }
    throw Error(ErrorKind::Config, where + "." + key + ": unsupported value '" + out + "'");
}

inline const std::set<std::string>& sweep_params() {
    static const std::set<std::string> names{"eps", "c", "mu_m", "mu_p", "alpha_m", "alpha_p", "half", "exponent"};
    return names;
}

inline AxisConfig axis_from_json(const json& j, const std::string& where) {
    reject_unknown(j, where, {"param", "values", "from", "to", "count", "relative"});
    AxisConfig a;
    read(j, "param", a.param, where);
    read(j, "values", a.values, where);
    read(j, "from", a.from, where);
    read(j, "to", a.to, where);
    read(j, "count", a.count, where);
    read(j, "relative", a.relative, where);
    if (!sweep_params().count(a.param)) throw Error(ErrorKind::Config, where + ".param: unknown parameter '" + a.param + "'");
    if (a.relative && a.param != "eps" && a.param != "c") {
        throw Error(ErrorKind::Config, where + ".relative applies to eps and c only");
    }
    if (a.count < 0) throw Error(ErrorKind::Config, where + ".count must be >= 0");
    return a;
}

inline json axis_to_json(const AxisConfig& a) {
    return {{"param", a.param}, {"values", a.values}, {"from", a.from},
            {"to", a.to},       {"count", a.count},   {"relative", a.relative}};
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
    using detail::read;
    detail::reject_unknown(j, "config", {"model", "analysis", "output"});
    RunConfig cfg;
    if (j.contains("model")) {
        const json& m = j.at("model");
        detail::reject_unknown(m, "model", {"mu_m", "mu_p", "c", "eps", "nonlinearity"});
        read(m, "mu_m", cfg.model.mu_m, "model");
        read(m, "mu_p", cfg.model.mu_p, "model");
        read(m, "c", cfg.model.c, "model");
        read(m, "eps", cfg.model.eps, "model");
        if (m.contains("nonlinearity")) {
            const json& n = m.at("nonlinearity");
            const std::string w = "model.nonlinearity";
            detail::reject_unknown(n, w, {"kind", "alpha_m", "half", "exponent", "alpha_p", "f", "g"});
            auto& nl = cfg.model.nonlinearity;
            detail::read_choice(n, "kind", nl.kind, w, {"hes1", "polynomial"});
            read(n, "alpha_m", nl.alpha_m, w);
            read(n, "half", nl.half, w);
            read(n, "exponent", nl.exponent, w);
            read(n, "alpha_p", nl.alpha_p, w);
            read(n, "f", nl.f, w);
            read(n, "g", nl.g, w);
        }
    }
    if (j.contains("analysis")) {
        const json& a = j.at("analysis");
        detail::reject_unknown(a, "analysis",
                               {"seed", "positive_orthant", "eps_k", "terms", "system", "t_end", "perturbation",
                                "rtol", "atol", "transient", "force", "sweep"});
        auto& an = cfg.analysis;
        read(a, "seed", an.seed, "analysis");
        read(a, "positive_orthant", an.positive_orthant, "analysis");
        read(a, "eps_k", an.eps_k, "analysis");
        detail::read_choice(a, "terms", an.terms, "analysis", {"corrected", "printed"});
        detail::read_choice(a, "system", an.system, "analysis", {"original", "transformed"});
        read(a, "t_end", an.t_end, "analysis");
        read(a, "perturbation", an.perturbation, "analysis");
        read(a, "rtol", an.rtol, "analysis");
        read(a, "atol", an.atol, "analysis");
        read(a, "transient", an.transient, "analysis");
        read(a, "force", an.force, "analysis");
        if (a.contains("sweep")) {
            const json& s = a.at("sweep");
            detail::reject_unknown(s, "analysis.sweep", {"x", "y"});
            if (s.contains("x")) an.sweep.x = detail::axis_from_json(s.at("x"), "analysis.sweep.x");
            if (s.contains("y")) an.sweep.y = detail::axis_from_json(s.at("y"), "analysis.sweep.y");
        }
        if (an.eps_k < 0) throw Error(ErrorKind::Config, "analysis.eps_k must be >= 0");
        if (!(an.transient >= 0.0 && an.transient < 1.0)) {
            throw Error(ErrorKind::Config, "analysis.transient must lie in [0, 1)");
        }
    }
    if (j.contains("output")) {
        const json& o = j.at("output");
        detail::reject_unknown(o, "output", {"format", "path", "sample_dt"});
        detail::read_choice(o, "format", cfg.output.format, "output", {"text", "json", "csv"});
        read(o, "path", cfg.output.path, "output");
        read(o, "sample_dt", cfg.output.sample_dt, "output");
    }
    return cfg;
}

inline json config_to_json(const RunConfig& cfg) {
    const auto& nl = cfg.model.nonlinearity;
    const auto& an = cfg.analysis;
    return {
        {"model",
         {{"mu_m", cfg.model.mu_m},
          {"mu_p", cfg.model.mu_p},
          {"c", cfg.model.c},
          {"eps", cfg.model.eps},
          {"nonlinearity",
           {{"kind", nl.kind},
            {"alpha_m", nl.alpha_m},
            {"half", nl.half},
            {"exponent", nl.exponent},
            {"alpha_p", nl.alpha_p},
            {"f", nl.f},
            {"g", nl.g}}}}},
        {"analysis",
         {{"seed", an.seed},
          {"positive_orthant", an.positive_orthant},
          {"eps_k", an.eps_k},
          {"terms", an.terms},
          {"system", an.system},
          {"t_end", an.t_end},
          {"perturbation", an.perturbation},
          {"rtol", an.rtol},
          {"atol", an.atol},
          {"transient", an.transient},
          {"force", an.force},
          {"sweep", {{"x", detail::axis_to_json(an.sweep.x)}, {"y", detail::axis_to_json(an.sweep.y)}}}}},
        {"output", {{"format", cfg.output.format}, {"path", cfg.output.path}, {"sample_dt", cfg.output.sample_dt}}},
    };
}

inline RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Config, std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Model parameters described by a configuration.
inline ModelParams make_params(const ModelConfig& m) {
    ModelParams p;
    p.mu_m = m.mu_m;
    p.mu_p = m.mu_p;
    p.c = m.c;
    p.eps = m.eps;
    const auto& nl = m.nonlinearity;
    try {
        if (nl.kind == "hes1") {
            p.nonlinearity = hes1_nonlinearity(HillRepressor{nl.alpha_m, nl.half, nl.exponent}, nl.alpha_p);
        } else {
            p.nonlinearity = polynomial_nonlinearity(nl.f, nl.g);
        }
        p.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
    }
    return p;
}

inline CubicTerms parse_terms(const std::string& s) {
    return s == "printed" ? CubicTerms::AsPrinted : CubicTerms::Corrected;
}

inline SystemKind parse_system(const std::string& s) {
    return s == "original" ? SystemKind::Original : SystemKind::Transformed;
}

}  // namespace sddhopf
