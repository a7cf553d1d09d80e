#pragma once

// The sddhopf command-line tool. run_cli() holds all of it so that tests can
// drive the tool in-process.
//
// Exit codes: 0 success, 1 configuration, 2 solver, 3 resonance, 4 integration.

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sddhopf/config.hpp"
#include "sddhopf/equilibrium.hpp"
#include "sddhopf/normal_form.hpp"
#include "sddhopf/oscillation.hpp"
#include "sddhopf/simulate.hpp"
#include "sddhopf/stability.hpp"
#include "sddhopf/sweep.hpp"

namespace sddhopf {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitSolver = 2, kExitResonance = 3, kExitIntegration = 4 };

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::InvalidArgument:
            return kExitConfig;
        case ErrorKind::ResonanceViolation:
            return kExitResonance;
        case ErrorKind::DenominatorBreach:
        case ErrorKind::HistoryTooShort:
        case ErrorKind::NoBracket:
        case ErrorKind::Incompatible:
            return kExitIntegration;
        default:
            return kExitSolver;
    }
}

namespace cli_detail {

inline std::string num(double v, int digits = 10) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

inline std::string cnum(cplx z, int digits = 10) {
    return num(z.real(), digits) + (z.imag() < 0.0 ? " - " : " + ") + num(std::abs(z.imag()), digits) + "i";
}

inline std::string poly_text(const std::array<double, 3>& a) {
    auto term = [](double v, const char* suffix) {
        return std::string(v < 0.0 ? " - " : " + ") + num(std::abs(v)) + suffix;
    };
    return num(a[0]) + " c^2" + term(a[1], " c") + term(a[2], "");
}

inline json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
inline json jcplx(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

/// Destination of a report: the configured file, else the given stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error(ErrorKind::Config, "cannot open output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

private:
    std::ofstream file_;
    std::ostream& fallback_;
};

struct Overrides {
    std::string config;
    std::optional<double> eps, c, t_end;
    std::optional<std::string> system, format, output, terms;
    std::optional<int> eps_k;
};

inline RunConfig resolve(const Overrides& ov) {
    RunConfig cfg = ov.config.empty() ? RunConfig{} : load_config(ov.config);
    if (ov.eps) cfg.model.eps = *ov.eps;
    if (ov.c) cfg.model.c = *ov.c;
    if (ov.t_end) cfg.analysis.t_end = *ov.t_end;
    if (ov.system) cfg.analysis.system = *ov.system;
    if (ov.format) cfg.output.format = *ov.format;
    if (ov.output) cfg.output.path = *ov.output;
    if (ov.terms) cfg.analysis.terms = *ov.terms;
    if (ov.eps_k) cfg.analysis.eps_k = *ov.eps_k;
    // Re-validate the merged document so flags obey the same rules as files.
    return config_from_json(config_to_json(cfg));
}

// -- equilibrium -----------------------------------------------------------

inline int cmd_equilibrium(const RunConfig& cfg, std::ostream& out) {
    const ModelParams p = make_params(cfg.model);
    const Equilibrium eq = equilibrium_for(p, cfg.analysis);
    Sink sink(cfg.output.path, out);
    auto& os = sink.stream();
    if (cfg.output.format == "json") {
        os << json{{"r_star", eq.r_star}, {"xi_star", eq.xi_star},
                   {"f1", eq.f1},         {"f2", eq.f2},
                   {"f3", eq.f3},         {"g1", eq.g1},
                   {"g2", eq.g2},         {"g3", eq.g3},
                   {"residuals", {eq.residual_x, eq.residual_y}}}
                  .dump(2)
           << '\n';
    } else if (cfg.output.format == "csv") {
        os << "r_star,xi_star,f1,f2,f3,g1,g2,g3,residual_x,residual_y\n" << std::setprecision(17) << eq.r_star << ','
           << eq.xi_star << ',' << eq.f1 << ',' << eq.f2 << ',' << eq.f3 << ',' << eq.g1 << ',' << eq.g2 << ','
           << eq.g3 << ',' << eq.residual_x << ',' << eq.residual_y << '\n';
    } else {
        os << "r*  = " << num(eq.r_star) << "\nxi* = " << num(eq.xi_star) << "\nf'(xi*) = " << num(eq.f1)
           << "  f''(xi*) = " << num(eq.f2) << "  f'''(xi*) = " << num(eq.f3) << "\ng'(r*) = " << num(eq.g1)
           << "  g''(r*) = " << num(eq.g2) << "  g'''(r*) = " << num(eq.g3) << "\nresiduals = "
           << num(eq.residual_x, 3) << ", " << num(eq.residual_y, 3) << '\n';
    }
    return kExitOk;
}

// -- stability -------------------------------------------------------------

inline int cmd_stability(const RunConfig& cfg, std::ostream& out) {
    const ModelParams p = make_params(cfg.model);
    const Equilibrium eq = equilibrium_for(p, cfg.analysis);
    Sink sink(cfg.output.path, out);
    auto& os = sink.stream();
    const StabilityClass cls = classify_stability(eq, p.rates(), p.eps);
    if (cls.kind == StabilityKind::StableForAllEps) {
        if (cfg.output.format == "json") {
            os << json{{"coupling", eq.coupling()}, {"classification", to_string(cls.kind)}, {"eps", p.eps}}.dump(2)
               << '\n';
        } else if (cfg.output.format == "csv") {
            os << "coupling,classification,eps\n" << std::setprecision(17) << eq.coupling() << ','
               << to_string(cls.kind) << ',' << p.eps << '\n';
        } else {
            os << "f'g' = " << num(eq.coupling()) << " >= -mu_m mu_p\nclassification: " << to_string(cls.kind)
               << " (stable for all eps)\n";
        }
        return kExitOk;
    }
    const HopfPoint hp = solve_hopf(p.rates(), eq.coupling());
    struct Crit {
        int k;
        double eps, omega, residual;
    };
    std::vector<Crit> crit;
    for (int k = 1; k <= cfg.analysis.eps_k; ++k) {
        const double ek = hp.eps_k(k), wk = hp.omega_k(k);
        crit.push_back({k, ek, wk, std::abs(char_eval(cplx{0.0, wk}, hp.char_params(ek)))});
    }
    const cplx ch2 = char_eval(cplx{0.0, 2.0 * hp.omega}, hp.char_params(hp.eps0));
    if (cfg.output.format == "json") {
        json ks = json::array();
        for (const auto& c : crit) ks.push_back({{"k", c.k}, {"eps", c.eps}, {"omega", c.omega}, {"residual", c.residual}});
        os << json{{"eps0", hp.eps0},
                   {"omega", hp.omega},
                   {"l", hp.l},
                   {"dalpha_deps", hp.dalpha_deps},
                   {"char_2iomega", jcplx(ch2)},
                   {"eps_k", ks},
                   {"eps", p.eps},
                   {"classification", to_string(cls.kind)}}
                  .dump(2)
           << '\n';
    } else if (cfg.output.format == "csv") {
        os << "k,eps_k,omega_k,char_residual\n" << std::setprecision(17);
        os << 0 << ',' << hp.eps0 << ',' << hp.omega << ','
           << std::abs(char_eval(cplx{0.0, hp.omega}, hp.char_params(hp.eps0))) << '\n';
        for (const auto& c : crit) os << c.k << ',' << c.eps << ',' << c.omega << ',' << c.residual << '\n';
    } else {
        os << "eps0 = " << num(hp.eps0) << "\nomega* = " << num(hp.omega) << "\nl = " << num(hp.l)
           << "\ndalpha/deps = " << num(hp.dalpha_deps) << "\nchar(2 i omega*, eps0) = " << cnum(ch2) << '\n';
        for (const auto& c : crit) {
            os << "eps_" << c.k << " = " << num(c.eps) << "  (omega = " << num(c.omega)
               << ", |char| = " << num(c.residual, 3) << ")\n";
        }
        os << "classification at eps = " << num(p.eps) << ": " << to_string(cls.kind) << '\n';
    }
    return kExitOk;
}

// -- normal form -----------------------------------------------------------

inline int cmd_normal_form(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams p = make_params(cfg.model);
    const Equilibrium eq = equilibrium_for(p, cfg.analysis);
    const HopfPoint hp = solve_hopf(p.rates(), eq.coupling());
    const CriticalFrame fr = critical_frame(p.rates(), eq, hp);
    const CubicTerms terms = parse_terms(cfg.analysis.terms);
    QuadraticCoeffs qc;
    try {
        qc = quadratic_coeffs(eq, hp, fr, p.c);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ResonanceViolation) {
            err << "char(2 i omega*, eps0) = " << cnum(char_eval(cplx{0.0, 2.0 * hp.omega}, hp.char_params(hp.eps0)))
                << '\n';
        }
        throw;
    }
    const NormalForm nf = normal_form(eq, hp, fr, qc, p.c, terms);
    const Kappa3Polynomial poly = fit_kappa3(eq, hp, fr, terms);
    std::optional<double> c0;
    try {
        c0 = critical_c(poly);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoSignChange) throw;
    }
    Sink sink(cfg.output.path, out);
    auto& os = sink.stream();
    if (cfg.output.format == "json") {
        os << json{{"eps0", hp.eps0},
                   {"omega", hp.omega},
                   {"c", p.c},
                   {"terms", to_string(terms)},
                   {"kappa1", jcplx(nf.kappa1)},
                   {"kappa3", jcplx(nf.kappa3)},
                   {"kappa3_re", poly.re},
                   {"kappa3_im", poly.im},
                   {"direction", to_string(nf.direction)},
                   {"c0", c0 ? json(*c0) : json(nullptr)},
                   {"char_2iomega", jcplx(qc.second_harmonic_char)}}
                  .dump(2)
           << '\n';
    } else if (cfg.output.format == "csv") {
        os << "c,terms,kappa1_re,kappa1_im,kappa3_re,kappa3_im,re_c2,re_c1,re_c0,im_c2,im_c1,im_c0,direction,c0\n"
           << std::setprecision(17) << p.c << ',' << to_string(terms) << ',' << nf.kappa1.real() << ','
           << nf.kappa1.imag() << ',' << nf.kappa3.real() << ',' << nf.kappa3.imag() << ',' << poly.re[0] << ','
           << poly.re[1] << ',' << poly.re[2] << ',' << poly.im[0] << ',' << poly.im[1] << ',' << poly.im[2] << ','
           << to_string(nf.direction) << ',' << (c0 ? num(*c0, 17) : "nan") << '\n';
    } else {
        os << "cubic terms: " << to_string(terms) << "\nkappa1 = " << cnum(nf.kappa1) << "\nRe kappa3(c) = " << poly_text(poly.re)
           << "\nIm kappa3(c) = " << poly_text(poly.im)
           << "\nkappa3(" << num(p.c) << ") = " << cnum(nf.kappa3) << "\ndirection at c = " << num(p.c) << ": "
           << to_string(nf.direction) << "\nc0 = " << (c0 ? num(*c0) : std::string("none")) << '\n';
    }
    return kExitOk;
}

// -- simulate --------------------------------------------------------------

inline json summary_json(const SimulationResult& sim) {
    json j{{"status", to_string(sim.trajectory.status)},
           {"regime", sim.regime},
           {"samples", sim.trajectory.times.size()},
           {"t_final", sim.trajectory.times.back()},
           {"final_state", {sim.trajectory.states.back()[0], sim.trajectory.states.back()[1]}}};
    if (sim.summary) {
        j["amplitude"] = jnum(sim.summary->amplitude);
        j["period"] = jnum(sim.summary->period);
        j["decay_rate"] = jnum(sim.summary->decay_rate);
    }
    const auto& m = sim.trajectory.monitors;
    j["monitors"] = {{"positive", m.positive},
                     {"slope_ok", m.slope_ok},
                     {"max_threshold_residual", m.max_threshold_residual},
                     {"min_delay", jnum(m.min_tau)},
                     {"max_delay", jnum(m.max_tau)},
                     {"accepted_steps", m.accepted},
                     {"rejected_steps", m.rejected}};
    json ev = json::array();
    for (const auto& e : sim.trajectory.events) ev.push_back({{"t", e.t}, {"kind", e.kind}, {"message", e.message}});
    j["events"] = ev;
    return j;
}

inline void summary_text(const SimulationResult& sim, std::ostream& os) {
    const auto& tr = sim.trajectory;
    os << "system: " << to_string(tr.system) << "\nstatus: " << to_string(tr.status) << "\nregime: " << sim.regime
       << "\nfinal state: (" << num(tr.states.back()[0]) << ", " << num(tr.states.back()[1]) << ") at "
       << num(tr.times.back()) << '\n';
    if (sim.summary) {
        os << "amplitude: " << num(sim.summary->amplitude, 6) << "\nperiod: " << num(sim.summary->period, 6)
           << "\ndecay rate: " << num(sim.summary->decay_rate, 6) << '\n';
    } else {
        os << "no oscillation detected\n";
    }
    os << "positivity kept: " << (tr.monitors.positive ? "yes" : "no")
       << "\nmax threshold residual: " << num(tr.monitors.max_threshold_residual, 3) << '\n';
}

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const ModelParams p = make_params(cfg.model);
    const Equilibrium eq = equilibrium_for(p, cfg.analysis);
    const SimulationResult sim = run_simulation(p, eq, cfg.analysis, cfg.output);
    if (!cfg.output.path.empty()) {
        Sink sink(cfg.output.path, out);
        write_csv(sim.trajectory, sink.stream());
    }
    if (cfg.output.format == "csv") {
        if (cfg.output.path.empty()) write_csv(sim.trajectory, out);
    } else if (cfg.output.format == "json") {
        out << summary_json(sim).dump(2) << '\n';
    } else {
        summary_text(sim, out);
    }
    if (!sim.trajectory.ok()) {
        for (const auto& e : sim.trajectory.events) err << "t = " << num(e.t) << ": " << e.kind << ": " << e.message << '\n';
        return kExitIntegration;
    }
    return kExitOk;
}

// -- sweep -----------------------------------------------------------------

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const SweepResult res = run_sweep(cfg);
    Sink sink(cfg.output.path, out);
    auto& os = sink.stream();
    if (cfg.output.format == "json") {
        json cells = json::array();
        for (const auto& c : res.cells) {
            cells.push_back({{res.x_param, c.x},
                             {res.y_param, c.y},
                             {"label", c.label},
                             {"regime", c.regime},
                             {"direction", c.direction},
                             {"eps0", jnum(c.eps0)},
                             {"c0", jnum(c.c0)},
                             {"decay_rate", jnum(c.decay_rate)},
                             {"amplitude", jnum(c.amplitude)},
                             {"period", jnum(c.period)},
                             {"status", c.status},
                             {"error", c.error}});
        }
        os << json{{"x", res.x_param}, {"y", res.y_param}, {"xs", res.xs}, {"ys", res.ys}, {"cells", cells}}.dump(2)
           << '\n';
        return kExitOk;
    }
    // Label matrix: one row per y value, one column per x value.
    const char sep = cfg.output.format == "csv" ? ',' : '\t';
    os << std::setprecision(10) << res.y_param << '\\' << res.x_param;
    for (double x : res.xs) os << sep << x;
    os << '\n';
    for (std::size_t iy = 0; iy < res.ys.size(); ++iy) {
        os << res.ys[iy];
        for (std::size_t ix = 0; ix < res.xs.size(); ++ix) os << sep << res.at(ix, iy).label;
        os << '\n';
    }
    if (cfg.output.format == "text") {
        for (const auto& c : res.cells) {
            if (!c.error.empty()) os << "cell (" << num(c.x) << ", " << num(c.y) << "): " << c.error << '\n';
        }
        const SweepCell& first = res.cells.front();
        os << "eps0 = " << num(first.eps0) << ", c0 = " << num(first.c0) << " at the first cell\n";
    }
    return kExitOk;
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hopf analysis and simulation of a two-species system with state-dependent delay", "sddhopf"};
    app.require_subcommand(1);
    cli_detail::Overrides ov;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", ov.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--eps", ov.eps, "basal delay eps");
        sub->add_option("--c", ov.c, "state-dependence coefficient c");
        sub->add_option("--t-end", ov.t_end, "simulation end time");
        sub->add_option("--system", ov.system, "original or transformed")
            ->check(CLI::IsMember({"original", "transformed"}));
        sub->add_option("--format", ov.format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
        sub->add_option("--output", ov.output, "output file");
        sub->add_option("--terms", ov.terms, "cubic term list: corrected or printed")
            ->check(CLI::IsMember({"corrected", "printed"}));
    };
    CLI::App* eq_cmd = app.add_subcommand("equilibrium", "steady state and feedback derivatives");
    CLI::App* st_cmd = app.add_subcommand("stability", "Hopf point, transversality and classification");
    CLI::App* nf_cmd = app.add_subcommand("normal-form", "cubic normal form and bifurcation direction");
    CLI::App* sim_cmd = app.add_subcommand("simulate", "integrate from a perturbed equilibrium");
    CLI::App* sw_cmd = app.add_subcommand("sweep", "two-parameter regime chart");
    for (CLI::App* s : {eq_cmd, st_cmd, nf_cmd, sim_cmd, sw_cmd}) add_common(s);
    st_cmd->add_option("--eps-k", ov.eps_k, "number of further critical values eps_k to list");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const RunConfig cfg = cli_detail::resolve(ov);
        if (eq_cmd->parsed()) return cli_detail::cmd_equilibrium(cfg, out);
        if (st_cmd->parsed()) return cli_detail::cmd_stability(cfg, out);
        if (nf_cmd->parsed()) return cli_detail::cmd_normal_form(cfg, out, err);
        if (sim_cmd->parsed()) return cli_detail::cmd_simulate(cfg, out, err);
        return cli_detail::cmd_sweep(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitSolver;
    }
}

}  // namespace sddhopf
