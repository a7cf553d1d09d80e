#pragma once

// Simulation-plus-classification pipeline shared by single runs and
// two-parameter sweeps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sddhopf/config.hpp"
#include "sddhopf/equilibrium.hpp"
#include "sddhopf/normal_form.hpp"
#include "sddhopf/oscillation.hpp"
#include "sddhopf/simulate.hpp"
#include "sddhopf/stability.hpp"

namespace sddhopf {

struct SimulationResult {
    Trajectory trajectory;
    std::optional<OscillationSummary> summary;
    /// "stable", "oscillating", "escaped" or "failed".
    std::string regime;
};

/// Decay per cycle below which an oscillation counts as sustained.
inline constexpr double kSustainedDecayPerCycle = 1e-3;

inline Equilibrium equilibrium_for(const ModelParams& params, const AnalysisConfig& an) {
    EquilibriumOptions opts;
    opts.positive_orthant = an.positive_orthant;
    return find_equilibrium(params, {an.seed[0], an.seed[1]}, opts);
}

inline IntegrationOptions integration_options(const AnalysisConfig& an, const OutputConfig& out) {
    IntegrationOptions io;
    io.rtol = an.rtol;
    io.atol = an.atol;
    io.sample_dt = out.sample_dt;
    io.force = an.force;
    return io;
}

/// Classifies a finished run relative to the equilibrium it started near.
inline std::string classify_run(const Trajectory& traj, const Equilibrium& eq,
                                const std::optional<OscillationSummary>& summary) {
    if (traj.status == RunStatus::Diverged) return "escaped";
    if (traj.status != RunStatus::Completed) return "failed";
    const State2 end = traj.states.back();
    const double scale_r = std::max(1.0, std::abs(eq.r_star));
    const double scale_xi = std::max(1.0, std::abs(eq.xi_star));
    if (std::abs(end[0] - eq.r_star) > 0.5 * scale_r || std::abs(end[1] - eq.xi_star) > 0.5 * scale_xi) {
        return "escaped";
    }
    if (!summary) return "stable";
    if (!(summary->period > 0.0)) return summary->decay_rate > 0.0 ? "stable" : "oscillating";
    return summary->decay_rate * summary->period > kSustainedDecayPerCycle ? "stable" : "oscillating";
}

/// Runs the configured simulation from the equilibrium plus the configured
/// perturbation and measures the oscillation of the first component.
inline SimulationResult run_simulation(const ModelParams& params, const Equilibrium& eq, const AnalysisConfig& an,
                                       const OutputConfig& out) {
    const SystemKind system = parse_system(an.system);
    const IntegrationOptions io = integration_options(an, out);
    const InitialCondition ic =
        perturbed_initial_data(params, eq, {an.perturbation[0], an.perturbation[1]}, system);
    SimulationResult res;
    res.trajectory = system == SystemKind::Original ? integrate_sdd(ic.data, ic.tau0, params, an.t_end, io)
                                                    : integrate_transformed(ic.data, params, an.t_end, io);
    OscillationOptions oo;
    oo.reference = eq.r_star;
    oo.t_min = an.transient * res.trajectory.times.back();
    try {
        res.summary = measure_oscillation(res.trajectory, 0, oo);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientCycles) throw;
    }
    res.regime = classify_run(res.trajectory, eq, res.summary);
    return res;
}

inline std::string_view lower_direction(Direction d) {
    switch (d) {
        case Direction::Supercritical: return "supercritical";
        case Direction::Subcritical: return "subcritical";
        case Direction::Degenerate: return "degenerate";
    }
    return "?";
}

struct SweepCell {
    double x = 0.0, y = 0.0;
    std::string regime;     ///< from simulation
    std::string direction;  ///< analytic: supercritical, subcritical, degenerate, none
    std::string label;      ///< regime/direction
    double eps0 = std::numeric_limits<double>::quiet_NaN();
    double c0 = std::numeric_limits<double>::quiet_NaN();
    double decay_rate = std::numeric_limits<double>::quiet_NaN();
    double amplitude = std::numeric_limits<double>::quiet_NaN();
    double period = std::numeric_limits<double>::quiet_NaN();
    std::string status;
    std::string error;
};

struct SweepResult {
    std::string x_param, y_param;
    std::vector<double> xs, ys;
    std::vector<SweepCell> cells;  ///< row-major: y outer, x inner
    const SweepCell& at(std::size_t ix, std::size_t iy) const { return cells[iy * xs.size() + ix]; }
};

namespace detail {

inline void set_param(ModelConfig& m, const std::string& name, double v) {
    if (name == "eps") m.eps = v;
    else if (name == "c") m.c = v;
    else if (name == "mu_m") m.mu_m = v;
    else if (name == "mu_p") m.mu_p = v;
    else if (name == "alpha_m") m.nonlinearity.alpha_m = v;
    else if (name == "alpha_p") m.nonlinearity.alpha_p = v;
    else if (name == "half") m.nonlinearity.half = v;
    else if (name == "exponent") m.nonlinearity.exponent = v;
    else throw Error(ErrorKind::Config, "cannot sweep parameter '" + name + "'");
}

/// Absolute axis values; relative eps / c axes are offsets from eps0 / c0 of the base model.
inline std::vector<double> resolve_axis(const AxisConfig& axis, const RunConfig& base) {
    std::vector<double> vals = axis.grid();
    if (vals.empty()) throw Error(ErrorKind::Config, "sweep axis '" + axis.param + "' has no values");
    if (!axis.relative) return vals;
    const ModelParams p = make_params(base.model);
    const Equilibrium eq = equilibrium_for(p, base.analysis);
    const HopfPoint hp = solve_hopf(p.rates(), eq.coupling());
    double origin = hp.eps0;
    if (axis.param == "c") {
        const CriticalFrame fr = critical_frame(p.rates(), eq, hp);
        origin = critical_c(fit_kappa3(eq, hp, fr, parse_terms(base.analysis.terms)));
    }
    for (double& v : vals) v += origin;
    return vals;
}

inline SweepCell run_cell(const RunConfig& base, const std::string& xp, double x, const std::string& yp, double y) {
    SweepCell cell;
    cell.x = x;
    cell.y = y;
    cell.direction = "none";
    try {
        ModelConfig m = base.model;
        set_param(m, xp, x);
        set_param(m, yp, y);
        const ModelParams p = make_params(m);
        const Equilibrium eq = equilibrium_for(p, base.analysis);
        try {
            const HopfPoint hp = solve_hopf(p.rates(), eq.coupling());
            cell.eps0 = hp.eps0;
            const CriticalFrame fr = critical_frame(p.rates(), eq, hp);
            const CubicTerms terms = parse_terms(base.analysis.terms);
            const QuadraticCoeffs qc = quadratic_coeffs(eq, hp, fr, p.c);
            cell.direction = lower_direction(normal_form(eq, hp, fr, qc, p.c, terms).direction);
            try {
                cell.c0 = critical_c(fit_kappa3(eq, hp, fr, terms));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NoSignChange) throw;
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::HypothesisViolated) throw;
        }
        const SimulationResult sim = run_simulation(p, eq, base.analysis, base.output);
        cell.regime = sim.regime;
        cell.status = to_string(sim.trajectory.status);
        if (sim.summary) {
            cell.decay_rate = sim.summary->decay_rate;
            cell.amplitude = sim.summary->amplitude;
            cell.period = sim.summary->period;
        }
    } catch (const std::exception& e) {
        cell.regime = "failed";
        cell.error = e.what();
    }
    cell.label = cell.regime + "/" + cell.direction;
    return cell;
}

}  // namespace detail

/// Worker count: hardware concurrency, capped by SDDHOPF_THREADS when set.
inline unsigned sweep_threads(std::size_t cells) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SDDHOPF_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, cells)));
}

/// Classifies every grid cell by a short simulation and overlays the analytic
/// direction. Cell failures are recorded in the cell; the sweep always finishes.
inline SweepResult run_sweep(const RunConfig& base, unsigned threads = 0) {
    const auto& sw = base.analysis.sweep;
    if (sw.x.param == sw.y.param) throw Error(ErrorKind::Config, "sweep axes must name different parameters");
    SweepResult res;
    res.x_param = sw.x.param;
    res.y_param = sw.y.param;
    res.xs = detail::resolve_axis(sw.x, base);
    res.ys = detail::resolve_axis(sw.y, base);
    const std::size_t n = res.xs.size() * res.ys.size();
    res.cells.resize(n);
    if (threads == 0) threads = sweep_threads(n);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const std::size_t ix = i % res.xs.size(), iy = i / res.xs.size();
            res.cells[i] = detail::run_cell(base, res.x_param, res.xs[ix], res.y_param, res.ys[iy]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return res;
}

}  // namespace sddhopf
