#pragma once

// Method-of-steps integration of the state-dependent-delay system in t and of
// its unit-delay transform in eta, with invariant monitors.

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sddhopf/dopri5.hpp"
#include "sddhopf/equilibrium.hpp"
#include "sddhopf/error.hpp"
#include "sddhopf/history.hpp"
#include "sddhopf/model.hpp"

namespace sddhopf {

// ---------------------------------------------------------------------------
// Compatibility at t = 0

struct CompatibilityReport {
    /// x'(0) equation, y'(0) equation, tau0 equation (absolute residuals).
    std::array<double, 3> residuals{};
    /// Residuals divided by the magnitude of their terms.
    std::array<double, 3> scaled{};
    double tolerance = 1e-8;
    bool passed = false;
};

inline CompatibilityReport check_compatibility(const InitialData& init, double tau0,
                                               const ModelParams& params, double tolerance = 1e-8) {
    require(tau0 > 0.0, ErrorKind::InvalidArgument, "tau0 must be positive");
    if (tau0 > init.alpha0) {
        throw Error(ErrorKind::HistoryTooShort, "tau0 = " + std::to_string(tau0) +
                                                    " exceeds the initial interval length " +
                                                    std::to_string(init.alpha0));
    }
    const State2 now = init.value(0.0);
    const State2 slope = init.derivative(0.0);
    const State2 back = init.value(-tau0);
    const double fy = params.nonlinearity.f(back[1]).value;
    const double gx = params.nonlinearity.g(back[0]).value;
    CompatibilityReport rep;
    rep.tolerance = tolerance;
    rep.residuals[0] = slope[0] - (-params.mu_m * now[0] + fy);
    rep.residuals[1] = slope[1] - (-params.mu_p * now[1] + gx);
    rep.residuals[2] = tau0 - params.eps - params.c * (now[0] - back[0]);
    const double s0 = std::max({1.0, std::abs(slope[0]), std::abs(params.mu_m * now[0]), std::abs(fy)});
    const double s1 = std::max({1.0, std::abs(slope[1]), std::abs(params.mu_p * now[1]), std::abs(gx)});
    const double s2 = std::max(params.eps, tau0);
    rep.scaled = {rep.residuals[0] / s0, rep.residuals[1] / s1, rep.residuals[2] / s2};
    rep.passed = std::all_of(rep.scaled.begin(), rep.scaled.end(),
                             [&](double r) { return std::abs(r) <= tolerance; });
    return rep;
}

// ---------------------------------------------------------------------------
// Implicit delay

struct DelaySolveOptions {
    double tolerance = 1e-13;  ///< on |residual| / max(eps, tau)
    int max_fixed_point = 60;
    double damping = 1.0;      ///< relaxation weight of the fixed-point update
    /// Upper end of the bisection bracket; 0 selects 10 (eps + c * dynamic_range).
    double tau_max = 0.0;
    double dynamic_range = 0.0;
};

struct DelaySolution {
    double tau = 0.0;
    double residual = 0.0;  ///< tau - eps - c (x(t) - x(t - tau))
    int iterations = 0;
    bool bisected = false;
    /// c sup|x'| < 1 on the history, the uniqueness condition.
    bool slope_bound_ok = true;
};

/// Solves tau = eps + c (x_now - x(t - tau)) for tau > 0. `History` must provide
/// operator()(double) -> State2, start(), frontier() and max_abs_dx().
/// Throws FrontierExceeded when the root needs history beyond the frontier.
template <class History>
DelaySolution solve_delay(double t, double x_now, const History& hist, const ModelParams& params,
                          double tau_seed, const DelaySolveOptions& opt = {}) {
    const double eps = params.eps, c = params.c;
    DelaySolution sol;
    if (c == 0.0) {
        sol.tau = eps;
        return sol;
    }
    sol.slope_bound_ok = c * hist.max_abs_dx() < 1.0;
    auto resid = [&](double tau) { return tau - eps - c * (x_now - hist(t - tau)[0]); };
    auto small = [&](double r, double tau) { return std::abs(r) <= opt.tolerance * std::max(eps, tau); };

    const double tiny = 1e-14 * eps;
    const double tau_lo = std::max(t - hist.frontier(), tiny);
    const double range = opt.dynamic_range > 0.0 ? opt.dynamic_range : std::max(1.0, std::abs(x_now));
    const double tau_cap = opt.tau_max > 0.0 ? opt.tau_max : 10.0 * (eps + c * range);
    const double tau_hi = std::min(tau_cap, t - hist.start());
    if (!(tau_hi > tau_lo)) {
        throw Error(ErrorKind::NoBracket, "empty delay bracket at t = " + std::to_string(t));
    }

    double tau = std::clamp(tau_seed > 0.0 ? tau_seed : eps, tau_lo, tau_hi);
    for (int it = 0; it < opt.max_fixed_point; ++it) {
        const double r = resid(tau);
        ++sol.iterations;
        if (small(r, tau)) {
            sol.tau = tau;
            sol.residual = r;
            return sol;
        }
        if (!std::isfinite(r)) break;
        // tau - r is the plain fixed-point image eps + c (x_now - x(t - tau)).
        tau = std::clamp(tau - opt.damping * r, tau_lo, tau_hi);
    }

    sol.bisected = true;
    double lo = tau_lo, hi = tau_hi;
    const double r_lo = resid(lo);
    if (r_lo > 0.0) {
        if (tau_lo > tiny) throw FrontierExceeded{t - tau_lo, hist.frontier()};
        throw Error(ErrorKind::NoBracket, "delay residual positive at tau -> 0 (t = " + std::to_string(t) + ")");
    }
    const double r_hi = resid(hi);
    if (!(r_hi > 0.0)) {
        throw Error(ErrorKind::NoBracket, "no sign change of the delay residual on (0, " +
                                              std::to_string(hi) + "] at t = " + std::to_string(t));
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = resid(mid);
        ++sol.iterations;
        if (small(r, mid) || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * mid) {
            sol.tau = mid;
            sol.residual = r;
            return sol;
        }
        (r < 0.0 ? lo : hi) = mid;
    }
    sol.tau = 0.5 * (lo + hi);
    sol.residual = resid(sol.tau);
    return sol;
}

// ---------------------------------------------------------------------------
// Trajectories

enum class SystemKind { Original, Transformed };

inline std::string_view to_string(SystemKind s) {
    return s == SystemKind::Original ? "original" : "transformed";
}

enum class RunStatus { Completed, B2Violation, NoBracket, StepUnderflow, Diverged, NonFinite, MaxSteps };

inline std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::Completed: return "Completed";
        case RunStatus::B2Violation: return "B2Violation";
        case RunStatus::NoBracket: return "NoBracket";
        case RunStatus::StepUnderflow: return "StepUnderflow";
        case RunStatus::Diverged: return "Diverged";
        case RunStatus::NonFinite: return "NonFinite";
        case RunStatus::MaxSteps: return "MaxSteps";
    }
    return "?";
}

struct Event {
    double t = 0.0;
    std::string kind;
    std::string message;
};

/// Invariants checked at every accepted step.
struct Monitors {
    double max_threshold_residual = 0.0;  ///< |tau - eps - c(x - x_tau)|, original system only
    double min_tau = std::numeric_limits<double>::infinity();
    double max_tau = 0.0;
    double max_xdot = -std::numeric_limits<double>::infinity();  ///< x' in original time
    double min_x = std::numeric_limits<double>::infinity();
    double min_y = std::numeric_limits<double>::infinity();
    bool positive = true;   ///< x, y, tau > 0 throughout
    bool slope_ok = true;   ///< x' < min(1/c, sup f) throughout
    bool slope_bound_warned = false;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

struct Trajectory {
    SystemKind system = SystemKind::Original;
    std::vector<double> times;
    std::vector<State2> states;
    std::vector<double> delay;  ///< tau(t) or k(eta)
    std::vector<Event> events;
    RunStatus status = RunStatus::Completed;
    Monitors monitors;

    bool ok() const { return status == RunStatus::Completed; }
    std::vector<double> component(int i) const {
        std::vector<double> out(states.size());
        for (std::size_t k = 0; k < states.size(); ++k) out[k] = states[k][i];
        return out;
    }
};

struct IntegrationOptions {
    double rtol = 1e-9;
    double atol = 1e-9;
    double h_init = 0.0;  ///< 0 selects a fraction of the delay
    double h_max = std::numeric_limits<double>::infinity();
    double h_min = 1e-12;
    std::size_t max_steps = 5'000'000;
    double sample_dt = 0.0;  ///< 0 records every accepted step
    bool force = false;      ///< integrate even if the compatibility check fails
    double compat_tolerance = 1e-8;
    int breakpoint_generations = 3;
    double divergence_bound = 1e12;
};

/// Writes `t,x,y,tau` or `eta,r,xi,k` rows at 17 significant digits.
inline void write_csv(const Trajectory& traj, std::ostream& os) {
    os << (traj.system == SystemKind::Original ? "t,x,y,tau\n" : "eta,r,xi,k\n");
    std::ostringstream line;
    line << std::setprecision(17);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        line.str("");
        line << traj.times[i] << ',' << traj.states[i][0] << ',' << traj.states[i][1] << ','
             << traj.delay[i] << '\n';
        os << line.str();
    }
}

// ---------------------------------------------------------------------------
// Driver shared by both systems

namespace detail {

struct StepRejected {};

/// `Sys` supplies rhs(t, y) -> State2 (recording the delay of its last call
/// in `last_delay`), delay_at(t, y), step_cap(t), after_accept(t, y, k) and
/// note_accept_time(t_old, t_new).
template <class Sys>
void run_dopri5(Sys& sys, DenseHistory& hist, State2 y, double t_end, const IntegrationOptions& opt,
                Trajectory& traj) {
    double t = hist.frontier();
    State2 k1 = sys.rhs(t, y);
    traj.times.push_back(t);
    traj.states.push_back(y);
    traj.delay.push_back(sys.last_delay);
    sys.after_accept(t, y, k1, traj);

    double h = opt.h_init > 0.0 ? opt.h_init : 0.01 * sys.delay_scale();
    double next_sample = opt.sample_dt > 0.0 ? t + opt.sample_dt : 0.0;
    std::size_t steps = 0;

    while (t < t_end && traj.status == RunStatus::Completed) {
        if (++steps > opt.max_steps) {
            traj.status = RunStatus::MaxSteps;
            traj.events.push_back({t, "MaxSteps", "step budget exhausted"});
            break;
        }
        h = std::min({h, opt.h_max, sys.step_cap(t)});
        bool last = false;
        if (t + h >= t_end || t_end - (t + h) < 1e-12 * std::max(1.0, std::abs(t_end))) {
            h = t_end - t;
            last = true;
        }
        if (h < opt.h_min) {
            traj.status = RunStatus::StepUnderflow;
            traj.events.push_back({t, "StepUnderflow", "step size fell below " + std::to_string(opt.h_min)});
            break;
        }
        Dopri5Step st;
        double err = 0.0;
        try {
            st = dopri5_step([&](double s, const State2& v) { return sys.rhs(s, v); }, t, y, k1, h);
            const bool finite = std::isfinite(st.y1[0]) && std::isfinite(st.y1[1]) &&
                                std::isfinite(st.k7[0]) && std::isfinite(st.k7[1]);
            err = finite ? error_norm(st.err, y, st.y1, opt.rtol, opt.atol)
                         : std::numeric_limits<double>::infinity();
            if (!std::isfinite(err)) throw StepRejected{};
        } catch (const FrontierExceeded&) {
            ++traj.monitors.rejected;
            h *= 0.5;
            continue;
        } catch (const StepRejected&) {
            ++traj.monitors.rejected;
            h *= 0.25;
            if (h < opt.h_min) {
                traj.status = RunStatus::NonFinite;
                traj.events.push_back({t, "NonFinite", "non-finite state; step size underflow"});
            }
            continue;
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::DenominatorBreach) {
                ++traj.monitors.rejected;
                h *= 0.5;
                if (h < opt.h_min) {
                    traj.status = RunStatus::B2Violation;
                    traj.events.push_back({t, "B2Violation", e.what()});
                }
                continue;
            }
            if (e.kind() == ErrorKind::NoBracket || e.kind() == ErrorKind::HistoryTooShort) {
                traj.status = RunStatus::NoBracket;
                traj.events.push_back({t, std::string(to_string(e.kind())), e.what()});
                break;
            }
            throw;
        }
        if (err > 1.0) {
            ++traj.monitors.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }

        const double t_old = t;
        const double delay_new = sys.last_delay;
        hist.append(st.dense);
        t = last ? t_end : t + h;
        y = st.y1;
        k1 = st.k7;
        ++traj.monitors.accepted;
        sys.note_accept_time(t_old, t);

        if (opt.sample_dt > 0.0) {
            while (next_sample <= t + 1e-12 * std::max(1.0, std::abs(t))) {
                const double ts = std::min(next_sample, t);
                const State2 v = ts == t ? y : st.dense(ts);
                traj.times.push_back(ts);
                traj.states.push_back(v);
                traj.delay.push_back(ts == t ? delay_new : sys.delay_at(ts, v));
                next_sample += opt.sample_dt;
            }
        } else {
            traj.times.push_back(t);
            traj.states.push_back(y);
            traj.delay.push_back(delay_new);
        }
        sys.last_delay = delay_new;
        sys.after_accept(t, y, k1, traj);

        if (std::abs(y[0]) > opt.divergence_bound || std::abs(y[1]) > opt.divergence_bound) {
            traj.status = RunStatus::Diverged;
            traj.events.push_back({t, "Diverged", "state exceeded the divergence bound"});
        }
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= fac;
    }
    if (opt.sample_dt > 0.0 && traj.times.back() < t) {
        traj.times.push_back(t);
        traj.states.push_back(y);
        traj.delay.push_back(sys.last_delay);
    }
}

inline double slope_limit(const ModelParams& params) {
    double lim = std::numeric_limits<double>::infinity();
    if (params.c > 0.0) lim = 1.0 / params.c;
    if (params.nonlinearity.f_upper) lim = std::min(lim, *params.nonlinearity.f_upper);
    return lim;
}

inline void check_state(double t, const State2& y, double delay, double xdot, const ModelParams& params,
                        Trajectory& traj) {
    auto& m = traj.monitors;
    m.min_x = std::min(m.min_x, y[0]);
    m.min_y = std::min(m.min_y, y[1]);
    m.min_tau = std::min(m.min_tau, delay);
    m.max_tau = std::max(m.max_tau, delay);
    m.max_xdot = std::max(m.max_xdot, xdot);
    if (m.positive && !(y[0] > 0.0 && y[1] > 0.0 && delay > 0.0)) {
        m.positive = false;
        traj.events.push_back({t, "Positivity", "x, y or the delay left the positive half-line"});
    }
    if (m.slope_ok && !(xdot < slope_limit(params))) {
        m.slope_ok = false;
        traj.events.push_back({t, "SlopeLimit", "x' reached min(1/c, sup f)"});
    }
}

class OriginalSystem {
public:
    OriginalSystem(const ModelParams& p, DenseHistory& h, double tau0, int generations)
        : last_delay(tau0), params_(p), hist_(h), seed_(tau0) {
        pending_.push_back({h.initial_time(), 0});
        generations_ = generations;
    }

    double last_delay;

    double delay_scale() const { return seed_; }

    State2 rhs(double t, const State2& y) {
        opt_.dynamic_range = std::max(range_, std::abs(y[0]));
        const DelaySolution ds = solve_delay(t, y[0], hist_, params_, seed_, opt_);
        last_delay = ds.tau;
        last_residual_ = ds.residual;
        slope_bound_ok_ = ds.slope_bound_ok;
        const State2 back = hist_(t - ds.tau);
        return rhs_original(y, back, ds.tau, params_).derivative;
    }

    double delay_at(double t, const State2& y) {
        return solve_delay(t, y[0], hist_, params_, last_delay, opt_).tau;
    }

    /// Lands steps on predicted images t = bp + tau of derivative breakpoints,
    /// and keeps the delayed argument of every stage behind the frontier.
    double step_cap(double t) const {
        double cap = 0.95 * last_delay;
        for (const auto& [bp, gen] : pending_) {
            const double target = bp + last_delay;
            if (target > t + 1e-9 * std::max(1.0, std::abs(t))) cap = std::min(cap, target - t);
        }
        return cap;
    }

    void note_accept_time(double, double t_new) {
        for (auto it = pending_.begin(); it != pending_.end();) {
            if (t_new - last_delay_after(t_new) >= it->first - 1e-9 * std::max(1.0, std::abs(t_new))) {
                if (it->second + 1 < generations_) images_.push_back({t_new, it->second + 1});
                it = pending_.erase(it);
            } else {
                ++it;
            }
        }
        for (const auto& im : images_) pending_.push_back(im);
        images_.clear();
    }

    void after_accept(double t, const State2& y, const State2& k, Trajectory& traj) {
        seed_ = last_delay;
        range_ = std::max(range_, std::abs(y[0]));
        hist_.note_slope(k[0]);
        auto& m = traj.monitors;
        m.max_threshold_residual = std::max(m.max_threshold_residual, std::abs(last_residual_));
        if (!slope_bound_ok_ && !m.slope_bound_warned) {
            m.slope_bound_warned = true;
            traj.events.push_back({t, "SlopeBound", "c sup|x'| >= 1: the delay may not be unique"});
        }
        check_state(t, y, last_delay, k[0], params_, traj);
        if (params_.c > 0.0 && !(k[0] < 1.0 / params_.c)) {
            traj.status = RunStatus::B2Violation;
            traj.events.push_back({t, "B2Violation", "x' >= 1/c"});
        }
    }

private:
    // The delay of the last accepted evaluation is the one at t_new (the
    // final stage of a step is evaluated there).
    double last_delay_after(double) const { return last_delay; }

    const ModelParams& params_;
    DenseHistory& hist_;
    DelaySolveOptions opt_;
    double seed_;
    double range_ = 0.0;
    double last_residual_ = 0.0;
    bool slope_bound_ok_ = true;
    int generations_ = 3;
    std::deque<std::pair<double, int>> pending_;
    std::vector<std::pair<double, int>> images_;
};

class TransformedSystem {
public:
    TransformedSystem(const ModelParams& p, DenseHistory& h, int generations)
        : params_(p), hist_(h), generations_(generations) {}

    double last_delay = 0.0;

    double delay_scale() const { return 1.0; }

    State2 rhs(double eta, const State2& y) {
        const State2 back = hist_(eta - 1.0);
        const TransformedRhs out = rhs_transformed(y, back, params_);
        last_delay = out.k;
        last_denominator_ = out.denominator;
        return out.derivative;
    }

    double delay_at(double eta, const State2& y) const {
        return params_.eps + params_.c * (y[0] - hist_(eta - 1.0)[0]);
    }

    /// Unit delay: steps never exceed 1 and land on the integer breakpoints.
    double step_cap(double eta) const {
        double cap = 1.0;
        const double start = hist_.initial_time();
        for (int g = 1; g <= generations_; ++g) {
            const double target = start + g;
            if (target > eta + 1e-12) {
                cap = std::min(cap, target - eta);
                break;
            }
        }
        return cap;
    }

    void note_accept_time(double, double) {}

    void after_accept(double eta, const State2& y, const State2& k, Trajectory& traj) {
        // x' in original time equals (dr/deta) D / eps.
        const double xdot = k[0] * last_denominator_ / params_.eps;
        hist_.note_slope(xdot);
        check_state(eta, y, last_delay, xdot, params_, traj);
    }

private:
    const ModelParams& params_;
    DenseHistory& hist_;
    double last_denominator_ = 1.0;
    int generations_ = 3;
};

}  // namespace detail

/// Integrates the state-dependent-delay system on [0, t_end] from initial
/// data on [-alpha0, 0] and initial delay tau0.
inline Trajectory integrate_sdd(const InitialData& init, double tau0, const ModelParams& params,
                                double t_end, const IntegrationOptions& opt = {}) {
    params.validate();
    require(t_end > 0.0, ErrorKind::InvalidArgument, "t_end must be positive");
    const CompatibilityReport rep = check_compatibility(init, tau0, params, opt.compat_tolerance);
    Trajectory traj;
    traj.system = SystemKind::Original;
    if (!rep.passed) {
        if (!opt.force) {
            throw Error(ErrorKind::Incompatible,
                        "initial data violate the compatibility conditions (scaled residuals " +
                            std::to_string(rep.scaled[0]) + ", " + std::to_string(rep.scaled[1]) + ", " +
                            std::to_string(rep.scaled[2]) + ")");
        }
        traj.events.push_back({0.0, "Incompatible", "compatibility check failed; integration forced"});
    }
    DenseHistory hist(init);
    detail::OriginalSystem sys(params, hist, tau0, opt.breakpoint_generations);
    detail::run_dopri5(sys, hist, init.value(0.0), t_end, opt, traj);
    return traj;
}

/// Integrates the unit-delay system in eta on [0, eta_end] from initial data on [-1, 0].
inline Trajectory integrate_transformed(const InitialData& init, const ModelParams& params, double eta_end,
                                        const IntegrationOptions& opt = {}) {
    params.validate();
    require(eta_end > 0.0, ErrorKind::InvalidArgument, "eta_end must be positive");
    require(init.alpha0 >= 1.0, ErrorKind::HistoryTooShort, "the unit-delay system needs history on [-1, 0]");
    const State2 y0 = init.value(0.0);
    const State2 back = init.value(-1.0);
    const double denom = 1.0 - params.c * (-params.mu_m * y0[0] + params.nonlinearity.f(back[1]).value);
    if (!(denom > 0.0)) {
        throw Error(ErrorKind::DenominatorBreach, "initial data violate 1 - c(-mu_m r + f(xi_1)) > 0");
    }
    Trajectory traj;
    traj.system = SystemKind::Transformed;
    DenseHistory hist(init);
    detail::TransformedSystem sys(params, hist, opt.breakpoint_generations);
    detail::run_dopri5(sys, hist, y0, eta_end, opt, traj);
    return traj;
}

// ---------------------------------------------------------------------------
// Initial data

/// Initial function equal to the constant `base` except on the last stretch
/// [-sigma, 0], where a C^1 bump gives it the slope `slope` at 0.
inline InitialData bump_initial_data(State2 base, State2 slope, double sigma, double alpha0) {
    require(sigma > 0.0 && sigma <= alpha0, ErrorKind::InvalidArgument, "bump width must lie in (0, alpha0]");
    // s * slope * rho(-s / sigma), rho(u) = 1 - 3u^2 + 2u^3 on [0, 1].
    auto value = [=](double s) {
        if (s <= -sigma) return base;
        const double u = -s / sigma;
        const double rho = 1.0 - 3.0 * u * u + 2.0 * u * u * u;
        return State2{base[0] + s * slope[0] * rho, base[1] + s * slope[1] * rho};
    };
    auto derivative = [=](double s) {
        if (s <= -sigma) return State2{0.0, 0.0};
        const double u = -s / sigma;
        const double rho = 1.0 - 3.0 * u * u + 2.0 * u * u * u;
        const double drho_ds = (-6.0 * u + 6.0 * u * u) * (-1.0 / sigma);
        return State2{slope[0] * (rho + s * drho_ds), slope[1] * (rho + s * drho_ds)};
    };
    return {value, derivative, alpha0};
}

struct InitialCondition {
    InitialData data;
    double tau0 = 0.0;  ///< original system; the unit-delay system needs none
};

/// Width of the bump in bump_initial_data that keeps its overshoot
/// (max of |s slope rho| is 0.26 sigma |slope|) below `budget` times the state
/// magnitude, capped at `sigma_max`.
inline double bump_width(State2 base, State2 slope, double sigma_max, double budget) {
    constexpr double kPeak = 0.26;  // max of u (1 - 3u^2 + 2u^3) on [0, 1] is 0.25997
    double sigma = sigma_max;
    for (int i = 0; i < 2; ++i) {
        const double allowed = budget * std::max(1.0, std::abs(base[i]));
        if (kPeak * sigma * std::abs(slope[i]) > allowed) sigma = allowed / (kPeak * std::abs(slope[i]));
    }
    return sigma;
}

/// Equilibrium shifted by `offset`, made compatible at tau0 = eps: the
/// function is constant except on a short final stretch where it bends to the
/// slope the equations demand at t = 0. The stretch is narrowed until the bend
/// moves the state by at most `budget` relative.
inline InitialCondition perturbed_initial_data(const ModelParams& params, const Equilibrium& eq, State2 offset,
                                               SystemKind system, double budget = 1e-3) {
    const State2 base{eq.r_star + offset[0], eq.xi_star + offset[1]};
    InitialCondition ic;
    ic.tau0 = params.eps;
    if (system == SystemKind::Original) {
        const State2 slope = rhs_original(base, base, params.eps, params).derivative;
        const double sigma = bump_width(base, slope, std::min(0.5 * params.eps, 1.0), budget);
        ic.data = bump_initial_data(base, slope, sigma, 3.0 * params.eps);
    } else {
        const State2 slope = rhs_transformed(base, base, params).derivative;
        ic.data = bump_initial_data(base, slope, bump_width(base, slope, 0.5, budget), 1.0);
    }
    return ic;
}

}  // namespace sddhopf
