#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "sddhopf/error.hpp"
#include "sddhopf/simulate.hpp"

namespace sddhopf {

struct OscillationOptions {
    /// Samples before this time are ignored (transient cutoff).
    double t_min = -std::numeric_limits<double>::infinity();
    double t_max = std::numeric_limits<double>::infinity();
    /// Level the signal oscillates about; the window mean when absent.
    std::optional<double> reference;
    /// Full cycles averaged for the amplitude.
    int cycles = 2;
};

struct OscillationSummary {
    double amplitude = 0.0;   ///< half peak-to-trough over the last cycles
    double period = std::numeric_limits<double>::quiet_NaN();
    double decay_rate = 0.0;  ///< > 0 decaying, < 0 growing, per unit of the time axis
    double reference = 0.0;
    int extrema = 0;
};

namespace detail {

struct Extremum {
    double t;
    double value;
    bool is_max;
};

/// Local extrema of sampled data, refined by a parabola through three points.
inline std::vector<Extremum> find_extrema(const std::vector<double>& t, const std::vector<double>& v) {
    std::vector<Extremum> out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const bool is_max = v[i] > v[i - 1] && v[i] >= v[i + 1];
        const bool is_min = v[i] < v[i - 1] && v[i] <= v[i + 1];
        if (!is_max && !is_min) continue;
        const double t0 = t[i - 1], t1 = t[i], t2 = t[i + 1];
        const double y0 = v[i - 1], y1 = v[i], y2 = v[i + 1];
        // Vertex of the interpolating parabola (non-uniform spacing).
        const double d01 = (y1 - y0) / (t1 - t0), d12 = (y2 - y1) / (t2 - t1);
        const double a = (d12 - d01) / (t2 - t0);
        Extremum e{t1, y1, is_max};
        if (a != 0.0) {
            const double b = d01 - a * (t0 + t1);
            const double tv = -b / (2.0 * a);
            if (tv > t0 && tv < t2) {
                e.t = tv;
                e.value = y1 + d01 * (tv - t1) + a * (tv - t0) * (tv - t1);
            }
        }
        out.push_back(e);
    }
    return out;
}

}  // namespace detail

/// Amplitude, period and decay rate of one sampled signal.
inline OscillationSummary measure_oscillation(const std::vector<double>& t, const std::vector<double>& v,
                                              const OscillationOptions& opt = {}) {
    require(t.size() == v.size(), ErrorKind::InvalidArgument, "time and value arrays differ in length");
    std::vector<double> tw, vw;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= opt.t_min && t[i] <= opt.t_max) {
            tw.push_back(t[i]);
            vw.push_back(v[i]);
        }
    }
    OscillationSummary out;
    if (tw.empty()) throw Error(ErrorKind::InsufficientCycles, "no samples in the analysis window");
    out.reference = opt.reference ? *opt.reference
                                  : std::accumulate(vw.begin(), vw.end(), 0.0) / static_cast<double>(vw.size());

    auto ext = detail::find_extrema(tw, vw);
    out.extrema = static_cast<int>(ext.size());
    if (ext.size() < 3) {
        throw Error(ErrorKind::InsufficientCycles,
                    "found " + std::to_string(ext.size()) + " extrema; at least 3 are needed");
    }

    // Amplitude: half the distance between successive extrema, averaged over the
    // last `cycles` full cycles.
    const std::size_t pairs = std::min<std::size_t>(ext.size() - 1, 2 * static_cast<std::size_t>(std::max(1, opt.cycles)));
    double amp = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
        const auto& a = ext[ext.size() - 1 - k];
        const auto& b = ext[ext.size() - 2 - k];
        amp += 0.5 * std::abs(a.value - b.value);
    }
    out.amplitude = amp / static_cast<double>(pairs);

    // Period from upward crossings of the reference.
    std::vector<double> ups;
    for (std::size_t i = 1; i < vw.size(); ++i) {
        const double a = vw[i - 1] - out.reference, b = vw[i] - out.reference;
        if (a < 0.0 && b >= 0.0) ups.push_back(tw[i - 1] + (tw[i] - tw[i - 1]) * (-a) / (b - a));
    }
    if (ups.size() >= 2) out.period = (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);

    // Decay rate: least-squares slope of ln|extremum - reference| against time.
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int n = 0;
    for (const auto& e : ext) {
        const double dev = std::abs(e.value - out.reference);
        if (!(dev > 0.0)) continue;
        const double ly = std::log(dev);
        st += e.t;
        sy += ly;
        stt += e.t * e.t;
        sty += e.t * ly;
        ++n;
    }
    if (n >= 2) {
        const double den = n * stt - st * st;
        if (den != 0.0) out.decay_rate = -(n * sty - st * sy) / den;
    }
    return out;
}

/// Component 0 (x or r) or 1 (y or xi) of a trajectory.
inline OscillationSummary measure_oscillation(const Trajectory& traj, int component,
                                              const OscillationOptions& opt = {}) {
    require(component == 0 || component == 1, ErrorKind::InvalidArgument, "component must be 0 or 1");
    return measure_oscillation(traj.times, traj.component(component), opt);
}

}  // namespace sddhopf
