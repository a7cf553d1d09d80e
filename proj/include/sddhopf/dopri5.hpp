#pragma once

// Dormand-Prince 5(4) step with the usual quartic continuous extension.

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <utility>

#include "sddhopf/history.hpp"
#include "sddhopf/model.hpp"

namespace sddhopf {

struct Dopri5Step {
    State2 y1{};
    State2 k7{};   ///< f(t + h, y1); the first stage of the next step
    State2 err{};  ///< embedded error estimate
    DenseSegment dense;
};

namespace detail {

inline State2 combo(const State2& y, double h, std::initializer_list<std::pair<double, const State2*>> terms) {
    State2 out = y;
    for (const auto& [w, k] : terms) {
        if (w == 0.0) continue;
        out[0] += h * w * (*k)[0];
        out[1] += h * w * (*k)[1];
    }
    return out;
}

}  // namespace detail

/// One step from (t, y) with known k1 = f(t, y). `f(t, y)` may throw
/// FrontierExceeded, which propagates to the caller.
template <class F>
Dopri5Step dopri5_step(F&& f, double t, const State2& y, const State2& k1, double h) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    using detail::combo;
    const State2 k2 = f(t + c2 * h, combo(y, h, {{a21, &k1}}));
    const State2 k3 = f(t + c3 * h, combo(y, h, {{a31, &k1}, {a32, &k2}}));
    const State2 k4 = f(t + c4 * h, combo(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State2 k5 = f(t + c5 * h, combo(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State2 k6 =
        f(t + h, combo(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    Dopri5Step s;
    s.y1 = combo(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    s.k7 = f(t + h, s.y1);
    for (int i = 0; i < 2; ++i) {
        s.err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * s.k7[i]);
        const double dy = s.y1[i] - y[i];
        const double bspl = h * k1[i] - dy;
        s.dense.rcont[0][i] = y[i];
        s.dense.rcont[1][i] = dy;
        s.dense.rcont[2][i] = bspl;
        s.dense.rcont[3][i] = dy - h * s.k7[i] - bspl;
        s.dense.rcont[4][i] =
            h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * s.k7[i]);
    }
    s.dense.t0 = t;
    s.dense.h = h;
    return s;
}

/// Scaled RMS error norm with mixed absolute/relative weights.
inline double error_norm(const State2& err, const State2& y0, const State2& y1, double rtol, double atol) {
    double sum = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = err[i] / sc;
        sum += r * r;
    }
    return std::sqrt(sum / 2.0);
}

}  // namespace sddhopf
