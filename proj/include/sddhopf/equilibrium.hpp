#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sddhopf/error.hpp"
#include "sddhopf/model.hpp"

namespace sddhopf {

/// Steady state (r*, xi*) with the feedback derivatives cached at it.
struct Equilibrium {
    double r_star = 0.0;
    double xi_star = 0.0;
    double f1 = 0.0, f2 = 0.0, f3 = 0.0;  ///< f', f'', f''' at xi*
    double g1 = 0.0, g2 = 0.0, g3 = 0.0;  ///< g', g'', g''' at r*
    double residual_x = 0.0;             ///< -mu_m r* + f(xi*)
    double residual_y = 0.0;             ///< -mu_p xi* + g(r*)

    /// Coupling product f'(xi*) g'(r*).
    double coupling() const { return f1 * g1; }
};

struct EquilibriumOptions {
    /// Require r* > 0 and xi* > 0.
    bool positive_orthant = false;
    /// Explicit bracket for r*. When absent it is grown outward from the seed
    /// (for a positive-orthant Hill model the default is (0, sup f / mu_m]).
    std::optional<std::pair<double, double>> bracket;
    int max_iterations = 400;
};

namespace detail {

inline double reduced_equation(const ModelParams& p, double r) {
    const double xi = p.nonlinearity.g(r).value / p.mu_p;
    return -p.mu_m * r + p.nonlinearity.f(xi).value;
}

inline double reduced_slope(const ModelParams& p, double r) {
    const Jet3 g = p.nonlinearity.g(r);
    const double xi = g.value / p.mu_p;
    return -p.mu_m + p.nonlinearity.f(xi).d1 * g.d1 / p.mu_p;
}

inline bool residuals_ok(const Equilibrium& e, const ModelParams& p) {
    return std::abs(e.residual_x) <= 1e-10 * std::max(1.0, std::abs(p.mu_m * e.r_star)) &&
           std::abs(e.residual_y) <= 1e-10 * std::max(1.0, std::abs(p.mu_p * e.xi_star));
}

}  // namespace detail

/// Fills derivative caches and residuals for a given (r*, xi*).
inline Equilibrium make_equilibrium(const ModelParams& params, double r_star, double xi_star) {
    Equilibrium e;
    e.r_star = r_star;
    e.xi_star = xi_star;
    const Jet3 f = params.nonlinearity.f(xi_star);
    const Jet3 g = params.nonlinearity.g(r_star);
    e.f1 = f.d1;
    e.f2 = f.d2;
    e.f3 = f.d3;
    e.g1 = g.d1;
    e.g2 = g.d2;
    e.g3 = g.d3;
    e.residual_x = -params.mu_m * r_star + f.value;
    e.residual_y = -params.mu_p * xi_star + g.value;
    return e;
}

/// Solves -mu_m r + f(xi) = 0, -mu_p xi + g(r) = 0 by substituting
/// xi = g(r)/mu_p and bracketing the scalar equation in r; the bracket is
/// bisected and the result polished with Newton steps.
inline Equilibrium find_equilibrium(const ModelParams& params, std::pair<double, double> seed,
                                    const EquilibriumOptions& options = {}) {
    require(params.mu_m > 0.0 && params.mu_p > 0.0, ErrorKind::InvalidArgument,
            "decay rates must be positive");
    require(std::isfinite(seed.first) && std::isfinite(seed.second), ErrorKind::InvalidArgument,
            "equilibrium seed must be finite");

    auto phi = [&](double r) { return detail::reduced_equation(params, r); };

    double lo = 0.0, hi = 0.0;
    double flo = 0.0, fhi = 0.0;
    bool bracketed = false;
    const double f_seed = phi(seed.first);
    if (f_seed == 0.0) {
        lo = hi = seed.first;
        bracketed = true;
    } else if (options.bracket) {
        lo = options.bracket->first;
        hi = options.bracket->second;
        flo = phi(lo);
        fhi = phi(hi);
        bracketed = flo == 0.0 || fhi == 0.0 || (flo < 0.0) != (fhi < 0.0);
        if (!bracketed) {
            throw Error(ErrorKind::NoConvergence, "no sign change of the reduced equation on [" +
                                                      std::to_string(lo) + ", " +
                                                      std::to_string(hi) + "]");
        }
    } else if (options.positive_orthant && params.nonlinearity.f_upper) {
        // x' < sup f - mu_m x bounds r* by sup f / mu_m.
        lo = 0.0;
        hi = *params.nonlinearity.f_upper / params.mu_m;
        flo = phi(lo);
        fhi = phi(hi);
        bracketed = flo == 0.0 || fhi == 0.0 || (flo < 0.0) != (fhi < 0.0);
    }
    if (!bracketed) {
        // Grow a bracket geometrically around the seed.
        const double base = seed.first;
        double width = std::max(1e-3, 1e-2 * std::abs(base));
        for (int i = 0; i < 200 && !bracketed; ++i, width *= 1.6) {
            const double a = options.positive_orthant ? std::max(base - width, 0.0) : base - width;
            const double b = base + width;
            const double fa = phi(a), fb = phi(b);
            if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
            if (fa == 0.0 || fb == 0.0 || (fa < 0.0) != (fb < 0.0)) {
                lo = a;
                hi = b;
                flo = fa;
                fhi = fb;
                bracketed = true;
            }
        }
        if (!bracketed) {
            throw Error(ErrorKind::NoConvergence,
                        "could not bracket a root of the reduced equilibrium equation");
        }
    }

    double r = lo;
    if (lo == hi || flo == 0.0) {
        r = lo;
    } else if (fhi == 0.0) {
        r = hi;
    } else {
        for (int it = 0; it < options.max_iterations && hi - lo > 1e-15 * std::max(1.0, std::abs(hi));
             ++it) {
            const double mid = 0.5 * (lo + hi);
            const double fm = phi(mid);
            if (fm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((fm < 0.0) == (flo < 0.0)) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        r = 0.5 * (lo + hi);
        for (int it = 0; it < 4; ++it) {
            const double s = detail::reduced_slope(params, r);
            if (s == 0.0 || !std::isfinite(s)) break;
            const double next = r - phi(r) / s;
            if (!std::isfinite(next) || std::abs(phi(next)) > std::abs(phi(r))) break;
            r = next;
        }
    }

    const double xi = params.nonlinearity.g(r).value / params.mu_p;
    Equilibrium e = make_equilibrium(params, r, xi);
    if (!detail::residuals_ok(e, params)) {
        throw Error(ErrorKind::NoConvergence,
                    "equilibrium residuals exceed tolerance: " + std::to_string(e.residual_x) +
                        ", " + std::to_string(e.residual_y));
    }
    if (options.positive_orthant && !(e.r_star > 0.0 && e.xi_star > 0.0)) {
        throw Error(ErrorKind::NonPositive, "equilibrium (" + std::to_string(e.r_star) + ", " +
                                                std::to_string(e.xi_star) +
                                                ") is not in the positive orthant");
    }
    return e;
}

/// Roots of the reduced equation located from sign changes on a user grid of r values.
inline std::vector<Equilibrium> enumerate_equilibria(const ModelParams& params,
                                                     const std::vector<double>& r_grid) {
    std::vector<Equilibrium> out;
    for (std::size_t i = 0; i + 1 < r_grid.size(); ++i) {
        const double a = r_grid[i], b = r_grid[i + 1];
        const double fa = detail::reduced_equation(params, a);
        const double fb = detail::reduced_equation(params, b);
        if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
        if (fa == 0.0 && i > 0) continue;  // counted as the right end of the previous cell
        if (fa == 0.0 || (fa < 0.0) != (fb < 0.0)) {
            EquilibriumOptions opts;
            opts.bracket = std::make_pair(a, b);
            out.push_back(find_equilibrium(params, {a, 0.0}, opts));
        }
    }
    return out;
}

}  // namespace sddhopf
