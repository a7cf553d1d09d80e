#pragma once

// Model parameters, feedback nonlinearities and the right-hand sides of the
// original state-dependent-delay system, its constant-delay transform and the
// c = 0 reduction.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sddhopf/error.hpp"

namespace sddhopf {

/// Value of a scalar map together with its first three derivatives.
struct Jet3 {
    double value = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

using ScalarMap = std::function<Jet3(double)>;

/// Feedback maps f (onto the x-equation) and g (onto the y-equation).
struct NonlinearitySpec {
    ScalarMap f;
    ScalarMap g;
    /// Strict upper bound of f on the domain of interest, if known. Used by the
    /// x' < sup f monitor (for Hill repression this is the basal rate).
    std::optional<double> f_upper;
    std::string name = "custom";
};

/// Hill repression alpha / (1 + (y / half)^exponent).
struct HillRepressor {
    double alpha = 1.0;
    double half = 1.0;
    double exponent = 1.0;

    void validate() const {
        require(alpha > 0.0 && half > 0.0 && exponent > 0.0, ErrorKind::InvalidArgument,
                "Hill repressor needs alpha > 0, half > 0, exponent > 0");
    }

    double value(double y) const { return alpha / (1.0 + std::pow(y / half, exponent)); }

    // Closed-form derivatives of alpha * u^{-1} with u = 1 + q^h, q = y / half.
    Jet3 jet(double y) const {
        const double q = y / half;
        const double h = exponent;
        const double u = 1.0 + std::pow(q, h);
        double u1 = 0.0, u2 = 0.0, u3 = 0.0;
        if (q != 0.0) {
            const double qh = std::pow(q, h);
            u1 = h * qh / q / half;
            u2 = h * (h - 1.0) * qh / (q * q) / (half * half);
            u3 = h * (h - 1.0) * (h - 2.0) * qh / (q * q * q) / (half * half * half);
        } else {
            // q^{h-k} at q = 0 is 1 when h == k, 0 when h > k and unbounded otherwise.
            auto at_zero = [h](double k, double factorial, double scale) {
                if (h == k) return factorial / scale;
                return h > k ? 0.0 : std::numeric_limits<double>::infinity();
            };
            u1 = at_zero(1.0, 1.0, half);
            u2 = at_zero(2.0, 2.0, half * half);
            u3 = at_zero(3.0, 6.0, half * half * half);
        }
        const double iu = 1.0 / u;
        Jet3 j;
        j.value = alpha * iu;
        j.d1 = -alpha * u1 * iu * iu;
        j.d2 = alpha * (2.0 * u1 * u1 * iu * iu * iu - u2 * iu * iu);
        j.d3 = alpha * (-6.0 * u1 * u1 * u1 * iu * iu * iu * iu + 6.0 * u1 * u2 * iu * iu * iu -
                        u3 * iu * iu);
        return j;
    }
};

/// Polynomial sum_k coeffs[k] * y^k with exact derivatives.
inline ScalarMap polynomial_map(std::vector<double> coeffs) {
    return [coeffs = std::move(coeffs)](double y) {
        Jet3 j;
        // Horner on value and derivatives simultaneously.
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
            j.d3 = j.d3 * y + 3.0 * j.d2;
            j.d2 = j.d2 * y + 2.0 * j.d1;
            j.d1 = j.d1 * y + j.value;
            j.value = j.value * y + *it;
        }
        return j;
    };
}

inline ScalarMap linear_map(double slope) { return polynomial_map({0.0, slope}); }
inline ScalarMap zero_map() { return polynomial_map({}); }

/// Hes1 feedback: f is Hill repression of transcription, g(x) = alpha_p * x.
inline NonlinearitySpec hes1_nonlinearity(const HillRepressor& hill, double alpha_p) {
    hill.validate();
    require(alpha_p > 0.0, ErrorKind::InvalidArgument, "alpha_p must be positive");
    NonlinearitySpec spec;
    spec.f = [hill](double y) { return hill.jet(y); };
    spec.g = linear_map(alpha_p);
    spec.f_upper = hill.alpha;
    spec.name = "hes1";
    return spec;
}

inline NonlinearitySpec polynomial_nonlinearity(std::vector<double> f_coeffs,
                                                std::vector<double> g_coeffs) {
    NonlinearitySpec spec;
    spec.f = polynomial_map(std::move(f_coeffs));
    spec.g = polynomial_map(std::move(g_coeffs));
    spec.name = "polynomial";
    return spec;
}

/// Degradation rates of the two species.
struct Rates {
    double mu_m = 0.0;
    double mu_p = 0.0;
};

struct ModelParams {
    double mu_m = 0.0;
    double mu_p = 0.0;
    /// State-dependence coefficient of the delay; 0 gives the constant-delay model.
    double c = 0.0;
    /// Basal delay.
    double eps = 0.0;
    NonlinearitySpec nonlinearity;

    Rates rates() const { return {mu_m, mu_p}; }

    void validate() const {
        require(std::isfinite(mu_m) && mu_m > 0.0, ErrorKind::InvalidArgument, "mu_m must be > 0");
        require(std::isfinite(mu_p) && mu_p > 0.0, ErrorKind::InvalidArgument, "mu_p must be > 0");
        require(std::isfinite(eps) && eps > 0.0, ErrorKind::InvalidArgument, "eps must be > 0");
        require(std::isfinite(c) && c >= 0.0, ErrorKind::InvalidArgument, "c must be >= 0");
        require(static_cast<bool>(nonlinearity.f) && static_cast<bool>(nonlinearity.g),
                ErrorKind::InvalidArgument, "nonlinearity maps are not set");
    }
};

/// The standard Hes1 parameter set used throughout the reproduction recipes.
inline ModelParams hes1_params(double c = 0.01, double eps = 6.0) {
    ModelParams p;
    p.mu_m = 0.03;
    p.mu_p = 0.04;
    p.c = c;
    p.eps = eps;
    p.nonlinearity = hes1_nonlinearity(HillRepressor{35.0, 1200.0, 5.0}, 10.0);
    return p;
}

using State2 = std::array<double, 2>;

struct OriginalRhs {
    State2 derivative;
    /// tau - eps - c (x - x_tau); zero on the delay constraint.
    double delay_residual = 0.0;
};

/// Right-hand side of x' = -mu_m x + f(y_tau), y' = -mu_p y + g(x_tau) and the
/// residual of tau = eps + c (x - x_tau).
inline OriginalRhs rhs_original(const State2& now, const State2& delayed, double tau,
                                const ModelParams& params) {
    OriginalRhs out;
    out.derivative[0] = -params.mu_m * now[0] + params.nonlinearity.f(delayed[1]).value;
    out.derivative[1] = -params.mu_p * now[1] + params.nonlinearity.g(delayed[0]).value;
    out.delay_residual = tau - params.eps - params.c * (now[0] - delayed[0]);
    return out;
}

struct TransformedRhs {
    State2 derivative;
    /// Delay k(eta) = eps + c (r - r(eta - 1)) recovered alongside.
    double k = 0.0;
    /// Shared denominator 1 - c (-mu_m r + f(xi_1)).
    double denominator = 1.0;
};

/// Right-hand side of the unit-delay system in the rescaled time eta.
/// Throws DenominatorBreach when 1 - c(-mu_m r + f(xi_1)) <= 0, i.e. when
/// x' >= 1/c along the original solution.
inline TransformedRhs rhs_transformed(const State2& now, const State2& delayed,
                                      const ModelParams& params) {
    const double fx = -params.mu_m * now[0] + params.nonlinearity.f(delayed[1]).value;
    const double gy = -params.mu_p * now[1] + params.nonlinearity.g(delayed[0]).value;
    TransformedRhs out;
    out.denominator = 1.0 - params.c * fx;
    if (!(out.denominator > 0.0)) {
        throw Error(ErrorKind::DenominatorBreach,
                    "1 - c(-mu_m r + f(xi(eta-1))) = " + std::to_string(out.denominator) +
                        " <= 0; the slope bound x' < 1/c is violated");
    }
    out.derivative[0] = params.eps * fx / out.denominator;
    out.derivative[1] = params.eps * gy / out.denominator;
    out.k = params.eps + params.c * (now[0] - delayed[0]);
    return out;
}

/// The c = 0 system x' = -mu_m x + f(y(t - eps)), y' = -mu_p y + g(x(t - eps)).
inline State2 rhs_constant_delay(const State2& now, const State2& delayed,
                                 const ModelParams& params) {
    return {-params.mu_m * now[0] + params.nonlinearity.f(delayed[1]).value,
            -params.mu_p * now[1] + params.nonlinearity.g(delayed[0]).value};
}

namespace detail {

// Ridders' polynomial extrapolation of a central-difference estimator whose
// error expands in even powers of the step. Returns {estimate, error estimate}.
template <class Estimator>
std::pair<double, double> ridders(Estimator&& estimate, double h0) {
    constexpr int kLevels = 10;
    constexpr double kShrink = 1.4;
    constexpr double kShrink2 = kShrink * kShrink;
    double table[kLevels][kLevels];
    double best = estimate(h0);
    double err = std::numeric_limits<double>::max();
    double h = h0;
    table[0][0] = best;
    for (int i = 1; i < kLevels; ++i) {
        h /= kShrink;
        table[0][i] = estimate(h);
        double fac = kShrink2;
        for (int j = 1; j <= i; ++j) {
            table[j][i] = (table[j - 1][i] * fac - table[j - 1][i - 1]) / (fac - 1.0);
            fac *= kShrink2;
            const double e = std::max(std::abs(table[j][i] - table[j - 1][i]),
                                      std::abs(table[j][i] - table[j - 1][i - 1]));
            if (e <= err) {
                err = e;
                best = table[j][i];
            }
        }
        if (std::abs(table[i][i] - table[i - 1][i - 1]) >= 2.0 * err) break;
    }
    return {best, err};
}

// Ridders from several starting steps; the run with the smallest error estimate wins.
template <class Estimator>
double ridders_multi(Estimator&& estimate, double step) {
    std::pair<double, double> best{0.0, std::numeric_limits<double>::infinity()};
    for (double scale : {0.25, 1.0, 4.0}) {
        const auto r = ridders(estimate, scale * step);
        if (r.second < best.second) best = r;
    }
    return best.first;
}

}  // namespace detail

/// Derivatives of a scalar map estimated from its value map alone.
inline std::array<double, 3> finite_difference_derivatives(const ScalarMap& map, double x,
                                                           double step) {
    auto v = [&](double y) { return map(y).value; };
    const double fx = v(x);
    std::array<double, 3> out{};
    out[0] = detail::ridders_multi([&](double h) { return (v(x + h) - v(x - h)) / (2.0 * h); }, step);
    out[1] = detail::ridders_multi([&](double h) { return (v(x + h) - 2.0 * fx + v(x - h)) / (h * h); },
                                   step);
    out[2] = detail::ridders_multi(
        [&](double h) {
            return (v(x + 2.0 * h) - 2.0 * v(x + h) + 2.0 * v(x - h) - v(x - 2.0 * h)) /
                   (2.0 * h * h * h);
        },
        step);
    return out;
}

struct DerivativeCheck {
    bool passed = true;
    double worst_relative_error = 0.0;
    double worst_point = 0.0;
    int worst_order = 0;
};

/// Compares the derivative callbacks of `map` against finite differences of
/// its value at each sample point, starting from the step rel_step max(1, |x|). Errors are measured relative to
/// max(|analytic|, abs_floor, |value| / max(1, |x|)^k), the last term being the
/// natural size of a k-th derivative, so vanishing derivatives are not judged
/// against roundoff alone.
inline DerivativeCheck check_derivatives(const ScalarMap& map, const std::vector<double>& points,
                                         double rel_step = 0.02, double rel_tol = 1e-6,
                                         double abs_floor = 1e-12) {
    DerivativeCheck report;
    for (double x : points) {
        const Jet3 j = map(x);
        const auto fd = finite_difference_derivatives(map, x, rel_step * std::max(1.0, std::abs(x)));
        const double analytic[3] = {j.d1, j.d2, j.d3};
        for (int k = 0; k < 3; ++k) {
            const double natural = std::abs(j.value) / std::pow(std::max(1.0, std::abs(x)), k + 1);
            const double scale = std::max({std::abs(analytic[k]), abs_floor, natural});
            const double rel = std::abs(fd[k] - analytic[k]) / scale;
            if (!(rel <= report.worst_relative_error)) {
                report.worst_relative_error = rel;
                report.worst_point = x;
                report.worst_order = k + 1;
            }
        }
    }
    report.passed = report.worst_relative_error <= rel_tol;
    return report;
}

}  // namespace sddhopf
