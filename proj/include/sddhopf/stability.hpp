#pragma once

// Linear stability of the equilibrium of the unit-delay system:
//   (lambda + eps mu_m)(lambda + eps mu_p) - eps^2 p e^{-2 lambda} = 0,
// with p = f'(xi*) g'(r*).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "sddhopf/equilibrium.hpp"
#include "sddhopf/error.hpp"
#include "sddhopf/model.hpp"

namespace sddhopf {

using cplx = std::complex<double>;

struct CharParams {
    double mu_m = 0.0;
    double mu_p = 0.0;
    double p = 0.0;  ///< f'(xi*) g'(r*)
    double eps = 0.0;

    void validate() const {
        require(mu_m > 0.0 && mu_p > 0.0 && eps > 0.0, ErrorKind::InvalidArgument,
                "characteristic parameters need mu_m, mu_p, eps > 0");
    }
};

inline cplx char_eval(cplx lambda, const CharParams& cp) {
    return (lambda + cp.eps * cp.mu_m) * (lambda + cp.eps * cp.mu_p) -
           cp.eps * cp.eps * cp.p * std::exp(-2.0 * lambda);
}

/// d/d lambda of the characteristic function.
inline cplx char_dlambda(cplx lambda, const CharParams& cp) {
    return 2.0 * lambda + cp.eps * (cp.mu_m + cp.mu_p) +
           2.0 * cp.eps * cp.eps * cp.p * std::exp(-2.0 * lambda);
}

/// d/d eps of the characteristic function.
inline cplx char_deps(cplx lambda, const CharParams& cp) {
    return cp.mu_m * (lambda + cp.eps * cp.mu_p) + cp.mu_p * (lambda + cp.eps * cp.mu_m) -
           2.0 * cp.eps * cp.p * std::exp(-2.0 * lambda);
}

/// Scaled residual of beta^2 - eps^2 mu_m mu_p - eps (mu_m + mu_p) beta cot 2 beta.
inline double beta_residual(double beta, const CharParams& cp) {
    const double a = beta * beta;
    const double b = cp.eps * cp.eps * cp.mu_m * cp.mu_p;
    const double c = cp.eps * (cp.mu_m + cp.mu_p) * beta / std::tan(2.0 * beta);
    const double scale = std::max({1.0, a, b, std::abs(c)});
    return (a - b - c) / scale;
}

/// The sin(2 beta)-multiplied form, continuous on [0, pi/2]: negative near 0,
/// positive at pi/2.
inline double beta_equation_regular(double beta, const CharParams& cp) {
    return (beta * beta - cp.eps * cp.eps * cp.mu_m * cp.mu_p) * std::sin(2.0 * beta) -
           cp.eps * (cp.mu_m + cp.mu_p) * beta * std::cos(2.0 * beta);
}

/// Unique root beta(eps) in (0, pi/2) of beta^2 - eps^2 mu_m mu_p = eps (mu_m + mu_p) beta cot 2beta.
inline double solve_beta(const CharParams& cp) {
    require(cp.eps > 0.0 && cp.mu_m > 0.0 && cp.mu_p > 0.0, ErrorKind::InvalidArgument,
            "solve_beta needs eps, mu_m, mu_p > 0");
    double lo = 0.0;
    double hi = std::numbers::pi / 2.0;
    if (!(beta_equation_regular(hi, cp) > 0.0)) {
        throw Error(ErrorKind::NoRoot, "no sign change of the beta equation on (0, pi/2)");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (beta_equation_regular(mid, cp) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    double beta = 0.5 * (lo + hi);
    if (!(beta > 0.0 && beta < std::numbers::pi / 2.0)) {
        throw Error(ErrorKind::NoRoot, "beta equation root left (0, pi/2)");
    }
    // Newton polish on the regular form.
    for (int it = 0; it < 3; ++it) {
        const double h = 1e-7 * beta;
        const double d = (beta_equation_regular(beta + h, cp) - beta_equation_regular(beta - h, cp)) /
                         (2.0 * h);
        if (d == 0.0 || !std::isfinite(d)) break;
        const double next = beta - beta_equation_regular(beta, cp) / d;
        if (!(next > 0.0 && next < std::numbers::pi / 2.0)) break;
        if (std::abs(beta_residual(next, cp)) > std::abs(beta_residual(beta, cp))) break;
        beta = next;
    }
    return beta;
}

/// First Hopf point of the characteristic equation.
struct HopfPoint {
    double eps0 = 0.0;
    double omega = 0.0;  ///< beta(eps0) in (0, pi/2), frequency in eta-time
    double l = 0.0;      ///< eps0^2 = l omega^2
    double dalpha_deps = 0.0;
    double mu_m = 0.0;
    double mu_p = 0.0;
    double p = 0.0;

    /// eps_k = eps0 (omega + k pi) / omega, where i(omega + k pi) is a root.
    double eps_k(int k) const {
        return eps0 * (omega + k * std::numbers::pi) / omega;
    }
    double omega_k(int k) const { return omega + k * std::numbers::pi; }

    CharParams char_params(double eps) const { return {mu_m, mu_p, p, eps}; }

    /// Residuals of the two equations that define (eps0, omega).
    std::pair<double, double> defining_residuals() const {
        const double b = omega, e = eps0;
        const double first = b * b - e * e * mu_m * mu_p - e * (mu_m + mu_p) * b / std::tan(2.0 * b);
        const double second = (mu_m + mu_p) * b + e * p * std::sin(2.0 * b);
        const double s1 = std::max({1.0, b * b, e * e * mu_m * mu_p});
        const double s2 = std::max(1.0, (mu_m + mu_p) * b);
        return {first / s1, second / s2};
    }
};

/// dalpha/deps of the critical root pair at the Hopf point.
inline double transversality(const HopfPoint& hp, double mu_m, double mu_p) {
    const double b = hp.omega, e = hp.eps0;
    const double num = (2.0 * b * b / e) * (e * e * (mu_m * mu_m + mu_p * mu_p) + 2.0 * b * b);
    const double d1 = e * (mu_m + mu_p) + 2.0 * e * e * mu_m * mu_p - 2.0 * b * b;
    const double d2 = 2.0 * b + 2.0 * b * e * (mu_m + mu_p);
    return num / (d1 * d1 + d2 * d2);
}

/// Closed-form Hopf point from eliminating the trigonometric terms.
/// Requires mu_m mu_p < -p.
inline HopfPoint solve_hopf(Rates rates, double p) {
    const double mm = rates.mu_m, mp = rates.mu_p;
    require(mm > 0.0 && mp > 0.0, ErrorKind::InvalidArgument, "decay rates must be positive");
    if (!(mm * mp < -p)) {
        throw Error(ErrorKind::HypothesisViolated,
                    "mu_m mu_p >= -f'g'; the equilibrium is stable for all eps and has no Hopf point");
    }
    HopfPoint hp;
    hp.mu_m = mm;
    hp.mu_p = mp;
    hp.p = p;
    const double diff = mm * mm - mp * mp;
    hp.l = (mm * mm + mp * mp + std::sqrt(diff * diff + 4.0 * p * p)) /
           (2.0 * (p * p - mm * mm * mp * mp));
    const double sl = std::sqrt(hp.l);
    // tan 2beta = sqrt(l)(mu_m + mu_p) / (1 - l mu_m mu_p). The numerator is positive
    // and sin 2beta > 0 is forced by the second defining equation, so atan2 selects
    // the branch 2beta in (0, pi).
    hp.omega = 0.5 * std::atan2(sl * (mm + mp), 1.0 - hp.l * mm * mp);
    hp.eps0 = sl * hp.omega;
    hp.dalpha_deps = transversality(hp, mm, mp);

    const auto [r1, r2] = hp.defining_residuals();
    if (!(std::abs(r1) <= 1e-9 && std::abs(r2) <= 1e-9)) {
        throw Error(ErrorKind::InternalCheck, "Hopf point residuals too large: " +
                                                  std::to_string(r1) + ", " + std::to_string(r2));
    }
    return hp;
}

/// Hopf point found by root-solving the two defining equations directly:
/// bisection in eps on (mu_m + mu_p) beta(eps) + eps p sin 2beta(eps).
inline HopfPoint solve_hopf_direct(Rates rates, double p) {
    const double mm = rates.mu_m, mp = rates.mu_p;
    if (!(mm * mp < -p)) {
        throw Error(ErrorKind::HypothesisViolated, "mu_m mu_p >= -f'g'; no Hopf point");
    }
    auto second = [&](double eps) {
        const double b = solve_beta({mm, mp, p, eps});
        return (mm + mp) * b + eps * p * std::sin(2.0 * b);
    };
    double lo = 1e-8, hi = 1.0;
    for (int i = 0; i < 200 && second(hi) > 0.0; ++i) {
        lo = hi;
        hi *= 2.0;
    }
    if (!(second(hi) <= 0.0) || !(second(lo) > 0.0)) {
        throw Error(ErrorKind::NoRoot, "could not bracket eps0");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (second(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    HopfPoint hp;
    hp.mu_m = mm;
    hp.mu_p = mp;
    hp.p = p;
    hp.eps0 = 0.5 * (lo + hi);
    hp.omega = solve_beta({mm, mp, p, hp.eps0});
    hp.l = hp.eps0 * hp.eps0 / (hp.omega * hp.omega);
    hp.dalpha_deps = transversality(hp, mm, mp);
    return hp;
}

/// d lambda / d eps along a characteristic root, by implicit differentiation.
inline cplx root_velocity(cplx lambda, const CharParams& cp) {
    return -char_deps(lambda, cp) / char_dlambda(lambda, cp);
}

/// Newton iteration for a characteristic root near `guess`.
inline cplx refine_root(cplx guess, const CharParams& cp, int max_iterations = 60) {
    cplx z = guess;
    for (int it = 0; it < max_iterations; ++it) {
        const cplx step = char_eval(z, cp) / char_dlambda(z, cp);
        z -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) return z;
    }
    if (!(std::abs(char_eval(z, cp)) < 1e-10)) {
        throw Error(ErrorKind::NoConvergence, "characteristic root refinement did not converge");
    }
    return z;
}

enum class StabilityKind { StableForAllEps, StableBelowEps0, Unstable };

inline std::string_view to_string(StabilityKind k) {
    switch (k) {
        case StabilityKind::StableForAllEps: return "StableForAllEps";
        case StabilityKind::StableBelowEps0: return "StableBelowEps0";
        case StabilityKind::Unstable: return "Unstable";
    }
    return "?";
}

struct StabilityClass {
    StabilityKind kind = StabilityKind::StableForAllEps;
    std::optional<double> eps0;
};

inline StabilityClass classify_stability(const Equilibrium& eq, Rates rates, double eps) {
    require(eps > 0.0, ErrorKind::InvalidArgument, "eps must be positive");
    const double p = eq.coupling();
    const double mm = rates.mu_m * rates.mu_p;
    if (p <= 0.0 && mm >= -p) return {StabilityKind::StableForAllEps, std::nullopt};
    if (p > 0.0) {
        throw Error(ErrorKind::UnhandledRegime,
                    "positive feedback product f'g' > 0 is outside the analysed regimes");
    }
    const HopfPoint hp = solve_hopf(rates, p);
    if (eps < hp.eps0) return {StabilityKind::StableBelowEps0, hp.eps0};
    return {StabilityKind::Unstable, hp.eps0};
}

/// Axis-aligned rectangle in the lambda plane.
struct Rectangle {
    double re_min = 0.0, re_max = 1.0;
    double im_min = -std::numbers::pi / 2.0, im_max = std::numbers::pi / 2.0;
};

/// Number of characteristic roots inside `rect`, from the winding number of
/// the characteristic function along its boundary. The boundary is sampled
/// with `initial_points` points and refined by doubling until two successive
/// counts agree and no phase increment exceeds pi/4.
inline int count_roots(const CharParams& cp, const Rectangle& rect = {},
                       int initial_points = 4096, int max_doublings = 10) {
    auto winding = [&](int n, double& max_jump) {
        const cplx corners[4] = {{rect.re_min, rect.im_min},
                                 {rect.re_max, rect.im_min},
                                 {rect.re_max, rect.im_max},
                                 {rect.re_min, rect.im_max}};
        const double lens[4] = {rect.re_max - rect.re_min, rect.im_max - rect.im_min,
                                rect.re_max - rect.re_min, rect.im_max - rect.im_min};
        const double perimeter = lens[0] + lens[1] + lens[2] + lens[3];
        double total = 0.0;
        max_jump = 0.0;
        cplx prev = char_eval(corners[0], cp);
        for (int side = 0; side < 4; ++side) {
            const cplx a = corners[side], b = corners[(side + 1) % 4];
            const int m = std::max(8, static_cast<int>(std::ceil(n * lens[side] / perimeter)));
            for (int j = 1; j <= m; ++j) {
                const cplx z = a + (b - a) * (static_cast<double>(j) / m);
                const cplx v = char_eval(z, cp);
                const double dphi = std::arg(v / prev);
                max_jump = std::max(max_jump, std::abs(dphi));
                total += dphi;
                prev = v;
            }
        }
        return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
    };
    int n = initial_points;
    double jump = 0.0;
    int previous = winding(n, jump);
    for (int i = 0; i < max_doublings; ++i) {
        n *= 2;
        double next_jump = 0.0;
        const int current = winding(n, next_jump);
        if (current == previous && next_jump < std::numbers::pi / 4.0) return current;
        previous = current;
    }
    throw Error(ErrorKind::NoConvergence, "winding number did not stabilise");
}

}  // namespace sddhopf
