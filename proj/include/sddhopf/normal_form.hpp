#pragma once

// Cubic Hopf normal form A' = kappa1 delta A + kappa3 A^2 conj(A) of the
// unit-delay system at eps = eps0, by the method of multiple time scales.
//
// Linearisation convention: x'(eta) = eps M x(eta) + eps N x(eta - 1) with
// M = diag(-mu_m, -mu_p), N = [[0, f'], [g', 0]]. All resolvents below are
// written in terms of this M.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sddhopf/equilibrium.hpp"
#include "sddhopf/error.hpp"
#include "sddhopf/model.hpp"
#include "sddhopf/stability.hpp"

namespace sddhopf {

using Vec2c = std::array<cplx, 2>;

/// Threshold on |char(2 i omega)| below which the second harmonic is resonant.
inline constexpr double kResonanceThreshold = 1e-6;

namespace detail {

inline cplx expi(double phase) { return std::polar(1.0, phase); }

inline cplx dot_conj(const Vec2c& d, const Vec2c& v) {
    return std::conj(d[0]) * v[0] + std::conj(d[1]) * v[1];
}

/// Gaussian elimination with partial pivoting on a 2x2 complex system.
inline Vec2c solve2(std::array<std::array<cplx, 2>, 2> a, Vec2c b) {
    if (std::abs(a[1][0]) > std::abs(a[0][0])) {
        std::swap(a[0], a[1]);
        std::swap(b[0], b[1]);
    }
    if (a[0][0] == cplx{}) throw Error(ErrorKind::InternalCheck, "singular 2x2 system");
    const cplx m = a[1][0] / a[0][0];
    const cplx a11 = a[1][1] - m * a[0][1];
    const cplx b1 = b[1] - m * b[0];
    if (a11 == cplx{}) throw Error(ErrorKind::InternalCheck, "singular 2x2 system");
    Vec2c x;
    x[1] = b1 / a11;
    x[0] = (b[0] - a[0][1] * x[1]) / a[0][0];
    return x;
}

inline double rel_diff(const Vec2c& x, const Vec2c& y) {
    const double nx = std::hypot(std::abs(x[0]), std::abs(x[1]));
    const double nd = std::hypot(std::abs(x[0] - y[0]), std::abs(x[1] - y[1]));
    return nx == 0.0 ? nd : nd / nx;
}

}  // namespace detail

/// Critical eigenvector theta (theta_1 = 1) and adjoint d with conj(d)^T theta = 1.
struct CriticalFrame {
    double omega = 0.0;
    double eps0 = 0.0;
    double mu_m = 0.0, mu_p = 0.0;
    double f1 = 0.0, g1 = 0.0;
    Vec2c theta{};
    Vec2c d{};

    /// (i omega I - eps0 M - eps0 N e^{-i omega}) theta
    Vec2c eigen_residual() const {
        const cplx io{0.0, omega};
        const cplx em = detail::expi(-omega);
        return {(io + eps0 * mu_m) * theta[0] - eps0 * f1 * em * theta[1],
                -eps0 * g1 * em * theta[0] + (io + eps0 * mu_p) * theta[1]};
    }

    /// (-i omega I - eps0 M^T - eps0 N^T e^{i omega}) d
    Vec2c adjoint_residual() const {
        const cplx io{0.0, omega};
        const cplx ep = detail::expi(omega);
        return {(-io + eps0 * mu_m) * d[0] - eps0 * g1 * ep * d[1],
                -eps0 * f1 * ep * d[0] + (-io + eps0 * mu_p) * d[1]};
    }

    cplx normalization() const { return detail::dot_conj(d, theta); }

    /// conj(d)^T N theta
    cplx projected_coupling() const {
        return std::conj(d[0]) * f1 * theta[1] + std::conj(d[1]) * g1 * theta[0];
    }
};

inline CriticalFrame critical_frame(Rates rates, const Equilibrium& eq, const HopfPoint& hp) {
    if (eq.f1 == 0.0) {
        throw Error(ErrorKind::SingularFrame, "f'(xi*) = 0: the critical eigenvector is undefined");
    }
    CriticalFrame fr;
    fr.omega = hp.omega;
    fr.eps0 = hp.eps0;
    fr.mu_m = rates.mu_m;
    fr.mu_p = rates.mu_p;
    fr.f1 = eq.f1;
    fr.g1 = eq.g1;
    const double w = hp.omega, e = hp.eps0;
    const cplx io{0.0, w};
    fr.theta = {1.0, detail::expi(w) * (io + e * rates.mu_m) / (e * eq.f1)};
    const cplx scale = 1.0 / (-2.0 * io + e * (rates.mu_m + rates.mu_p));
    fr.d = {scale * (-io + e * rates.mu_p), scale * e * detail::expi(w) * eq.f1};
    return fr;
}

/// Second-order particular solution x2 = a A^2 e^{2 i omega T0} + b A conj(A) + c.c.
struct QuadraticCoeffs {
    cplx a1, a2, b1, b2;
    Vec2c a_solve{}, b_solve{};
    double a_agreement = 0.0;  ///< relative difference closed form vs direct solve
    double b_agreement = 0.0;
    double a_residual = 0.0;  ///< relative residual of the a-system at the closed form
    double b_residual = 0.0;
    cplx second_harmonic_char;  ///< char(2 i omega, eps0)
};

namespace detail {

struct QuadraticForcing {
    Vec2c harmonic2;  ///< e^{2 i omega T0} coefficient divided by eps0 A^2
    Vec2c mean;       ///< A conj(A) coefficient divided by eps0
};

inline QuadraticForcing quadratic_forcing(const CriticalFrame& fr, const Equilibrium& eq, double c) {
    const double mm = fr.mu_m, mp = fr.mu_p, w = fr.omega;
    const double f1 = eq.f1, f2 = eq.f2, g1 = eq.g1, g2 = eq.g2;
    const cplx t2 = fr.theta[1], tb = std::conj(t2);
    const cplx e1 = expi(-w), e2 = expi(-2.0 * w), ep = expi(w);
    QuadraticForcing q;
    q.harmonic2[0] = c * mm * mm - 2.0 * c * mm * f1 * t2 * e1 + 0.5 * (f2 + 2.0 * c * f1 * f1) * t2 * t2 * e2;
    q.harmonic2[1] = -c * mp * f1 * t2 * t2 * e1 + c * mm * mp * t2 + 0.5 * g2 * e2 +
                     c * f1 * g1 * t2 * e2 - c * mm * g1 * e1;
    q.mean[0] = 2.0 * c * mm * mm - 2.0 * c * mm * f1 * (tb * ep + t2 * e1) +
                (f2 + 2.0 * c * f1 * f1) * t2 * tb;
    q.mean[1] = -c * mp * f1 * t2 * tb * (ep + e1) + c * mm * mp * (t2 + tb) + g2 +
                c * f1 * g1 * (t2 + tb) - c * mm * g1 * (ep + e1);
    return q;
}

}  // namespace detail

/// Coefficients a = (a1, a2), b = (b1, b2) from their closed forms, each
/// cross-checked against a direct solve of the defining 2x2 system.
inline QuadraticCoeffs quadratic_coeffs(const Equilibrium& eq, const HopfPoint& hp,
                                        const CriticalFrame& fr, double c) {
    const double w = hp.omega, e = hp.eps0;
    const double mm = fr.mu_m, mp = fr.mu_p;
    const double f1 = eq.f1, f2 = eq.f2, g1 = eq.g1, g2 = eq.g2;
    QuadraticCoeffs qc;
    qc.second_harmonic_char = char_eval(cplx{0.0, 2.0 * w}, hp.char_params(e));
    if (!(std::abs(qc.second_harmonic_char) > kResonanceThreshold)) {
        throw Error(ErrorKind::ResonanceViolation,
                    "2 i omega is (nearly) a characteristic root: |char(2 i omega)| = " +
                        std::to_string(std::abs(qc.second_harmonic_char)));
    }
    const cplx i2w{0.0, 2.0 * w};
    const cplx e2 = detail::expi(-2.0 * w), e4 = detail::expi(-4.0 * w);
    const auto forcing = detail::quadratic_forcing(fr, eq, c);
    const cplx p1 = forcing.harmonic2[0], p2 = forcing.harmonic2[1];

    // Closed forms.
    const cplx det = (i2w + e * mm) * (i2w + e * mp) - e * e * f1 * g1 * e4;
    qc.a1 = e / det * (p1 * (i2w + e * mp) + p2 * (e * f1 * e2));
    qc.a2 = e / det * (p1 * (e * g1 * e2) + p2 * (i2w + e * mm));

    const double sw = std::sin(w), cw = std::cos(w);
    const double denom_b = e * e * f1 * f1 * (mm * mp - f1 * g1);
    qc.b1 = (mp * f2 * w * w + mp * f2 * e * e * mm * mm + 2.0 * f1 * f1 * c * mp * w * w -
             2.0 * f1 * f1 * c * mp * w * w * cw -
             2.0 * c * (f1 * f1 * f1 * g1 + mm * mp * f1 * f1) * e * w * sw +
             f1 * f1 * f1 * g2 * e * e) /
            denom_b;
    qc.b2 = (mm * f1 * f1 * g2 * e * e + f2 * g1 * w * w + f2 * g1 * mm * mm * e * e +
             2.0 * c * f1 * f1 * g1 * w * w - 2.0 * c * mm * mp * f1 * w * w * cw -
             2.0 * c * (mm * f1 * f1 * g1 + mm * mm * mp * f1) * e * w * sw) /
            denom_b;

    // Direct solves of the coefficient-matching systems.
    const std::array<std::array<cplx, 2>, 2> a_mat{{{i2w + e * mm, -e * f1 * e2},
                                                    {-e * g1 * e2, i2w + e * mp}}};
    const Vec2c a_rhs{e * p1, e * p2};
    qc.a_solve = detail::solve2(a_mat, a_rhs);
    const std::array<std::array<cplx, 2>, 2> b_mat{{{e * mm, -e * f1}, {-e * g1, e * mp}}};
    const Vec2c b_rhs{e * forcing.mean[0], e * forcing.mean[1]};
    qc.b_solve = detail::solve2(b_mat, b_rhs);

    const Vec2c a_closed{qc.a1, qc.a2}, b_closed{qc.b1, qc.b2};
    qc.a_agreement = detail::rel_diff(qc.a_solve, a_closed);
    qc.b_agreement = detail::rel_diff(qc.b_solve, b_closed);

    auto residual = [](const std::array<std::array<cplx, 2>, 2>& m, const Vec2c& x, const Vec2c& rhs) {
        const Vec2c r{m[0][0] * x[0] + m[0][1] * x[1] - rhs[0], m[1][0] * x[0] + m[1][1] * x[1] - rhs[1]};
        const double scale = std::max({std::abs(m[0][0] * x[0]), std::abs(m[0][1] * x[1]),
                                       std::abs(m[1][0] * x[0]), std::abs(m[1][1] * x[1]),
                                       std::abs(rhs[0]), std::abs(rhs[1])});
        const double n = std::hypot(std::abs(r[0]), std::abs(r[1]));
        return scale == 0.0 ? n : n / scale;
    };
    qc.a_residual = residual(a_mat, a_closed, a_rhs);
    qc.b_residual = residual(b_mat, b_closed, b_rhs);

    if (!(qc.a_agreement <= 1e-8 && qc.b_agreement <= 1e-8)) {
        throw Error(ErrorKind::InternalCheck,
                    "closed-form quadratic coefficients disagree with direct solves (a: " +
                        std::to_string(qc.a_agreement) + ", b: " + std::to_string(qc.b_agreement) + ")");
    }
    return qc;
}

/// Which cubic-forcing term list to assemble.
///  - Corrected: every summand follows from the cubic Taylor expansion.
///  - AsPrinted: the v(eta) v(eta-1)^2 summand carries f' in place of f'^2, as
///    in the published display; reproduces the published Hes1 coefficients.
enum class CubicTerms { Corrected, AsPrinted };

inline std::string_view to_string(CubicTerms t) {
    return t == CubicTerms::Corrected ? "corrected" : "printed";
}

/// One displayed summand of the A^2 conj(A) forcing vector chi.
struct ForcingTerm {
    int row = 0;            ///< 0: u-equation, 1: v-equation
    double prefactor = 1.0; ///< eps0 / 2 (cubic Taylor terms) or eps0 (quadratic x second order)
    std::string label;
    cplx value;             ///< summand without the prefactor
};

/// The A^2 conj(A) part of chi, one entry per summand.
inline std::vector<ForcingTerm> cubic_forcing_terms(const Equilibrium& eq, const CriticalFrame& fr,
                                                    const QuadraticCoeffs& qc, double c,
                                                    CubicTerms variant = CubicTerms::Corrected) {
    const double mm = fr.mu_m, mp = fr.mu_p, w = fr.omega, e = fr.eps0;
    const double f1 = eq.f1, f2 = eq.f2, f3 = eq.f3, g1 = eq.g1, g2 = eq.g2, g3 = eq.g3;
    const cplx t2 = fr.theta[1], tb = std::conj(t2);
    const cplx em = detail::expi(-w), ep = detail::expi(w), em2 = detail::expi(-2.0 * w);
    const cplx a1 = qc.a1, a2 = qc.a2, b1 = qc.b1, b2 = qc.b2;
    const double c2 = c * c;
    const double half = 0.5 * e;
    const double f1_in_v_term = variant == CubicTerms::Corrected ? f1 * f1 : f1;

    return {
        // cubic Taylor terms, u-equation
        {0, half, "-6c^2 mu_m^3", -6.0 * c2 * mm * mm * mm},
        {0, half, "6c^2 mu_m^2 f' (2 th2 e^{-iw} + thb2 e^{iw})",
         6.0 * c2 * mm * mm * f1 * (2.0 * t2 * em + tb * ep)},
        {0, half, "-2c mu_m (f'' + 3c f'^2) th2 (th2 e^{-2iw} + 2 thb2)",
         -2.0 * c * mm * (f2 + 3.0 * c * f1 * f1) * t2 * (t2 * em2 + 2.0 * tb)},
        {0, half, "(f''' + 6c f'' f' + 6c^2 f'^3) th2^2 thb2 e^{-iw}",
         (f3 + 6.0 * c * f2 * f1 + 6.0 * c2 * f1 * f1 * f1) * t2 * t2 * tb * em},
        // cubic Taylor terms, v-equation
        {1, half, "g''' e^{-iw}", g3 * em},
        {1, half, "-2c^2 mu_m^2 mu_p (thb2 + 2 th2)", -2.0 * c2 * mm * mm * mp * (tb + 2.0 * t2)},
        {1, half, "2c^2 mu_m^2 g' (2 e^{-iw} + e^{iw})", 2.0 * c2 * mm * mm * g1 * (2.0 * em + ep)},
        {1, half, "-c mu_m g'' (2 + e^{-2iw})", -c * mm * g2 * (2.0 + em2)},
        {1, half, "c g'' f' (2 th2 e^{-iw} + thb2 e^{-iw})", c * g2 * f1 * (2.0 * t2 * em + tb * em)},
        {1, half,
         variant == CubicTerms::Corrected ? "-c mu_p (f'' + 2c f'^2) th2^2 thb2 (2 + e^{-2iw})"
                                          : "-c mu_p (f'' + 2c f') th2^2 thb2 (2 + e^{-2iw})",
         -c * mp * (f2 + 2.0 * c * f1_in_v_term) * t2 * t2 * tb * (2.0 + em2)},
        {1, half, "c g' (f'' + 2c f'^2)(2 thb2 + th2) th2 e^{-iw}",
         c * g1 * (f2 + 2.0 * c * f1 * f1) * (2.0 * tb + t2) * t2 * em},
        {1, half, "4c^2 mu_m mu_p f' th2 (thb2 e^{iw} + thb2 e^{-iw} + th2 e^{-iw})",
         4.0 * c2 * mm * mp * f1 * t2 * (tb * ep + tb * em + t2 * em)},
        {1, half, "-4c^2 mu_m f' g' (thb2 + th2 + th2 e^{-2iw})",
         -4.0 * c2 * mm * f1 * g1 * (tb + t2 + t2 * em2)},
        // quadratic terms against the second-order solution, u-equation
        {0, e, "2c mu_m^2 (a1 + b1)", 2.0 * c * mm * mm * (a1 + b1)},
        {0, e, "-2c mu_m f' (a1 thb2 e^{iw} + b1 th2 e^{-iw} + b2 + a2 e^{-2iw})",
         -2.0 * c * mm * f1 * (a1 * tb * ep + b1 * t2 * em + b2 + a2 * em2)},
        {0, e, "(f'' + 2c f'^2)(a2 thb2 + b2 th2) e^{-iw}",
         (f2 + 2.0 * c * f1 * f1) * (a2 * tb + b2 * t2) * em},
        // quadratic terms against the second-order solution, v-equation
        {1, e, "-c mu_p f' (b2 th2 + a2 thb2 e^{-2iw} + b2 th2 e^{-iw} + a2 thb2 e^{iw})",
         -c * mp * f1 * (b2 * t2 + a2 * tb * em2 + b2 * t2 * em + a2 * tb * ep)},
        {1, e, "c mu_m mu_p (b1 th2 + a1 thb2 + a2 + b2)", c * mm * mp * (b1 * t2 + a1 * tb + a2 + b2)},
        {1, e, "g'' e^{-iw} (a1 + b1)", g2 * em * (a1 + b1)},
        {1, e, "c f' g' (b2 e^{-iw} + a2 e^{-iw} + b1 th2 e^{-iw} + a1 thb2 e^{-iw})",
         c * f1 * g1 * (b2 * em + a2 * em + b1 * t2 * em + a1 * tb * em)},
        {1, e, "-c mu_m g' (b1 e^{-iw} + a1 e^{iw} + b1 + a1 e^{-2iw})",
         -c * mm * g1 * (b1 * em + a1 * ep + b1 + a1 * em2)},
    };
}

inline Vec2c assemble_forcing(const std::vector<ForcingTerm>& terms) {
    Vec2c chi{};
    for (const auto& t : terms) chi[t.row] += t.prefactor * t.value;
    return chi;
}

enum class Direction { Supercritical, Subcritical, Degenerate };

inline std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::Supercritical: return "Supercritical";
        case Direction::Subcritical: return "Subcritical";
        case Direction::Degenerate: return "Degenerate";
    }
    return "?";
}

inline Direction classify_direction(cplx kappa3) {
    if (std::abs(kappa3.real()) <= 1e-12 * std::abs(kappa3)) return Direction::Degenerate;
    return kappa3.real() < 0.0 ? Direction::Supercritical : Direction::Subcritical;
}

struct NormalForm {
    cplx kappa1;  ///< coefficient of delta A, delta = eps - eps0
    cplx kappa3;  ///< coefficient of A^2 conj(A)
    Direction direction = Direction::Degenerate;
    double c = 0.0;
    CubicTerms terms = CubicTerms::Corrected;
};

/// 1 + eps0 e^{-i omega} conj(d)^T N theta
inline cplx projection_factor(const CriticalFrame& fr) {
    return 1.0 + fr.eps0 * detail::expi(-fr.omega) * fr.projected_coupling();
}

inline NormalForm normal_form(const Equilibrium& eq, const HopfPoint& hp, const CriticalFrame& fr,
                              const QuadraticCoeffs& qc, double c,
                              CubicTerms variant = CubicTerms::Corrected) {
    const cplx factor = projection_factor(fr);
    if (!(std::abs(factor) >= 1e-10)) {
        throw Error(ErrorKind::DegenerateProjection, "|1 + eps0 e^{-i omega} conj(d)^T N theta| < 1e-10");
    }
    const Vec2c chi = assemble_forcing(cubic_forcing_terms(eq, fr, qc, c, variant));
    NormalForm nf;
    nf.kappa1 = cplx{0.0, hp.omega} / hp.eps0 / factor;
    nf.kappa3 = detail::dot_conj(fr.d, chi) / factor;
    nf.direction = classify_direction(nf.kappa3);
    nf.c = c;
    nf.terms = variant;
    return nf;
}

/// Normal-form coefficients of the constant-delay (c = 0) system from its own
/// closed form; independent of the general term list.
inline std::pair<cplx, cplx> constant_delay_normal_form(const Equilibrium& eq, const HopfPoint& hp,
                                                        const CriticalFrame& fr,
                                                        const QuadraticCoeffs& qc_at_zero) {
    const double w = hp.omega, e = hp.eps0;
    const cplx ep = detail::expi(w);
    const cplx denom = ep + e * fr.projected_coupling();
    const cplx t2 = fr.theta[1], tb = std::conj(t2);
    const cplx kappa1 = cplx{0.0, w} * ep / (e * denom);
    const Vec2c v{eq.f2 * (qc_at_zero.a2 * tb + qc_at_zero.b2 * t2) + 0.5 * eq.f3 * t2 * t2 * tb,
                  eq.g2 * (qc_at_zero.a1 + qc_at_zero.b1) + 0.5 * eq.g3};
    const cplx kappa3 = e / denom * detail::dot_conj(fr.d, v);
    return {kappa1, kappa3};
}

/// Re and Im of kappa3 as quadratics q2 c^2 + q1 c + q0.
struct Kappa3Polynomial {
    std::array<double, 3> re{};  ///< {q2, q1, q0}
    std::array<double, 3> im{};
    double fit_residual = 0.0;   ///< relative misfit at an extra check node

    cplx operator()(double c) const {
        return {(re[0] * c + re[1]) * c + re[2], (im[0] * c + im[1]) * c + im[2]};
    }
};

/// Full pipeline from an equilibrium to kappa3(c) at one value of c.
inline cplx kappa3_at(const Equilibrium& eq, const HopfPoint& hp, const CriticalFrame& fr, double c,
                      CubicTerms variant) {
    const QuadraticCoeffs qc = quadratic_coeffs(eq, hp, fr, c);
    return normal_form(eq, hp, fr, qc, c, variant).kappa3;
}

/// kappa3 is exactly quadratic in c (a, b are affine in c); this recovers the
/// quadratic from three evaluations and checks it against a fourth.
inline Kappa3Polynomial fit_kappa3(const Equilibrium& eq, const HopfPoint& hp, const CriticalFrame& fr,
                                   CubicTerms variant, std::array<double, 3> nodes = {0.0, 0.01, 0.05},
                                   double check_node = 0.03) {
    cplx v[3];
    for (int i = 0; i < 3; ++i) v[i] = kappa3_at(eq, hp, fr, nodes[i], variant);
    // Newton divided differences.
    const double x0 = nodes[0], x1 = nodes[1], x2 = nodes[2];
    const cplx d01 = (v[1] - v[0]) / (x1 - x0);
    const cplx d12 = (v[2] - v[1]) / (x2 - x1);
    const cplx d012 = (d12 - d01) / (x2 - x0);
    const cplx q2 = d012;
    const cplx q1 = d01 - d012 * (x0 + x1);
    const cplx q0 = v[0] - d01 * x0 + d012 * x0 * x1;
    Kappa3Polynomial poly;
    poly.re = {q2.real(), q1.real(), q0.real()};
    poly.im = {q2.imag(), q1.imag(), q0.imag()};
    const cplx check = kappa3_at(eq, hp, fr, check_node, variant);
    poly.fit_residual = std::abs(poly(check_node) - check) / std::max(std::abs(check), 1e-300);
    return poly;
}

/// Positive root c0 of Re kappa3(c) = 0 in (0, c_max].
inline double critical_c(const Kappa3Polynomial& poly,
                         double c_max = std::numeric_limits<double>::infinity()) {
    const double a = poly.re[0], b = poly.re[1], c = poly.re[2];
    std::vector<double> roots;
    if (a == 0.0) {
        if (b != 0.0) roots.push_back(-c / b);
    } else {
        const double disc = b * b - 4.0 * a * c;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            // Numerically stable pair.
            const double q = -0.5 * (b + std::copysign(s, b));
            if (q != 0.0) roots.push_back(c / q);
            roots.push_back(q / a);
        }
    }
    double best = std::numeric_limits<double>::infinity();
    for (double r : roots) {
        if (r > 0.0 && r <= c_max) best = std::min(best, r);
    }
    if (!std::isfinite(best)) {
        throw Error(ErrorKind::NoSignChange, "Re kappa3(c) has no positive root in (0, c_max]");
    }
    return best;
}

/// First-order prediction for the bifurcating cycle at eps = eps0 + delta.
struct CyclePrediction {
    double amplitude_A = 0.0;   ///< |A| = sqrt(delta Re kappa1 / (-Re kappa3))
    double amplitude_r = 0.0;   ///< oscillation amplitude of r about r*, 2|A| since theta_1 = 1
    double amplitude_xi = 0.0;  ///< 2|A||theta_2|
    double frequency = 0.0;     ///< omega + delta Im kappa1 + |A|^2 Im kappa3
    double eta_period = 0.0;
};

inline std::optional<CyclePrediction> predict_cycle(const NormalForm& nf, const HopfPoint& hp,
                                                    const CriticalFrame& fr, double delta) {
    const double ratio = delta * nf.kappa1.real() / (-nf.kappa3.real());
    if (!(ratio > 0.0)) return std::nullopt;
    CyclePrediction out;
    out.amplitude_A = std::sqrt(ratio);
    out.amplitude_r = 2.0 * out.amplitude_A;
    out.amplitude_xi = 2.0 * out.amplitude_A * std::abs(fr.theta[1]);
    out.frequency = hp.omega + delta * nf.kappa1.imag() + ratio * nf.kappa3.imag();
    out.eta_period = 2.0 * std::numbers::pi / out.frequency;
    return out;
}

/// Everything the Hopf analysis produces for one model.
struct HopfAnalysis {
    Equilibrium equilibrium;
    HopfPoint hopf;
    CriticalFrame frame;
    QuadraticCoeffs quadratic;
    NormalForm normal_form;
    Kappa3Polynomial kappa3_poly;
    std::optional<double> c0;
};

inline HopfAnalysis analyze_hopf(const ModelParams& params, const Equilibrium& eq,
                                 CubicTerms variant = CubicTerms::Corrected) {
    HopfAnalysis out;
    out.equilibrium = eq;
    out.hopf = solve_hopf(params.rates(), eq.coupling());
    out.frame = critical_frame(params.rates(), eq, out.hopf);
    out.quadratic = quadratic_coeffs(eq, out.hopf, out.frame, params.c);
    out.normal_form = normal_form(eq, out.hopf, out.frame, out.quadratic, params.c, variant);
    out.kappa3_poly = fit_kappa3(eq, out.hopf, out.frame, variant);
    try {
        out.c0 = critical_c(out.kappa3_poly);
    } catch (const Error& err) {
        if (err.kind() != ErrorKind::NoSignChange) throw;
    }
    return out;
}

}  // namespace sddhopf
