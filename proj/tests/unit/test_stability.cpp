#include <cmath>
#include <numbers>
#include <random>

#include "catch_amalgamated.hpp"
#include "support.hpp"
#include "oracles.hpp"
#include "sddhopf/equilibrium.hpp"
#include "sddhopf/stability.hpp"

using namespace sddhopf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

struct Hes1 {
    ModelParams p = hes1_params();
    Equilibrium eq = find_equilibrium(p, {10.0, 3000.0}, positive_opts(true));
    HopfPoint hp = solve_hopf(p.rates(), eq.coupling());
};

}  // namespace

TEST_CASE("Hes1 Hopf point", "[stability]") {
    const Hes1 h;
    CHECK_THAT(h.hp.eps0, WithinRel(6.86216245, 1e-8));
    CHECK_THAT(h.hp.omega, WithinRel(0.47038322, 1e-7));
    CHECK(h.hp.omega > 0.0);
    CHECK(h.hp.omega < std::numbers::pi / 2.0);
    CHECK_THAT(h.hp.eps0 * h.hp.eps0, WithinRel(h.hp.l * h.hp.omega * h.hp.omega, 1e-14));
    const cplx r = char_eval(cplx{0.0, h.hp.omega}, h.hp.char_params(h.hp.eps0));
    CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("Closed form, direct solve and oracles agree on the Hopf point", "[stability][oracle]") {
    const Hes1 h;
    const HopfPoint direct = solve_hopf_direct(h.p.rates(), h.eq.coupling());
    CHECK_THAT(direct.eps0, WithinRel(h.hp.eps0, 1e-9));
    CHECK_THAT(direct.omega, WithinRel(h.hp.omega, 1e-9));
    const auto scan = oracle::hopf_scan(0.03, 0.04, h.eq.coupling(), 50.0);
    CHECK_THAT(scan.eps0, WithinRel(h.hp.eps0, 1e-10));
    CHECK_THAT(scan.omega, WithinRel(h.hp.omega, 1e-10));
}

TEST_CASE("Hopf point matches a grid scan for random admissible parameters", "[stability][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> mu(0.005, 0.2), ratio(1.05, 30.0);
    for (int i = 0; i < 100; ++i) {
        const double mm = mu(rng), mp = mu(rng);
        const double p = -ratio(rng) * mm * mp;
        const HopfPoint hp = solve_hopf({mm, mp}, p);
        const HopfPoint direct = solve_hopf_direct({mm, mp}, p);
        CHECK_THAT(direct.eps0, WithinRel(hp.eps0, 1e-9));
        const auto scan = oracle::hopf_scan(mm, mp, p, 4.0 * hp.eps0, 20000);
        CHECK_THAT(scan.eps0, WithinRel(hp.eps0, 1e-9));
        CHECK_THAT(scan.omega, WithinRel(hp.omega, 1e-9));
    }
}

TEST_CASE("Transversality is positive and matches root continuation", "[stability][oracle]") {
    const Hes1 h;
    CHECK(h.hp.dalpha_deps > 0.0);
    const double fd = oracle::root_speed_fd(0.03, 0.04, h.eq.coupling(), h.hp.eps0, h.hp.omega);
    CHECK_THAT(h.hp.dalpha_deps, WithinRel(fd, 1e-6));
    const cplx v = root_velocity(cplx{0.0, h.hp.omega}, h.hp.char_params(h.hp.eps0));
    CHECK_THAT(v.real(), WithinRel(h.hp.dalpha_deps, 1e-12));
}

TEST_CASE("Higher critical delays carry imaginary roots", "[stability]") {
    const Hes1 h;
    for (int k = 1; k <= 3; ++k) {
        const double ek = h.hp.eps_k(k);
        CHECK(ek > h.hp.eps_k(k - 1));
        const cplx r = char_eval(cplx{0.0, h.hp.omega_k(k)}, h.hp.char_params(ek));
        CHECK(std::abs(r) < 1e-9 * ek * ek);
    }
}

TEST_CASE("Root counts change from 0 to 2 across eps0", "[stability]") {
    const Hes1 h;
    const Rectangle rect{0.0, 2.0, -20.0, 20.0};
    CHECK(count_roots(h.hp.char_params(h.hp.eps0 - 0.1), rect) == 0);
    CHECK(count_roots(h.hp.char_params(h.hp.eps0 + 0.1), rect) == 2);
    CHECK(count_roots(h.hp.char_params(2.0), rect) == 0);
}

TEST_CASE("Classification of the feedback regimes", "[stability]") {
    const Hes1 h;
    CHECK(classify_stability(h.eq, h.p.rates(), 6.0).kind == StabilityKind::StableBelowEps0);
    CHECK(classify_stability(h.eq, h.p.rates(), 7.0).kind == StabilityKind::Unstable);

    Equilibrium weak = h.eq;
    weak.f1 = -1e-4;  // f'g' = -1e-3 >= -mu_m mu_p = -1.2e-3
    CHECK(classify_stability(weak, h.p.rates(), 100.0).kind == StabilityKind::StableForAllEps);
    CHECK_THROWS_AS(solve_hopf(h.p.rates(), weak.coupling()), Error);
    try {
        solve_hopf(h.p.rates(), weak.coupling());
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HypothesisViolated);
    }

    Equilibrium positive = h.eq;
    positive.f1 = 1e-3;
    try {
        classify_stability(positive, h.p.rates(), 6.0);
        FAIL("expected UnhandledRegime");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnhandledRegime);
    }
}

TEST_CASE("Refined roots satisfy the characteristic equation", "[stability]") {
    const Hes1 h;
    const CharParams cp = h.hp.char_params(h.hp.eps0 + 0.5);
    const cplx z = refine_root(cplx{0.01, h.hp.omega}, cp);
    CHECK(std::abs(char_eval(z, cp)) < 1e-10);
    CHECK(z.real() > 0.0);
    const cplx o = oracle::char_root(0.03, 0.04, h.eq.coupling(), h.hp.eps0 + 0.5, cplx{0.01, h.hp.omega});
    CHECK_THAT(z.real(), WithinRel(o.real(), 1e-9));
    CHECK_THAT(z.imag(), WithinRel(o.imag(), 1e-9));
}

TEST_CASE("Beta residual vanishes at the Hopf frequency", "[stability]") {
    const Hes1 h;
    CHECK_THAT(beta_residual(h.hp.omega, h.hp.char_params(h.hp.eps0)), WithinAbs(0.0, 1e-12));
    CHECK_THAT(solve_beta(h.hp.char_params(h.hp.eps0)), WithinRel(h.hp.omega, 1e-10));
}
