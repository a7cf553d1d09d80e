#include <cmath>
#include <random>

#include "catch_amalgamated.hpp"
#include "support.hpp"
#include "sddhopf/equilibrium.hpp"
#include "sddhopf/model.hpp"

using namespace sddhopf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Hill repressor jets pass finite-difference validation", "[model]") {
    const HillRepressor hill{35.0, 1200.0, 5.0};
    const ScalarMap f = [hill](double y) { return hill.jet(y); };
    const auto check = check_derivatives(f, {100.0, 900.0, 1200.0, 2992.6, 5000.0});
    CHECK(check.passed);
}

TEST_CASE("Hill repressor jets match the closed form at the half point", "[model]") {
    // With q = 1 and h = 5: f = a/2, f' = -a h / (4 half).
    const HillRepressor hill{35.0, 1200.0, 5.0};
    const Jet3 j = hill.jet(1200.0);
    CHECK_THAT(j.value, WithinRel(17.5, 1e-15));
    CHECK_THAT(j.d1, WithinRel(-35.0 * 5.0 / (4.0 * 1200.0), 1e-14));
}

TEST_CASE("Polynomial maps return exact derivatives", "[model]") {
    const ScalarMap p = polynomial_map({1.0, -2.0, 3.0, 4.0});  // 1 - 2x + 3x^2 + 4x^3
    const Jet3 j = p(2.0);
    CHECK(j.value == 1.0 - 4.0 + 12.0 + 32.0);
    CHECK(j.d1 == -2.0 + 12.0 + 48.0);
    CHECK(j.d2 == 6.0 + 48.0);
    CHECK(j.d3 == 24.0);
    const Jet3 z = zero_map()(3.0);
    CHECK(z.value == 0.0);
    CHECK(z.d1 == 0.0);
}

TEST_CASE("Hes1 nonlinearity derivatives validate at random points", "[model][property]") {
    const ModelParams p = hes1_params();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> y(10.0, 8000.0);
    std::vector<double> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(y(rng));
    CHECK(check_derivatives(p.nonlinearity.f, pts).passed);
    CHECK(check_derivatives(p.nonlinearity.g, pts).passed);
}

TEST_CASE("Parameter validation rejects invalid values", "[model]") {
    ModelParams p = hes1_params();
    p.mu_m = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = hes1_params();
    p.c = -0.1;
    CHECK_THROWS_AS(p.validate(), Error);
    p = hes1_params();
    p.eps = std::nan("");
    CHECK_THROWS_AS(p.validate(), Error);
    p = hes1_params();
    p.nonlinearity.f = nullptr;
    CHECK_THROWS_AS(p.validate(), Error);
    CHECK_THROWS_AS((HillRepressor{35.0, -1.0, 5.0}.validate()), Error);
}

TEST_CASE("Right-hand sides vanish at the equilibrium", "[model]") {
    const ModelParams p = hes1_params(0.01, 6.0);
    const Equilibrium eq = find_equilibrium(p, {10.0, 3000.0}, positive_opts(true));
    const State2 s{eq.r_star, eq.xi_star};
    const auto orig = rhs_original(s, s, p.eps, p);
    CHECK_THAT(orig.derivative[0], WithinAbs(0.0, 1e-12));
    CHECK_THAT(orig.derivative[1], WithinAbs(0.0, 1e-9));
    CHECK_THAT(orig.delay_residual, WithinAbs(0.0, 1e-15));
    const auto tr = rhs_transformed(s, s, p);
    CHECK_THAT(tr.denominator, WithinAbs(1.0, 1e-12));
    CHECK_THAT(tr.k, WithinAbs(p.eps, 1e-15));
    const State2 cd = rhs_constant_delay(s, s, p);
    CHECK_THAT(cd[0], WithinAbs(0.0, 1e-12));
}

TEST_CASE("Transformed right-hand side rescales the original one", "[model]") {
    const ModelParams p = hes1_params(0.01, 6.0);
    const State2 now{12.5, 3100.0}, back{11.0, 2900.0};
    const auto orig = rhs_original(now, back, 6.0, p);
    const auto tr = rhs_transformed(now, back, p);
    const double den = 1.0 - p.c * orig.derivative[0];
    CHECK_THAT(tr.denominator, WithinRel(den, 1e-14));
    CHECK_THAT(tr.derivative[0], WithinRel(p.eps * orig.derivative[0] / den, 1e-14));
    CHECK_THAT(tr.derivative[1], WithinRel(p.eps * orig.derivative[1] / den, 1e-14));
    CHECK_THAT(tr.k, WithinRel(p.eps + p.c * (now[0] - back[0]), 1e-14));
}

TEST_CASE("Transformed right-hand side reports a breached denominator", "[model]") {
    const ModelParams p = hes1_params(0.1, 6.0);
    // x' = -0.03 + f(0) = 34.97 > 1/c.
    try {
        rhs_transformed({1.0, 0.0}, {1.0, 0.0}, p);
        FAIL("expected DenominatorBreach");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DenominatorBreach);
    }
}
