#include <random>

#include "catch_amalgamated.hpp"
#include "support.hpp"
#include "oracles.hpp"
#include "sddhopf/equilibrium.hpp"

using namespace sddhopf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("Hes1 equilibrium and feedback slopes", "[equilibrium]") {
    const Equilibrium eq = find_equilibrium(hes1_params(), {10.0, 3000.0}, positive_opts(true));
    CHECK_THAT(eq.r_star, WithinRel(11.97050076, 1e-8));
    CHECK_THAT(eq.xi_star, WithinRel(2992.625189, 1e-8));
    CHECK_THAT(eq.f1, WithinRel(-0.00059384374, 1e-7));
    CHECK(eq.g1 == 10.0);
    CHECK(eq.g2 == 0.0);
    CHECK(eq.g3 == 0.0);
    CHECK(std::abs(eq.residual_x) < 1e-12);
    CHECK(std::abs(eq.residual_y) < 1e-9);
}

TEST_CASE("Equilibrium matches an independent bisection for random Hill models", "[equilibrium][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> mu(0.01, 0.1), am(5.0, 60.0), half(200.0, 3000.0), ap(1.0, 20.0);
    std::uniform_int_distribution<int> h(1, 8);
    for (int i = 0; i < 100; ++i) {
        ModelParams p = hes1_params();
        p.mu_m = mu(rng);
        p.mu_p = mu(rng);
        const HillRepressor hill{am(rng), half(rng), static_cast<double>(h(rng))};
        const double alpha_p = ap(rng);
        p.nonlinearity = hes1_nonlinearity(hill, alpha_p);
        const Equilibrium eq = find_equilibrium(p, {1.0, 1.0}, positive_opts(true));
        const auto m = oracle::hill_model(p.mu_m, p.mu_p, hill.alpha, hill.half,
                                          static_cast<int>(hill.exponent), alpha_p);
        const auto ref = oracle::equilibrium(m, 0.0, hill.alpha / p.mu_m);
        CHECK_THAT(eq.r_star, WithinRel(ref[0], 1e-11));
        CHECK_THAT(eq.xi_star, WithinRel(ref[1], 1e-11));
    }
}

TEST_CASE("Linear feedback has a closed-form equilibrium", "[equilibrium]") {
    // f = 1 - 1e-4 xi, g = 10 r: r* = 1 / (mu_m + 1e-4 * 10 / mu_p).
    ModelParams p = hes1_params();
    p.nonlinearity = polynomial_nonlinearity({1.0, -1e-4}, {0.0, 10.0});
    const Equilibrium eq = find_equilibrium(p, {10.0, 100.0}, positive_opts(false));
    CHECK_THAT(eq.r_star, WithinRel(1.0 / (0.03 + 1e-3 / 0.04), 1e-12));
    CHECK_THAT(eq.xi_star, WithinRel(250.0 * eq.r_star, 1e-12));
    CHECK(eq.f2 == 0.0);
    CHECK_THAT(eq.coupling(), WithinRel(-1e-3, 1e-12));
}

TEST_CASE("Zero nonlinearity gives the origin outside the positive orthant", "[equilibrium]") {
    ModelParams p = hes1_params();
    p.nonlinearity = polynomial_nonlinearity({}, {});
    const Equilibrium eq = find_equilibrium(p, {1.0, 1.0}, positive_opts(false));
    CHECK_THAT(eq.r_star, WithinAbs(0.0, 1e-12));
    CHECK_THAT(eq.xi_star, WithinAbs(0.0, 1e-12));
    CHECK_THROWS_AS(find_equilibrium(p, {1.0, 1.0}, positive_opts(true)), Error);
}

TEST_CASE("Enumeration finds both roots of a bistable polynomial model", "[equilibrium]") {
    // With g = r and mu_p = 1: -r + f(r) = 0 for f(r) = r - (r - 1)(r - 2) = -r^2 + 4r - 2,
    // roots r = 1 and r = 2.
    ModelParams p = hes1_params();
    p.mu_m = 1.0;
    p.mu_p = 1.0;
    p.nonlinearity = polynomial_nonlinearity({-2.0, 4.0, -1.0}, {0.0, 1.0});
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(0.013 + 0.05 * i);
    const auto roots = enumerate_equilibria(p, grid);
    REQUIRE(roots.size() == 2);
    CHECK_THAT(roots[0].r_star, WithinRel(1.0, 1e-12));
    CHECK_THAT(roots[1].r_star, WithinRel(2.0, 1e-12));
}
