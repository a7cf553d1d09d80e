#include <cmath>
#include <sstream>

#include "catch_amalgamated.hpp"
#include "support.hpp"
#include "oracles.hpp"
#include "sddhopf/equilibrium.hpp"
#include "sddhopf/simulate.hpp"

using namespace sddhopf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

/// History x(s) = slope * s for every s, with an unbounded frontier.
struct LinearHistory {
    double slope;
    State2 operator()(double s) const { return {slope * s, 0.0}; }
    double start() const { return -1e9; }
    double frontier() const { return 1e9; }
    double max_abs_dx() const { return std::abs(slope); }
};

Equilibrium hes1_eq(const ModelParams& p) { return find_equilibrium(p, {10.0, 3000.0}, positive_opts(true)); }

}  // namespace

TEST_CASE("Delay solve on a linear history has the closed form eps / (1 - c m)", "[simulate]") {
    ModelParams p = hes1_params(0.01, 6.0);
    for (double m : {-20.0, -1.0, 0.0, 3.0, 50.0, 90.0}) {
        const LinearHistory hist{m};
        const double t = 100.0;
        const auto sol = solve_delay(t, m * t, hist, p, 0.0);
        INFO("slope " << m);
        CHECK_THAT(sol.tau, WithinRel(p.eps / (1.0 - p.c * m), 1e-12));
        CHECK(std::abs(sol.residual) <= 1e-12);
        CHECK(sol.slope_bound_ok);
    }
    p.c = 0.0;
    CHECK(solve_delay(5.0, 1.0, LinearHistory{4.0}, p, 0.0).tau == p.eps);
}

TEST_CASE("Delay solve reports a missing root", "[simulate]") {
    const ModelParams p = hes1_params(0.01, 6.0);
    // With slope >= 1/c the residual tau (1 - c m) - eps never changes sign.
    CHECK_THROWS_AS(solve_delay(100.0, 150.0 * 100.0, LinearHistory{150.0}, p, 0.0), Error);
}

TEST_CASE("Compatibility check of initial data", "[simulate]") {
    const ModelParams p = hes1_params(0.01, 6.0);
    const Equilibrium eq = hes1_eq(p);
    const auto ic = perturbed_initial_data(p, eq, {0.5, 0.0}, SystemKind::Original);
    const auto rep = check_compatibility(ic.data, ic.tau0, p);
    CHECK(rep.passed);
    const auto flat = constant_initial_data({eq.r_star + 0.5, eq.xi_star}, 3.0 * p.eps);
    CHECK_FALSE(check_compatibility(flat, p.eps, p).passed);
    try {
        integrate_sdd(flat, p.eps, p, 10.0, {});
        FAIL("expected Incompatible");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Incompatible);
    }
    IntegrationOptions forced;
    forced.force = true;
    const Trajectory tr = integrate_sdd(flat, p.eps, p, 10.0, forced);
    CHECK(tr.ok());
    REQUIRE_FALSE(tr.events.empty());
    CHECK(tr.events.front().kind == "Incompatible");
}

TEST_CASE("The state-dependent integrator at c = 0 matches constant-delay RK4", "[simulate][oracle]") {
    const ModelParams p = hes1_params(0.0, 6.0);
    const Equilibrium eq = hes1_eq(p);
    const auto ic = perturbed_initial_data(p, eq, {0.5, 20.0}, SystemKind::Original);
    IntegrationOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-11;
    const Trajectory tr = integrate_sdd(ic.data, ic.tau0, p, 200.0, opt);
    REQUIRE(tr.ok());
    oracle::ConstantDelayRk4 rk(
        [&](const oracle::ConstantDelayRk4::State& x, const oracle::ConstantDelayRk4::State& xd) {
            return rhs_constant_delay(x, xd, p);
        },
        ic.data.value, p.eps, 1200);
    rk.run(200.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const auto ref = rk.at(tr.times[i]);
        worst = std::max(worst, std::abs(tr.states[i][0] - ref[0]));
        worst = std::max(worst, std::abs(tr.states[i][1] - ref[1]) / 100.0);
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("The unit-delay integrator matches constant-delay RK4", "[simulate][oracle]") {
    const ModelParams p = hes1_params(0.01, 6.0);
    const Equilibrium eq = hes1_eq(p);
    const auto ic = perturbed_initial_data(p, eq, {0.5, 20.0}, SystemKind::Transformed);
    IntegrationOptions opt;
    opt.rtol = 1e-11;
    opt.atol = 1e-11;
    const Trajectory tr = integrate_transformed(ic.data, p, 60.0, opt);
    REQUIRE(tr.ok());
    oracle::ConstantDelayRk4 rk(
        [&](const oracle::ConstantDelayRk4::State& x, const oracle::ConstantDelayRk4::State& xd) {
            return rhs_transformed(x, xd, p).derivative;
        },
        ic.data.value, 1.0, 1000);
    rk.run(60.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        const auto ref = rk.at(tr.times[i]);
        worst = std::max(worst, std::abs(tr.states[i][0] - ref[0]));
    }
    CHECK(worst < 1e-6);
    // The recorded delay is k = eps + c (r - r(eta - 1)).
    CHECK_THAT(tr.delay.back(), WithinRel(p.eps + p.c * (tr.states.back()[0] - rk.at(60.0 - 1.0)[0]), 1e-6));
}

TEST_CASE("Hes1 runs keep the invariants", "[simulate][property]") {
    for (double c : {0.01, 0.02}) {
        for (double de : {-0.1, 0.1}) {
            const ModelParams p = hes1_params(c, 6.8621624565 + de);
            const Equilibrium eq = hes1_eq(p);
            for (double s : {0.1, 0.5, 0.9}) {
                const auto ic = perturbed_initial_data(p, eq, {-s * eq.r_star, 0.0}, SystemKind::Original);
                const Trajectory tr = integrate_sdd(ic.data, ic.tau0, p, 2000.0, {});
                INFO("c " << c << " eps offset " << de << " s " << s);
                REQUIRE(tr.ok());
                CHECK(tr.monitors.positive);
                CHECK(tr.monitors.slope_ok);
                CHECK(tr.monitors.min_tau > 0.0);
                CHECK(tr.monitors.max_xdot < std::min(1.0 / c, 35.0));
                CHECK(tr.monitors.max_threshold_residual <= 1e-12);
            }
        }
    }
}

TEST_CASE("Slope-bound breach stops the run", "[simulate]") {
    const ModelParams p = hes1_params(0.05, 6.0);
    const Equilibrium eq = hes1_eq(p);
    const auto ic = perturbed_initial_data(p, eq, {-11.0, -2900.0}, SystemKind::Original);
    const Trajectory tr = integrate_sdd(ic.data, ic.tau0, p, 100.0, {});
    CHECK(tr.status == RunStatus::B2Violation);
    CHECK_FALSE(tr.ok());
    CHECK_THROWS_AS(perturbed_initial_data(p, eq, {-11.0, -2900.0}, SystemKind::Transformed), Error);
}

TEST_CASE("Unit-delay runs need a unit of history", "[simulate]") {
    const ModelParams p = hes1_params(0.01, 6.0);
    const Equilibrium eq = hes1_eq(p);
    const auto short_data = constant_initial_data({eq.r_star, eq.xi_star}, 0.5);
    try {
        integrate_transformed(short_data, p, 10.0, {});
        FAIL("expected HistoryTooShort");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::HistoryTooShort);
    }
}

TEST_CASE("Equilibrium data stays at equilibrium", "[simulate]") {
    const ModelParams p = hes1_params(0.01, 6.0);
    const Equilibrium eq = hes1_eq(p);
    const auto data = constant_initial_data({eq.r_star, eq.xi_star}, 3.0 * p.eps);
    const Trajectory tr = integrate_sdd(data, p.eps, p, 500.0, {});
    REQUIRE(tr.ok());
    CHECK_THAT(tr.states.back()[0], WithinRel(eq.r_star, 1e-9));
    CHECK_THAT(tr.states.back()[1], WithinRel(eq.xi_star, 1e-9));
    CHECK_THAT(tr.delay.back(), WithinRel(p.eps, 1e-12));
}

TEST_CASE("Bump initial data is C1 with the requested slope", "[simulate]") {
    const auto d = bump_initial_data({1.0, 2.0}, {3.0, -4.0}, 0.5, 2.0);
    CHECK(d.value(0.0) == State2{1.0, 2.0});
    CHECK(d.value(-0.5) == State2{1.0, 2.0});
    CHECK(d.value(-1.5) == State2{1.0, 2.0});
    CHECK_THAT(d.derivative(0.0)[0], WithinRel(3.0, 1e-15));
    CHECK_THAT(d.derivative(0.0)[1], WithinRel(-4.0, 1e-15));
    CHECK_THAT(d.derivative(-0.5)[0], WithinAbs(0.0, 1e-14));
    const double h = 1e-6;
    for (double s : {-0.4, -0.25, -0.1}) {
        const double fd = (d.value(s + h)[0] - d.value(s - h)[0]) / (2.0 * h);
        CHECK_THAT(d.derivative(s)[0], WithinAbs(fd, 1e-8));
    }
    CHECK_THROWS_AS(bump_initial_data({0.0, 0.0}, {1.0, 1.0}, 3.0, 2.0), Error);
}

TEST_CASE("Trajectory CSV has the system's header", "[simulate]") {
    const ModelParams p = hes1_params(0.01, 6.0);
    const Equilibrium eq = hes1_eq(p);
    const auto ic = perturbed_initial_data(p, eq, {0.5, 0.0}, SystemKind::Transformed);
    IntegrationOptions opt;
    opt.sample_dt = 1.0;
    const Trajectory tr = integrate_transformed(ic.data, p, 5.0, opt);
    std::ostringstream os;
    write_csv(tr, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "eta,r,xi,k");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == static_cast<int>(tr.times.size()));
    CHECK(tr.times.size() == 6);
}
