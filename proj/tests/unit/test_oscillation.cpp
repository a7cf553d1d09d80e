#include <cmath>
#include <numbers>
#include <vector>

#include "catch_amalgamated.hpp"
#include "sddhopf/oscillation.hpp"

using namespace sddhopf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

void sample(double amp, double period, double decay, double offset, double dt, double t_end, std::vector<double>& t,
            std::vector<double>& v) {
    for (double s = 0.0; s <= t_end; s += dt) {
        t.push_back(s);
        v.push_back(offset + amp * std::exp(-decay * s) * std::sin(2.0 * std::numbers::pi * s / period + 0.3));
    }
}

}  // namespace

TEST_CASE("Sustained sinusoid", "[oscillation]") {
    std::vector<double> t, v;
    sample(2.5, 13.3, 0.0, 12.0, 0.05, 400.0, t, v);
    OscillationOptions opt;
    opt.reference = 12.0;
    const auto s = measure_oscillation(t, v, opt);
    CHECK_THAT(s.amplitude, WithinRel(2.5, 1e-4));
    CHECK_THAT(s.period, WithinRel(13.3, 1e-4));
    CHECK_THAT(s.decay_rate, WithinAbs(0.0, 1e-6));
}

TEST_CASE("Damped and growing sinusoids", "[oscillation]") {
    for (double rate : {0.01, -0.002}) {
        std::vector<double> t, v;
        sample(1.0, 20.0, rate, 0.0, 0.05, 500.0, t, v);
        OscillationOptions opt;
        opt.reference = 0.0;
        const auto s = measure_oscillation(t, v, opt);
        CHECK_THAT(s.decay_rate, WithinRel(rate, 2e-3));
        CHECK_THAT(s.period, WithinRel(20.0, 1e-3));
    }
}

TEST_CASE("Window and reference defaults", "[oscillation]") {
    std::vector<double> t, v;
    sample(1.0, 10.0, 0.0, 5.0, 0.01, 200.0, t, v);
    OscillationOptions opt;
    opt.t_min = 100.0;
    const auto s = measure_oscillation(t, v, opt);
    CHECK_THAT(s.reference, WithinAbs(5.0, 1e-2));
    CHECK(s.extrema >= 19);
    CHECK(s.extrema <= 21);
}

TEST_CASE("Too few extrema is reported", "[oscillation]") {
    std::vector<double> t, v;
    for (int i = 0; i < 100; ++i) {
        t.push_back(i);
        v.push_back(std::exp(-0.1 * i));
    }
    try {
        measure_oscillation(t, v, {});
        FAIL("expected InsufficientCycles");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientCycles);
    }
    CHECK_THROWS_AS(measure_oscillation({1.0, 2.0}, {1.0}, {}), Error);
}
