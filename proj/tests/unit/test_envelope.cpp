#include <doctest.h>

#include <cmath>

#include "resact/errors.hpp"
#include "resact/thermal_circuit.hpp"

using namespace resact;

namespace {

OperatingProfile hold(double i, double w, double t0 = 25.0) {
    OperatingProfile p;
    p.initial_winding_c = t0;
    p.initial_case_c = t0;
    p.segments.push_back({1.0, i, w});
    return p;
}

ThermalTrace decay(double tau, double dt0, double seconds, double dt) {
    ThermalTrace t;
    const auto n = static_cast<std::size_t>(std::lround(seconds / dt)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double time = static_cast<double>(i) * dt;
        t.time_s.push_back(time);
        t.t_case_c.push_back(25.0 + dt0 * std::exp(-time / tau));
    }
    return t;
}

ThermalParams calibrated() {
    ThermalParams p;
    const HoverCalibration c = calibrate_hover(p, 0.24, 88.06, 41.0);
    p.r0_ohm = c.r0_ohm;
    p.bushing_slope_w_per_rad_s = c.bushing_slope_w_per_rad_s;
    return p;
}

}  // namespace

TEST_CASE("threshold below the initial temperature is reached at once") {
    const auto t = time_to_threshold(ThermalParams{}, hold(0.1, 0.0, 40.0), 30.0, ThermalNode::Case, 0.01);
    REQUIRE(t);
    CHECK(*t == 0.0);
}

TEST_CASE("threshold above the held steady state is never reached") {
    const ThermalParams p;
    const SteadyState s = steady_state(p, 0.1, 0.0);
    CHECK_FALSE(time_to_threshold(p, hold(0.1, 0.0), s.case_c + 0.5, ThermalNode::Case, 0.01));
    CHECK(time_to_threshold(p, hold(0.1, 0.0), s.case_c - 0.5, ThermalNode::Case, 0.01));
    CHECK_FALSE(time_to_threshold(p, hold(0.0, 0.0), 80.0, ThermalNode::Winding, 0.01));
}

TEST_CASE("threshold crossings are interpolated") {
    const ThermalParams p;
    const auto coarse = time_to_threshold(p, hold(0.3, 0.0), 60.0, ThermalNode::Winding, 0.05);
    const auto fine = time_to_threshold(p, hold(0.3, 0.0), 60.0, ThermalNode::Winding, 0.0125);
    REQUIRE(coarse);
    REQUIRE(fine);
    CHECK(*coarse == doctest::Approx(*fine).epsilon(1e-4));
}

TEST_CASE("time to limit falls with current at fixed speed") {
    const ThermalParams p = calibrated();
    double previous = INFINITY;
    for (double i : {0.2, 0.24, 0.28, 0.32, 0.4}) {
        const auto t = time_to_threshold(p, hold(i, 88.06), 80.0, ThermalNode::Case, 0.01);
        REQUIRE(t);
        CHECK(*t < previous);
        previous = *t;
    }
}

TEST_CASE("settling time of a trace already inside the band is zero") {
    const ThermalTrace t = decay(10.0, 1.0, 50.0, 0.1);
    CHECK(settling_time(t, 25.0, 2.0) == 0.0);
}

TEST_CASE("settling time of an exponential decay") {
    const double tau = 40.0;
    const ThermalTrace t = decay(tau, 55.0, 400.0, 0.01);
    CHECK(settling_time(t, 25.0, 2.0) == doctest::Approx(tau * std::log(27.5)).epsilon(1e-5));
    CHECK(settling_time(t, 25.0, 2.0) == doctest::Approx(3.314 * tau).epsilon(1e-3));
}

TEST_CASE("unsettled traces report the distance left") {
    const ThermalTrace t = decay(40.0, 55.0, 50.0, 0.1);
    try {
        settling_time(t, 25.0, 2.0);
        FAIL("expected NotSettled");
    } catch (const NotSettled& e) {
        CHECK(e.final_distance() == doctest::Approx(55.0 * std::exp(-50.0 / 40.0)).epsilon(1e-9));
    }
}

TEST_CASE("hover calibration reaches the case limit at 41 s") {
    const ThermalParams nominal;
    const HoverCalibration c = calibrate_hover(nominal, 0.24, 88.06, 41.0);
    CHECK(c.r0_adjusted);
    CHECK(c.bushing_slope_w_per_rad_s == 0.0);
    CHECK(c.r0_ohm < 12.5);
    const HeatCoolResult r = heat_then_cool(calibrated(), 0.24, 88.06);
    REQUIRE(r.time_to_limit_s);
    CHECK(*r.time_to_limit_s == doctest::Approx(41.0).epsilon(1e-4));
    REQUIRE(r.cooling_settling_s);
    CHECK(r.peak_gap_c > 0.0);
    CHECK(r.peak_winding_c > 80.0);
}

TEST_CASE("a shorter target is met with bushing heat at nominal R0") {
    const ThermalParams nominal;
    const HoverCalibration c = calibrate_hover(nominal, 0.24, 88.06, 30.0);
    CHECK_FALSE(c.r0_adjusted);
    CHECK(c.r0_ohm == 12.5);
    CHECK(c.bushing_slope_w_per_rad_s > 0.0);
    ThermalParams p = nominal;
    p.bushing_slope_w_per_rad_s = c.bushing_slope_w_per_rad_s;
    const auto t = time_to_threshold(p, hold(0.24, 88.06), 80.0, ThermalNode::Case, 0.01);
    REQUIRE(t);
    CHECK(*t == doctest::Approx(30.0).epsilon(1e-4));
    CHECK_THROWS_AS(calibrate_hover(nominal, 0.24, 88.06, -1.0), InvalidInput);
}

TEST_CASE("a heatsink in parallel slows heating") {
    ThermalParams p = calibrated();
    const HeatCoolResult bare = heat_then_cool(p, 0.24, 88.06);
    p.rfin_k_per_w = 467.38;
    p.c23_j_per_k *= 2.0;
    const HeatCoolResult fin = heat_then_cool(p, 0.24, 88.06);
    REQUIRE(fin.time_to_limit_s);
    CHECK(*fin.time_to_limit_s > *bare.time_to_limit_s);
}

TEST_CASE("archimedes number") {
    CHECK(archimedes_number(9.81, 1.0 / 300.0, 0.0, 0.01, 2.0) == 0.0);
    const double a = archimedes_number(9.81, 1.0 / 300.0, 30.0, 0.01, 2.0);
    CHECK(a == doctest::Approx(9.81 / 300.0 * 30.0 * 0.01 / 4.0));
    CHECK(archimedes_number(9.81, 1.0 / 300.0, 30.0, 0.01, 4.0) == doctest::Approx(a / 4.0));
    CHECK_THROWS_AS(archimedes_number(9.81, 1.0 / 300.0, 30.0, 0.01, 0.0), InvalidInput);
}
