#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "resact/errors.hpp"
#include "resact/motor_model.hpp"

using namespace resact;

namespace {

ActuatorParams sample() { return {}; }

SinusoidalDrive drive_at(double f, double amplitude, double seconds) { return {amplitude, f, seconds, 0.0}; }

// Steady amplitude from the linear transfer function of the model.
double analytic_amplitude(const ActuatorParams& p, double amplitude_v, double f) {
    const double w = 2.0 * M_PI * f;
    const double gain = p.gear_ratio * p.gearbox_efficiency * p.torque_constant_n_m_per_a / p.winding_resistance_ohm;
    const double re = p.spring_stiffness_n_m_per_rad - p.effective_inertia() * w * w;
    const double im = p.total_damping() * w;
    return gain * amplitude_v / std::hypot(re, im);
}

MotionTrace envelope_trace(double tau_cycles, std::size_t cycles, std::size_t samples_per_cycle) {
    MotionTrace t;
    t.sample_rate_hz = static_cast<double>(samples_per_cycle);
    const std::size_t n = cycles * samples_per_cycle + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = static_cast<double>(i) / static_cast<double>(samples_per_cycle);
        t.time_s.push_back(c);
        t.position_rad.push_back((1.0 - std::exp(-c / tau_cycles)) * std::sin(2.0 * M_PI * c));
    }
    return t;
}

}  // namespace

TEST_CASE("sample actuator derived quantities") {
    const ActuatorParams p = sample();
    CHECK(p.effective_inertia() == doctest::Approx(5.57e-7 + 625.0 * 9.328e-10));
    CHECK(p.effective_inertia() == doctest::Approx(1.14e-6).epsilon(1e-3));
    CHECK(p.natural_frequency_hz() == doctest::Approx(20.0).epsilon(1e-3));
    CHECK(p.electrical_damping() == doctest::Approx(625.0 * 0.6 * 1e-6 / 12.5));
    CHECK(p.total_damping() == doctest::Approx(p.electrical_damping() + 3e-6));
    CHECK(p.envelope_time_constant_s() == doctest::Approx(2.0 * p.effective_inertia() / p.total_damping()));
}

TEST_CASE("actuator parameter validation") {
    ActuatorParams p;
    p.gear_ratio = 0.5;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    p = {};
    p.gearbox_efficiency = 1.2;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    p = {};
    p.load_inertia_kg_m2 = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    p = {};
    p.winding_resistance_ohm = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidInput);
    SinusoidalDrive d{1.0, 0.0, 1.0, 0.0};
    CHECK_THROWS_AS(d.validate(), InvalidInput);
}

TEST_CASE("time step precondition is enforced") {
    CHECK_THROWS_AS(simulate_actuator(sample(), drive_at(20.0, 1.0, 0.1), 1.0 / 1000.0), InvalidInput);
    CHECK_NOTHROW(simulate_actuator(sample(), drive_at(20.0, 1.0, 0.1), 1.0 / 2000.0));
}

TEST_CASE("zero input stays at equilibrium") {
    const ActuatorRun run = simulate_actuator(sample(), drive_at(20.0, 0.0, 0.5), 1e-4);
    for (double x : run.motion.position_rad) REQUIRE(x == 0.0);
    for (double i : run.electrical.current_a) REQUIRE(i == 0.0);
}

TEST_CASE("current matches voltage and back-EMF at every sample") {
    const ActuatorParams p = sample();
    const ActuatorRun run = simulate_actuator(p, drive_at(20.0, 1.5, 0.3), 5e-5);
    const auto& v = *run.motion.velocity_rad_s;
    for (std::size_t i = 0; i < run.electrical.size(); i += 97) {
        const double expected = (run.electrical.voltage_v[i] - p.backemf_constant_v_s_per_rad * p.gear_ratio * v[i]) /
                                p.winding_resistance_ohm;
        CHECK(run.electrical.current_a[i] == doctest::Approx(expected).epsilon(1e-12));
    }
    CHECK(run.motion.size() == run.electrical.size());
    CHECK(run.motion.time_s.back() == doctest::Approx(0.3));
}

TEST_CASE("undamped ring-down matches the harmonic oscillator") {
    ActuatorParams p = sample();
    p.viscous_damping_n_m_s_per_rad = 0.0;
    p.torque_constant_n_m_per_a = 0.0;
    p.backemf_constant_v_s_per_rad = 0.0;
    const double w = 2.0 * M_PI * p.natural_frequency_hz();
    const double dt = 1e-4;
    const ActuatorRun run = simulate_actuator(p, drive_at(20.0, 0.0, 0.5), dt, {0.1, 0.0});
    double max_err = 0.0;
    for (std::size_t i = 0; i < run.motion.size(); ++i) {
        max_err = std::max(max_err, std::abs(run.motion.position_rad[i] - 0.1 * std::cos(w * run.motion.time_s[i])));
    }
    CHECK(max_err < 1e-7);

    // mechanical energy conserved to integrator order
    const double e0 = run.audit.initial_mechanical_j;
    CHECK(std::abs(run.audit.delta_mechanical_j) < 1e-8 * e0);
}

TEST_CASE("resonant drive beats half-resonant drive") {
    const ActuatorParams p = sample();
    const auto sweep_hi = frequency_sweep(p, 1.0, 19.99, 20.0, 2);
    const auto sweep_lo = frequency_sweep(p, 1.0, 9.99, 10.0, 2);
    CHECK(sweep_hi[1].pk_pk_amplitude_rad > sweep_lo[1].pk_pk_amplitude_rad);
}

TEST_CASE("sweep amplitudes follow the linear transfer function") {
    const ActuatorParams p = sample();
    const auto curve = frequency_sweep(p, 1.0, 10.0, 30.0, 5);
    for (const auto& pt : curve) {
        CHECK(pt.pk_pk_amplitude_rad == doctest::Approx(2.0 * analytic_amplitude(p, 1.0, pt.frequency_hz)).epsilon(0.01));
    }
}

TEST_CASE("sweep peak lies within one grid step of 20 Hz") {
    const auto curve = frequency_sweep(sample(), 1.0, 10.0, 30.0, 41);
    const auto best = std::max_element(curve.begin(), curve.end(), [](const SweepPoint& a, const SweepPoint& b) {
        return a.pk_pk_amplitude_rad < b.pk_pk_amplitude_rad;
    });
    CHECK(std::abs(best->frequency_hz - 20.0) <= 0.5 + 1e-9);
    for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].frequency_hz > curve[i - 1].frequency_hz);
}

TEST_CASE("sweep is linear in drive amplitude and its argmax is scale invariant") {
    const ActuatorParams p = sample();
    const auto a = frequency_sweep(p, 1.0, 15.0, 25.0, 11);
    const auto b = frequency_sweep(p, 2.0, 15.0, 25.0, 11);
    std::size_t ia = 0, ib = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(b[i].pk_pk_amplitude_rad == doctest::Approx(2.0 * a[i].pk_pk_amplitude_rad).epsilon(1e-9));
        if (a[i].pk_pk_amplitude_rad > a[ia].pk_pk_amplitude_rad) ia = i;
        if (b[i].pk_pk_amplitude_rad > b[ib].pk_pk_amplitude_rad) ib = i;
    }
    CHECK(ia == ib);
}

TEST_CASE("two nearly equal frequencies give nearly equal amplitudes") {
    const auto c = frequency_sweep(sample(), 1.0, 17.0, 17.0001, 2);
    CHECK(c[0].pk_pk_amplitude_rad == doctest::Approx(c[1].pk_pk_amplitude_rad).epsilon(1e-3));
    CHECK_THROWS_AS(frequency_sweep(sample(), 1.0, 20.0, 10.0, 5), InvalidInput);
    CHECK_THROWS_AS(frequency_sweep(sample(), 1.0, 10.0, 20.0, 1), InvalidInput);
}

TEST_CASE("position lags the drive by 90 degrees at resonance") {
    const ActuatorParams p = sample();
    const double f = p.natural_frequency_hz();
    const double seconds = std::ceil(10.0 * p.envelope_time_constant_s() * f) / f;
    const double dt = 1.0 / (400.0 * f);
    const ActuatorRun run = simulate_actuator(p, drive_at(f, 1.0, seconds), dt);
    // project the last 10 cycles on sin and cos of the drive
    const std::size_t per_cycle = 400;
    const std::size_t n = run.motion.size();
    double s = 0.0, c = 0.0;
    for (std::size_t i = n - 1 - 10 * per_cycle; i < n - 1; ++i) {
        const double ph = 2.0 * M_PI * f * run.motion.time_s[i];
        s += run.motion.position_rad[i] * std::sin(ph);
        c += run.motion.position_rad[i] * std::cos(ph);
    }
    const double lag_deg = -std::atan2(c, s) * 180.0 / M_PI;
    CHECK(lag_deg == doctest::Approx(90.0).epsilon(2.0 / 90.0));
}

TEST_CASE("energy audit closes and its residual falls with dt^4") {
    const ActuatorParams p = sample();
    const SinusoidalDrive d = drive_at(20.0, 1.0, 0.5);
    const double dt0 = 1.0 / (100.0 * 20.0);
    const double r1 = std::abs(simulate_actuator(p, d, dt0).audit.residual_j());
    const double r2 = std::abs(simulate_actuator(p, d, dt0 / 2).audit.residual_j());
    const double r3 = std::abs(simulate_actuator(p, d, dt0 / 4).audit.residual_j());
    CHECK(simulate_actuator(p, d, dt0).audit.relative_residual() < 0.005);
    CHECK(std::log2(r1 / r2) == doctest::Approx(4.0).epsilon(0.15));
    CHECK(std::log2(r2 / r3) == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("conversion loss vanishes for an ideal gearbox with matched constants") {
    ActuatorParams p = sample();
    p.gearbox_efficiency = 1.0;
    const ActuatorRun run = simulate_actuator(p, drive_at(20.0, 1.0, 0.2), 1e-4);
    CHECK(run.audit.conversion_loss_j == doctest::Approx(0.0));
    CHECK(run.audit.relative_residual() < 1e-6);
}

TEST_CASE("startup cycles of a pure sinusoid is zero") {
    MotionTrace t;
    t.sample_rate_hz = 1000.0;
    for (int i = 0; i <= 20000; ++i) {
        t.time_s.push_back(i / 1000.0);
        t.position_rad.push_back(0.3 * std::sin(2.0 * M_PI * 20.0 * i / 1000.0));
    }
    CHECK(startup_cycles(t, 0.05) == 0);
}

TEST_CASE("startup cycles of a saturating envelope") {
    // tau = 3 periods, 5 %: the envelope crosses 95 % after 3 ln 20 = 8.99 periods
    CHECK(startup_cycles(envelope_trace(3.0, 60, 400), 0.05) == 9);
}

TEST_CASE("more damping means fewer startup cycles") {
    ActuatorParams light = sample();
    ActuatorParams heavy = sample();
    heavy.viscous_damping_n_m_s_per_rad = 3e-5;
    auto cycles = [](const ActuatorParams& p) {
        const double seconds = std::ceil(12.0 * p.envelope_time_constant_s() * 20.0) / 20.0;
        return startup_cycles(simulate_actuator(p, drive_at(20.0, 1.0, seconds), 1.0 / 4000.0).motion, 0.05);
    };
    CHECK(cycles(heavy) < cycles(light));
}

TEST_CASE("startup cycles needs at least one cycle") {
    MotionTrace t;
    t.sample_rate_hz = 100.0;
    for (int i = 0; i < 10; ++i) {
        t.time_s.push_back(i / 100.0);
        t.position_rad.push_back(0.01 * i);
    }
    CHECK_THROWS_AS(startup_cycles(t, 0.05), InsufficientData);
}
