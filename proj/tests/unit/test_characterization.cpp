#include <doctest.h>

#include <cmath>
#include <vector>

#include "resact/characterization.hpp"
#include "resact/errors.hpp"

using namespace resact;

namespace {

constexpr double kDeg = M_PI / 180.0;

MotionTrace sinusoid(double amplitude_rad, double f, double rate, double seconds, double phase = 0.0) {
    MotionTrace t;
    t.sample_rate_hz = rate;
    const auto n = static_cast<std::size_t>(std::lround(seconds * rate)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double time = static_cast<double>(i) / rate;
        t.time_s.push_back(time);
        t.position_rad.push_back(amplitude_rad * std::sin(2.0 * M_PI * f * time + phase));
    }
    return t;
}

// Initial state on the steady periodic orbit, so runs start without a transient.
ActuatorState steady_start(const ActuatorParams& p, double amplitude_v, double f) {
    const double w = 2.0 * M_PI * f;
    const double gain = p.gear_ratio * p.gearbox_efficiency * p.torque_constant_n_m_per_a / p.winding_resistance_ohm;
    const double re = p.spring_stiffness_n_m_per_rad - p.effective_inertia() * w * w;
    const double im = p.total_damping() * w;
    const double mag = gain * amplitude_v / std::hypot(re, im);
    const double phi = std::atan2(im, re);
    return {mag * std::sin(-phi), mag * w * std::cos(-phi)};
}

}  // namespace

TEST_CASE("differentiation of a constant is zero") {
    MotionTrace t;
    t.sample_rate_hz = 100.0;
    for (int i = 0; i < 20; ++i) {
        t.time_s.push_back(i / 100.0);
        t.position_rad.push_back(0.7);
    }
    const MotionTrace d = differentiate_trace(t);
    for (double v : *d.velocity_rad_s) CHECK(v == doctest::Approx(0.0));
    for (double a : *d.accel_rad_s2) CHECK(a == doctest::Approx(0.0));
}

TEST_CASE("differentiation is exact for quadratics") {
    MotionTrace t;
    const double dt = 0.01;
    t.sample_rate_hz = 1.0 / dt;
    for (int i = 0; i < 50; ++i) {
        t.time_s.push_back(i * dt);
        t.position_rad.push_back((i * dt) * (i * dt));
    }
    const MotionTrace d = differentiate_trace(t);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK((*d.accel_rad_s2)[i] == doctest::Approx(2.0).epsilon(1e-8));
        CHECK((*d.velocity_rad_s)[i] == doctest::Approx(2.0 * t.time_s[i]).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("peak acceleration of a sampled sinusoid") {
    const MotionTrace d = differentiate_trace(sinusoid(1.35, 20.0, 2000.0, 0.5));
    double peak = 0.0;
    for (double a : *d.accel_rad_s2) peak = std::max(peak, std::abs(a));
    CHECK(peak == doctest::Approx(1.35 * std::pow(2.0 * M_PI * 20.0, 2)).epsilon(1e-3));
    CHECK(peak == doctest::Approx(2.132e4).epsilon(1e-3));
}

TEST_CASE("re-integrating the derivative recovers position to second order") {
    auto err = [](double rate) {
        const MotionTrace t = sinusoid(1.0, 5.0, rate, 0.6, 0.3);
        const MotionTrace d = differentiate_trace(t);
        double x = t.position_rad.front(), worst = 0.0;
        const auto& v = *d.velocity_rad_s;
        for (std::size_t i = 1; i < t.size(); ++i) {
            x += 0.5 * (v[i - 1] + v[i]) / rate;
            worst = std::max(worst, std::abs(x - t.position_rad[i]));
        }
        return worst;
    };
    const double e1 = err(500.0), e2 = err(1000.0);
    CHECK(e1 < 5e-3);
    CHECK(e1 / e2 > 3.5);
}

TEST_CASE("differentiation preconditions and smoothing") {
    MotionTrace t = sinusoid(1.0, 20.0, 2000.0, 0.001);
    CHECK(t.size() < 5);
    CHECK_THROWS_AS(differentiate_trace(t), InsufficientData);
    MotionTrace s = sinusoid(1.0, 20.0, 2000.0, 0.2);
    CHECK_THROWS_AS(differentiate_trace(s, 4), InvalidInput);
    const MotionTrace sm = differentiate_trace(s, 5);
    double peak = 0.0;
    for (double a : *sm.accel_rad_s2) peak = std::max(peak, std::abs(a));
    CHECK(peak == doctest::Approx(std::pow(2.0 * M_PI * 20.0, 2)).epsilon(0.02));
}

TEST_CASE("inverse dynamics") {
    const MotionTrace d = differentiate_trace(sinusoid(1.35, 20.0, 2000.0, 0.5));
    const InverseDynamics id = inverse_dynamics(d, 5.57e-7);
    double peak = 0.0, mean_power = 0.0;
    for (double tq : id.torque_n_m) peak = std::max(peak, std::abs(tq));
    for (std::size_t i = 0; i + 1 < id.power_w.size(); ++i) mean_power += id.power_w[i];
    mean_power /= static_cast<double>(id.power_w.size() - 1);
    CHECK(peak == doctest::Approx(11.87e-3).epsilon(2e-3));
    CHECK(std::abs(mean_power) < 1e-6 * peak * 1.35 * 2.0 * M_PI * 20.0);
    CHECK_THROWS_AS(inverse_dynamics(d, 0.0), InvalidInput);

    MotionTrace flat = sinusoid(0.0, 20.0, 2000.0, 0.1);
    const InverseDynamics z = inverse_dynamics(differentiate_trace(flat), 5.57e-7);
    for (double tq : z.torque_n_m) CHECK(tq == 0.0);
}

TEST_CASE("rms and input power") {
    std::vector<double> v(100, 4.70), i(100, 0.222);
    CHECK(input_power(v, i) == doctest::Approx(1.0434));
    std::vector<double> zero(10, 0.0);
    CHECK(rms(zero) == 0.0);
    std::vector<double> s;
    for (int k = 0; k < 1000; ++k) s.push_back(std::sin(2.0 * M_PI * k / 1000.0));
    CHECK(rms(s) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
    std::vector<double> empty;
    CHECK_THROWS_AS(rms(empty), InsufficientData);
    std::vector<double> short_i(5, 1.0);
    CHECK_THROWS_AS(input_power(v, short_i), InvalidInput);
}

TEST_CASE("efficiency") {
    CHECK(efficiency(1.0, 1.0) == 1.0);
    CHECK(efficiency(1.004, 1.043) == doctest::Approx(0.9627).epsilon(1e-4));
    CHECK(efficiency(0.0, 2.0) == 0.0);
    CHECK(efficiency(1.05, 1.0) == doctest::Approx(1.05));
    CHECK_THROWS_AS(efficiency(1.0, 0.0), InvalidInput);
    CHECK_THROWS_AS(efficiency(1.0, -1.0), InvalidInput);
}

TEST_CASE("effective speed") {
    CHECK(effective_speed_rpm(sinusoid(0.5 * 154.7 * kDeg, 20.0, 20000.0, 1.0), 20.0) ==
          doctest::Approx(1031.0).epsilon(1.0 / 1031.0));
    CHECK(effective_speed_rpm(sinusoid(0.5 * 126.2 * kDeg, 20.0, 20000.0, 1.0), 20.0) ==
          doctest::Approx(841.0).epsilon(1.0 / 841.0));
    CHECK(effective_speed_rpm(sinusoid(0.0, 20.0, 2000.0, 1.0), 20.0) == 0.0);
}

TEST_CASE("effective speed is phase and sign invariant and scales with frequency") {
    const double a = 0.8;
    const double base = effective_speed_rpm(sinusoid(a, 20.0, 20000.0, 1.0), 20.0);
    CHECK(effective_speed_rpm(sinusoid(a, 20.0, 20000.0, 1.0, 1.1), 20.0) == doctest::Approx(base).epsilon(1e-4));
    CHECK(effective_speed_rpm(sinusoid(-a, 20.0, 20000.0, 1.0), 20.0) == doctest::Approx(base).epsilon(1e-4));
    CHECK(effective_speed_rpm(sinusoid(a, 40.0, 40000.0, 1.0), 40.0) == doctest::Approx(2.0 * base).epsilon(1e-4));
    CHECK_THROWS_AS(effective_speed_rpm(sinusoid(a, 20.0, 20000.0, 0.02), 20.0), InsufficientData);
}

TEST_CASE("density metrics") {
    TrialMetrics m;
    m.peak_torque_n_m = 11.87e-3;
    m.mech_power_avg_w = 1.282;
    const DensityMetrics d = density_metrics(m, 1.316e-3);
    CHECK(d.torque_density_n_m_per_kg == doctest::Approx(9.02).epsilon(0.01 / 9.02));
    CHECK(d.power_density_w_per_kg == doctest::Approx(974.0).epsilon(1.0 / 974.0));
    const DensityMetrics unit = density_metrics(m, 1.0);
    CHECK(unit.torque_density_n_m_per_kg == m.peak_torque_n_m);
    CHECK(unit.power_density_w_per_kg == m.mech_power_avg_w);
    CHECK_THROWS_AS(density_metrics(m, 0.0), InvalidInput);
}

TEST_CASE("trial metrics agree with the simulator energy audit") {
    const ActuatorParams p;
    const double f = 20.0, amplitude = 1.0;
    const SinusoidalDrive drive{amplitude, f, 3.8, 0.0};
    const ActuatorRun run = simulate_actuator(p, drive, 1.0 / (200.0 * f), steady_start(p, amplitude, f));
    CharacterizationOptions o;
    o.frequency_hz = f;
    o.load_inertia_kg_m2 = p.load_inertia_kg_m2;
    o.damping_n_m_s_per_rad = p.viscous_damping_n_m_s_per_rad;
    MotionTrace kinematics = run.motion;
    kinematics.velocity_rad_s.reset();
    kinematics.accel_rad_s2.reset();
    const TrialMetrics m = characterize_trial(kinematics, run.electrical, o);
    const double duration = drive.duration_s;
    CHECK(m.n_cycles_used == 76);
    CHECK(m.mech_power_avg_w == doctest::Approx(run.audit.friction_loss_j / duration).epsilon(0.01));
    CHECK(m.rms_voltage_v == doctest::Approx(amplitude / std::sqrt(2.0)).epsilon(1e-3));
    CHECK(m.efficiency >= 0.0);
    CHECK(m.efficiency <= 1.1);
    CHECK(m.effective_speed_rpm == doctest::Approx(2.0 * m.pk_pk_amplitude_deg * f / 6.0).epsilon(1e-3));
}

TEST_CASE("lossless inertial load averages to zero mechanical power") {
    MotionTrace t = differentiate_trace(sinusoid(1.0, 20.0, 4000.0, 4.0));
    ElectricalTrace e;
    e.time_s = t.time_s;
    e.voltage_v.assign(t.size(), 1.0);
    e.current_a.assign(t.size(), 0.1);
    CharacterizationOptions o;
    const TrialMetrics m = characterize_trial(t, e, o);
    const InverseDynamics id = inverse_dynamics(t, o.load_inertia_kg_m2);
    double signed_mean = 0.0;
    const std::size_t per_cycle = 200;
    const std::size_t n = 76 * per_cycle;
    for (std::size_t i = t.size() - 1 - n; i < t.size() - 1; ++i) signed_mean += id.power_w[i];
    signed_mean /= static_cast<double>(n);
    CHECK(std::abs(signed_mean) < 1e-6 * m.mech_power_avg_w);
    CHECK(m.mech_power_avg_w > 0.0);
}
