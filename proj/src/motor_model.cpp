#include "resact/motor_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "resact/errors.hpp"
#include "resact/quadrature.hpp"
#include "resact/rk4.hpp"

namespace resact {

double ActuatorParams::effective_inertia() const {
    return load_inertia_kg_m2 + gear_ratio * gear_ratio * rotor_inertia_kg_m2;
}

double ActuatorParams::electrical_damping() const {
    return gear_ratio * gear_ratio * gearbox_efficiency * torque_constant_n_m_per_a *
           backemf_constant_v_s_per_rad / winding_resistance_ohm;
}

double ActuatorParams::total_damping() const {
    return viscous_damping_n_m_s_per_rad + electrical_damping();
}

double ActuatorParams::natural_frequency_hz() const {
    return std::sqrt(spring_stiffness_n_m_per_rad / effective_inertia()) / (2.0 * std::numbers::pi);
}

double ActuatorParams::envelope_time_constant_s() const {
    const double b = total_damping();
    return b > 0.0 ? 2.0 * effective_inertia() / b : INFINITY;
}

void ActuatorParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidInput(std::string("actuator: ") + name + " must be positive and finite");
        }
    };
    positive(winding_resistance_ohm, "winding resistance");
    positive(rotor_inertia_kg_m2, "rotor inertia");
    positive(load_inertia_kg_m2, "load inertia");
    positive(spring_stiffness_n_m_per_rad, "spring stiffness");
    if (!(torque_constant_n_m_per_a >= 0.0) || !(backemf_constant_v_s_per_rad >= 0.0)) {
        throw InvalidInput("actuator: motor constants must be non-negative");
    }
    if (!(gear_ratio >= 1.0)) throw InvalidInput("actuator: gear ratio must be >= 1");
    if (!(gearbox_efficiency > 0.0 && gearbox_efficiency <= 1.0)) {
        throw InvalidInput("actuator: gearbox efficiency must be in (0, 1]");
    }
    if (!(viscous_damping_n_m_s_per_rad >= 0.0)) {
        throw InvalidInput("actuator: viscous damping must be non-negative");
    }
    const double j = effective_inertia();
    if (!(j > 0.0) || !std::isfinite(j)) throw InvalidInput("actuator: effective inertia not finite");
}

double SinusoidalDrive::voltage(double t) const {
    return amplitude_v * std::sin(2.0 * std::numbers::pi * frequency_hz * t + phase_rad);
}

void SinusoidalDrive::validate() const {
    if (!(amplitude_v >= 0.0)) throw InvalidInput("drive: amplitude must be >= 0");
    if (!(frequency_hz > 0.0)) throw InvalidInput("drive: frequency must be > 0");
    if (!(duration_s > 0.0)) throw InvalidInput("drive: duration must be > 0");
}

void MotionTrace::validate() const {
    const std::size_t n = time_s.size();
    if (position_rad.size() != n || (velocity_rad_s && velocity_rad_s->size() != n) ||
        (accel_rad_s2 && accel_rad_s2->size() != n)) {
        throw InvalidInput("motion trace: arrays must have equal length");
    }
    if (n < 2) return;
    const double h = time_s[1] - time_s[0];
    if (!(h > 0.0)) throw InvalidInput("motion trace: time must be increasing");
    for (std::size_t i = 1; i < n; ++i) {
        const double hi = time_s[i] - time_s[i - 1];
        if (std::abs(hi - h) > 1e-6 * h + 1e-12 * std::abs(time_s[i])) {
            throw InvalidInput("motion trace: non-uniform time step at sample " + std::to_string(i));
        }
    }
}

double ActuatorEnergyAudit::residual_j() const {
    return electrical_in_j - joule_loss_j - friction_loss_j - conversion_loss_j - delta_mechanical_j;
}

double ActuatorEnergyAudit::relative_residual() const {
    const double scale = std::max({std::abs(electrical_in_j), std::abs(joule_loss_j),
                                   std::abs(friction_loss_j), std::abs(conversion_loss_j),
                                   std::abs(initial_mechanical_j),
                                   std::abs(initial_mechanical_j + delta_mechanical_j)});
    return scale > 0.0 ? std::abs(residual_j()) / scale : 0.0;
}

ActuatorRun simulate_actuator(const ActuatorParams& params, const SinusoidalDrive& drive, double dt,
                              ActuatorState initial) {
    params.validate();
    drive.validate();
    if (!(dt > 0.0)) throw InvalidInput("simulate_actuator: dt must be > 0");
    if (dt > (1.0 + 1e-9) / (100.0 * drive.frequency_hz)) {
        throw InvalidInput("simulate_actuator: dt must be <= 1/(100 f) to resolve the drive cycle");
    }

    const double j_eff = params.effective_inertia();
    const double k = params.spring_stiffness_n_m_per_rad;
    const double b = params.viscous_damping_n_m_s_per_rad;
    const double n_gear = params.gear_ratio;
    const double r0 = params.winding_resistance_ohm;
    const double kt_out = n_gear * params.gearbox_efficiency * params.torque_constant_n_m_per_a;
    const double ke_out = n_gear * params.backemf_constant_v_s_per_rad;

    auto current = [&](double t, double velocity) { return (drive.voltage(t) - ke_out * velocity) / r0; };
    auto rhs = [&](double t, const StateVector<2>& y) -> StateVector<2> {
        const double i = current(t, y[1]);
        return {y[1], (kt_out * i - b * y[1] - k * y[0]) / j_eff};
    };

    const auto steps = static_cast<std::size_t>(std::ceil(drive.duration_s / dt - 1e-9));
    ActuatorRun run;
    MotionTrace& m = run.motion;
    ElectricalTrace& e = run.electrical;
    m.sample_rate_hz = 1.0 / dt;
    m.time_s.reserve(steps + 1);
    m.position_rad.reserve(steps + 1);
    std::vector<double> vel, acc;
    vel.reserve(steps + 1);
    acc.reserve(steps + 1);

    StateVector<2> y{initial.position_rad, initial.velocity_rad_s};
    auto record = [&](std::size_t idx, const StateVector<2>& s) {
        const double t = static_cast<double>(idx) * dt;
        const double i = current(t, s[1]);
        m.time_s.push_back(t);
        m.position_rad.push_back(s[0]);
        vel.push_back(s[1]);
        acc.push_back(rhs(t, s)[1]);
        e.time_s.push_back(t);
        e.voltage_v.push_back(drive.voltage(t));
        e.current_a.push_back(i);
    };
    record(0, y);
    for (std::size_t idx = 0; idx < steps; ++idx) {
        const double t = static_cast<double>(idx) * dt;
        y = rk4_step<2>(rhs, t, y, dt);
        if (!all_finite(y)) throw IntegrationFailure("actuator state diverged", t + dt);
        record(idx + 1, y);
    }

    const std::size_t n = m.size();
    std::vector<double> p_in(n), p_joule(n), p_friction(n), p_conversion(n);
    const double ke_minus = (params.backemf_constant_v_s_per_rad -
                             params.gearbox_efficiency * params.torque_constant_n_m_per_a) * n_gear;
    for (std::size_t i = 0; i < n; ++i) {
        const double cur = e.current_a[i];
        p_in[i] = e.voltage_v[i] * cur;
        p_joule[i] = cur * cur * r0;
        p_friction[i] = b * vel[i] * vel[i];
        p_conversion[i] = ke_minus * vel[i] * cur;
    }
    auto mech = [&](std::size_t i) {
        return 0.5 * j_eff * vel[i] * vel[i] + 0.5 * k * m.position_rad[i] * m.position_rad[i];
    };
    ActuatorEnergyAudit& a = run.audit;
    a.electrical_in_j = simpson(p_in, dt);
    a.joule_loss_j = simpson(p_joule, dt);
    a.friction_loss_j = simpson(p_friction, dt);
    a.conversion_loss_j = simpson(p_conversion, dt);
    a.initial_mechanical_j = mech(0);
    a.delta_mechanical_j = mech(n - 1) - mech(0);

    m.velocity_rad_s = std::move(vel);
    m.accel_rad_s2 = std::move(acc);
    return run;
}

std::vector<SweepPoint> frequency_sweep(const ActuatorParams& params, double drive_amplitude_v,
                                        double f_min_hz, double f_max_hz, std::size_t n_points,
                                        const SweepOptions& options) {
    params.validate();
    if (!(f_min_hz > 0.0) || !(f_min_hz < f_max_hz)) {
        throw InvalidInput("frequency_sweep: require 0 < f_min < f_max");
    }
    if (n_points < 2) throw InvalidInput("frequency_sweep: n_points must be >= 2");
    if (options.samples_per_cycle < 100) throw InvalidInput("frequency_sweep: need >= 100 samples per cycle");

    const double tau = params.envelope_time_constant_s();
    std::vector<SweepPoint> out;
    out.reserve(n_points);
    for (std::size_t p = 0; p < n_points; ++p) {
        const double f = f_min_hz + (f_max_hz - f_min_hz) * static_cast<double>(p) /
                                        static_cast<double>(n_points - 1);
        double cycles = static_cast<double>(options.min_cycles);
        if (std::isfinite(tau)) cycles = std::max(cycles, std::ceil(options.envelope_constants * tau * f));
        SinusoidalDrive drive{drive_amplitude_v, f, cycles / f, 0.0};
        const double dt = 1.0 / (static_cast<double>(options.samples_per_cycle) * f);
        const ActuatorRun run = simulate_actuator(params, drive, dt);
        const auto& pos = run.motion.position_rad;
        const auto tail = pos.begin() + static_cast<std::ptrdiff_t>(pos.size() / 2);
        const auto [lo, hi] = std::minmax_element(tail, pos.end());
        out.push_back({f, *hi - *lo});
    }
    return out;
}

std::size_t startup_cycles(const MotionTrace& trace, double tolerance_fraction) {
    trace.validate();
    if (!(tolerance_fraction >= 0.0)) throw InvalidInput("startup_cycles: tolerance must be >= 0");
    const auto& p = trace.position_rad;
    const std::size_t n = p.size();
    if (n < 4) throw InsufficientData("startup_cycles: trace shorter than one cycle");

    const std::size_t tail_start = n - std::max<std::size_t>(n / 5, 2);
    const auto [lo, hi] = std::minmax_element(p.begin() + static_cast<std::ptrdiff_t>(tail_start), p.end());
    const double mid = 0.5 * (*lo + *hi);

    std::vector<std::size_t> bounds;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (p[i] <= mid && p[i + 1] > mid) bounds.push_back(i);
    }
    if (bounds.size() < 2) throw InsufficientData("startup_cycles: trace shorter than one cycle");
    if (bounds.front() > 0) bounds.insert(bounds.begin(), 0);
    if (bounds.size() < 2) throw InsufficientData("startup_cycles: trace shorter than one cycle");

    std::vector<double> amplitude;
    for (std::size_t c = 0; c + 1 < bounds.size(); ++c) {
        const auto first = p.begin() + static_cast<std::ptrdiff_t>(bounds[c]);
        const auto last = p.begin() + static_cast<std::ptrdiff_t>(bounds[c + 1]) + 1;
        const auto [clo, chi] = std::minmax_element(first, last);
        amplitude.push_back(0.5 * (*chi - *clo));
    }
    const std::size_t tail_cycles = std::min<std::size_t>(5, amplitude.size());
    double final_amp = 0.0;
    for (std::size_t c = amplitude.size() - tail_cycles; c < amplitude.size(); ++c) final_amp += amplitude[c];
    final_amp /= static_cast<double>(tail_cycles);

    std::size_t settled_from = amplitude.size();
    for (std::size_t c = amplitude.size(); c-- > 0;) {
        if (std::abs(amplitude[c] - final_amp) > tolerance_fraction * final_amp) break;
        settled_from = c;
    }
    return settled_from;
}

}  // namespace resact
