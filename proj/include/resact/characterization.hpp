#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "resact/motor_model.hpp"

namespace resact {

/// Fills velocity and acceleration by finite differences: central in the interior,
/// second-order one-sided at the ends. `smoothing_window` > 1 applies a centred
/// moving average (odd width) to position first.
MotionTrace differentiate_trace(const MotionTrace& trace, std::size_t smoothing_window = 1);

struct InverseDynamics {
    std::vector<double> torque_n_m;
    std::vector<double> power_w;
};

/// torque = J * accel, power = torque * velocity.
InverseDynamics inverse_dynamics(const MotionTrace& trace, double load_inertia_kg_m2);

double rms(std::span<const double> series);

/// rms(V) * rms(I).
double input_power(std::span<const double> voltage_v, std::span<const double> current_a);

/// Raw ratio, not clamped; noisy measurements may exceed one.
double efficiency(double mech_power_avg_w, double input_power_w);

/// Total angular travel per cycle times frequency, in rpm, over the complete cycles
/// of the trace. For a sinusoid this is 2 * pk-pk * f.
double effective_speed_rpm(const MotionTrace& trace, double frequency_hz);

struct TrialMetrics {
    double rms_voltage_v = 0.0;
    double rms_current_a = 0.0;
    double input_power_w = 0.0;
    double peak_torque_n_m = 0.0;
    double mech_power_avg_w = 0.0;
    double efficiency = 0.0;
    double pk_pk_amplitude_deg = 0.0;
    double effective_speed_rpm = 0.0;
    std::size_t n_cycles_used = 0;
};

struct DensityMetrics {
    double mass_kg = 0.0;
    double power_density_w_per_kg = 0.0;
    double torque_density_n_m_per_kg = 0.0;
};

DensityMetrics density_metrics(const TrialMetrics& metrics, double actuator_mass_kg);

struct CharacterizationOptions {
    double frequency_hz = 20.0;
    double load_inertia_kg_m2 = 5.57e-7;
    std::size_t max_cycles = 76;
    std::size_t smoothing_window = 1;
    /// Output-side viscous damping of the model the trace came from. When set,
    /// mechanical power is the mean of b * omega^2 (power delivered against losses);
    /// otherwise the mean of |J * accel * omega| from the measured kinematics.
    std::optional<double> damping_n_m_s_per_rad;
};

/// Metrics over the trailing `max_cycles` complete cycles (or all complete cycles).
/// Velocity and acceleration are differentiated from position when absent.
TrialMetrics characterize_trial(const MotionTrace& motion, const ElectricalTrace& electrical,
                                const CharacterizationOptions& options);

}  // namespace resact
