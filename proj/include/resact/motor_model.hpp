#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace resact {

/// DC gearmotor with a torsional spring in parallel on the output shaft, driving an
/// inertial load. Output-side quantities unless stated otherwise.
struct ActuatorParams {
    double winding_resistance_ohm = 12.5;
    double torque_constant_n_m_per_a = 1.0e-3;      // motor side
    double backemf_constant_v_s_per_rad = 1.0e-3;   // motor side
    double gear_ratio = 25.0;                       // motor revolutions per output revolution
    double gearbox_efficiency = 0.6;                // applied to torque only
    double rotor_inertia_kg_m2 = 9.328e-10;         // motor side
    double spring_stiffness_n_m_per_rad = 0.018;
    double load_inertia_kg_m2 = 5.57e-7;
    double viscous_damping_n_m_s_per_rad = 3.0e-6;

    /// J_load + N^2 * J_rotor.
    double effective_inertia() const;
    /// Velocity-proportional torque from back-EMF through the winding resistance.
    double electrical_damping() const;
    double total_damping() const;
    /// Undamped natural frequency of the spring/inertia pair.
    double natural_frequency_hz() const;
    /// Time constant of the free-decay envelope, 2 J_eff / b_total.
    double envelope_time_constant_s() const;

    void validate() const;
};

struct SinusoidalDrive {
    double amplitude_v = 0.0;
    double frequency_hz = 20.0;
    double duration_s = 1.0;
    double phase_rad = 0.0;

    double voltage(double t) const;
    void validate() const;
};

struct ActuatorState {
    double position_rad = 0.0;
    double velocity_rad_s = 0.0;
};

/// Uniformly sampled load kinematics.
struct MotionTrace {
    std::vector<double> time_s;
    std::vector<double> position_rad;
    std::optional<std::vector<double>> velocity_rad_s;
    std::optional<std::vector<double>> accel_rad_s2;
    double sample_rate_hz = 0.0;

    std::size_t size() const { return time_s.size(); }
    double step() const { return 1.0 / sample_rate_hz; }
    /// Checks equal lengths and a constant, positive time step.
    void validate() const;
};

struct ElectricalTrace {
    std::vector<double> time_s;
    std::vector<double> voltage_v;
    std::vector<double> current_a;

    std::size_t size() const { return time_s.size(); }
};

/// Energy bookkeeping over a simulated interval, all in joules.
///
/// electrical_in = joule + friction + conversion + delta_mechanical, where
/// conversion = integral of (Ke - eta*Kt) * N * omega * i, the power lost between
/// back-EMF and delivered output torque (zero for an ideal gearbox with Kt == Ke).
struct ActuatorEnergyAudit {
    double electrical_in_j = 0.0;
    double joule_loss_j = 0.0;
    double friction_loss_j = 0.0;
    double conversion_loss_j = 0.0;
    double delta_mechanical_j = 0.0;
    double initial_mechanical_j = 0.0;

    double residual_j() const;
    /// Residual relative to the largest energy flow in the audit.
    double relative_residual() const;
};

struct ActuatorRun {
    MotionTrace motion;
    ElectricalTrace electrical;
    ActuatorEnergyAudit audit;
};

/// Integrates J_eff*x'' + b*x' + k*x = N*eta*Kt*i with i = (V - Ke*N*x')/R0 by
/// fixed-step RK4. Requires dt <= 1/(100 f). Position, velocity and acceleration are
/// all filled from the model state.
ActuatorRun simulate_actuator(const ActuatorParams& params, const SinusoidalDrive& drive, double dt,
                              ActuatorState initial = {});

struct SweepPoint {
    double frequency_hz;
    double pk_pk_amplitude_rad;
};

struct SweepOptions {
    std::size_t samples_per_cycle = 200;
    std::size_t min_cycles = 20;
    double envelope_constants = 5.0;
};

/// Steady-state peak-to-peak amplitude over a frequency grid. Each point simulates
/// max(min_cycles, envelope_constants * tau) and measures over the second half.
std::vector<SweepPoint> frequency_sweep(const ActuatorParams& params, double drive_amplitude_v,
                                        double f_min_hz, double f_max_hz, std::size_t n_points,
                                        const SweepOptions& options = {});

/// Number of leading cycles whose amplitude is outside tolerance_fraction of the
/// final amplitude. Cycles are delimited by upward crossings of the tail midline.
std::size_t startup_cycles(const MotionTrace& trace, double tolerance_fraction);

}  // namespace resact
