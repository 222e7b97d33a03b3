#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace resact {

/// Unit of the speed argument of the R12(omega) line.
enum class SpeedUnit { RadPerSecond, Rpm };

/// Constants of the two-node network: winding node (C1) coupled through R12(omega)
/// to the case+magnet node (C23), which drains to ambient through R4, optionally in
/// parallel with a heatsink resistance Rfin. Temperatures in degrees Celsius.
struct ThermalParams {
    double r12_intercept_k_per_w = 33.29;
    double r12_slope_k_per_w = 0.034;  // per unit of r12_speed_unit; positive lowers R12 with speed
    double r12_floor_k_per_w = 1.0;
    SpeedUnit r12_speed_unit = SpeedUnit::RadPerSecond;
    double r4_k_per_w = 154.76;
    std::optional<double> rfin_k_per_w;
    double c1_j_per_k = 0.057;
    double c23_j_per_k = 0.381;
    double r0_ohm = 12.5;
    double alpha_per_c = 3.42e-3;
    double t0_c = 25.0;
    double bushing_slope_w_per_rad_s = 0.0;
    double t_ambient_c = 25.0;

    void validate() const;
};

struct ProfileSegment {
    double duration_s = 0.0;
    double current_a = 0.0;
    double speed_rad_s = 0.0;
};

/// Piecewise-constant (current, speed) schedule and the initial node temperatures.
struct OperatingProfile {
    std::vector<ProfileSegment> segments;
    double initial_winding_c = 25.0;
    double initial_case_c = 25.0;

    double duration_s() const;
    void validate() const;
};

struct ThermalTrace {
    std::vector<double> time_s;
    std::vector<double> t_winding_c;
    std::vector<double> t_case_c;
    std::vector<double> q_joule_w;
    std::vector<double> q_bushing_w;

    std::size_t size() const { return time_s.size(); }
};

enum class ThermalNode { Winding, Case };

/// I^2 R0 (1 + alpha (T_w - T0)).
double joule_heat(double current_a, double t_winding_c, const ThermalParams& params);

/// m * omega, injected at the case node.
double bushing_heat(double speed_rad_s, const ThermalParams& params);

/// max(floor, intercept - slope * omega), omega converted to the configured unit.
double r12_at_speed(double speed_rad_s, const ThermalParams& params);

/// R4, or R4 in parallel with Rfin when a heatsink is attached.
double case_ambient_resistance(const ThermalParams& params);

/// Largest step accepted by simulate(): min(C1 * R12, C23 * R_ca) / 20 with R12 the
/// smallest clamped value the profile visits.
double max_stable_step(const ThermalParams& params, const OperatingProfile& profile);

/// Fixed-step RK4 integration of
///   C1  dTw/dt = Qj(I, Tw) - (Tw - Tc) / R12(omega)
///   C23 dTc/dt = (Tw - Tc) / R12(omega) + m omega - (Tc - Tamb) / R_ca
/// Every segment duration must be an integer multiple of dt, so that segment
/// boundaries fall on samples.
ThermalTrace simulate(const ThermalParams& params, const OperatingProfile& profile, double dt);

struct SteadyState {
    double winding_c;
    double case_c;
};

/// I^2 R0 alpha (R12 + R_ca): the fraction of a winding temperature rise that is fed
/// back as extra Joule heat. A bounded steady state exists only below one.
double self_heating_loop_gain(const ThermalParams& params, double current_a, double speed_rad_s);

/// Analytic fixed point for constant inputs. Throws ThermalRunaway when the loop gain
/// is >= 1.
SteadyState steady_state(const ThermalParams& params, double current_a, double speed_rad_s);

/// Eigenvalues (1/s, negative when stable) of the linear network at constant inputs,
/// including the Joule feedback. Ordered slow first.
std::pair<double, double> network_eigenvalues(const ThermalParams& params, double current_a,
                                              double speed_rad_s);

/// First time the node reaches threshold_c, by linear interpolation between samples.
/// The final segment is held beyond the end of the profile; std::nullopt means the
/// threshold is never reached (held steady state below it).
std::optional<double> time_to_threshold(const ThermalParams& params, const OperatingProfile& profile,
                                        double threshold_c, ThermalNode node, double dt);

/// Time since trace start at which the case temperature enters |T - target| <= band
/// for the last time (interpolated). Throws NotSettled when the trace ends outside.
double settling_time(const ThermalTrace& trace, double target_c, double band_c);

/// Gr / Re^2 = g beta dT L / v^2.
double archimedes_number(double g_m_s2, double beta_per_k, double delta_t_k, double length_m,
                         double velocity_m_s);

/// Heat balance over a simulated trace, by Simpson quadrature on the samples:
/// heat_in - heat_out = stored.
struct ThermalEnergyAudit {
    double heat_in_j = 0.0;
    double heat_out_j = 0.0;
    double stored_j = 0.0;

    double residual_j() const { return heat_in_j - heat_out_j - stored_j; }
    double relative_residual() const;
};

ThermalEnergyAudit energy_audit(const ThermalParams& params, const OperatingProfile& profile,
                                const ThermalTrace& trace);

/// Heat at constant (current, speed) until the case reaches the limit, then cool with
/// both inputs off; the operating-limit protocol used for envelope studies.
struct HeatCoolOptions {
    double case_limit_c = 80.0;
    double band_c = 2.0;
    double dt_s = 0.01;
    double max_cooling_s = 5000.0;
};

struct HeatCoolResult {
    std::optional<double> time_to_limit_s;
    std::optional<double> cooling_settling_s;  // measured from the end of heating
    double peak_gap_c = 0.0;                   // max (Tw - Tc) during heating
    double peak_winding_c = 0.0;
    ThermalTrace heating;
    ThermalTrace cooling;
};

HeatCoolResult heat_then_cool(const ThermalParams& params, double current_a, double speed_rad_s,
                              const HeatCoolOptions& options = {});

/// Winding resistance and bushing slope chosen so that heating at (current, speed)
/// first reaches the case limit at target_time_s.
struct HoverCalibration {
    double r0_ohm;
    double bushing_slope_w_per_rad_s;
    bool r0_adjusted;  // true when m would have had to go negative at the nominal R0
};

/// Holds R0 at its nominal value and solves m; if that needs m < 0, fixes m = 0 and
/// solves R0 instead. Throws InvalidInput when no non-negative pair reaches the target.
HoverCalibration calibrate_hover(const ThermalParams& params, double current_a, double speed_rad_s,
                                 double target_time_s, const HeatCoolOptions& options = {});

}  // namespace resact
