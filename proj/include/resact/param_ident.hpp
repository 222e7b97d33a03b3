#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "resact/optimize.hpp"
#include "resact/thermal_circuit.hpp"

namespace resact {

enum class RecordKind { Oven, ConstantSpeed, PulseSpin };

const char* to_string(RecordKind kind);
RecordKind record_kind_from_string(const std::string& name);

struct ResistanceSample {
    double temperature_c;
    double resistance_ohm;
};

/// One bench experiment. Only the case temperature is measured; `trace` carries
/// time_s and t_case_c, the other columns stay empty.
struct ExperimentRecord {
    std::string name;
    RecordKind kind = RecordKind::PulseSpin;
    double speed_rad_s = 0.0;
    double pulse_current_a = 0.0;
    double pulse_duration_s = 0.0;
    bool heatsink = false;
    ThermalTrace trace;
    std::vector<ResistanceSample> oven_samples;  // kind == Oven only

    void validate() const;
};

struct AlphaFit {
    double r0_ohm;
    double alpha_per_c;
    double r_squared;
};

/// Least squares on R(T) = R0 (1 + alpha (T - T0)). Needs >= 3 samples spanning >= 20 C.
AlphaFit fit_alpha(std::span<const ResistanceSample> samples, double t0_c = 25.0);

struct BushingFit {
    double slope_w_per_rad_s;
    double r_squared;
};

/// Regresses steady case rise against speed over constant-speed records; at steady
/// state the rise is m * omega * R_ca, so m = slope / R_ca. A record counts as
/// settled when its last 10% of samples has standard deviation < 0.2 K.
BushingFit fit_bushing_slope(std::span<const ExperimentRecord> records, const ThermalParams& params);

struct SettlingPoint {
    double speed_rad_s;
    double settling_time_s;  // measured from the end of the pulse
};

/// Settling of each pulse-spin record's cooling leg to within band_c of its own tail mean.
std::vector<SettlingPoint> extract_settling_times(std::span<const ExperimentRecord> records, double band_c);

/// Current/speed schedule that reproduces a record's protocol.
OperatingProfile record_profile(const ExperimentRecord& record);

/// Sum over records and samples of (model case - measured case)^2, model resampled onto
/// the measurement timestamps by linear interpolation. The integration step is the
/// stability bound, refined so pulse ends and sample instants stay on the grid.
double fitness(const ThermalParams& params, std::span<const ExperimentRecord> records);

struct ParamBound {
    double lower;
    double upper;
};

struct FitBounds {
    ParamBound r12;
    ParamBound r4;
    ParamBound rfin;
    ParamBound c1;
    ParamBound c23;

    /// Resistances in [1, estimate], capacitances estimate * (1 -/+ capacitance_fraction).
    static FitBounds from_estimates(const ThermalParams& estimates, double rfin_estimate,
                                    double capacitance_fraction = 0.2);
    void validate() const;
};

/// Bushing slope as an affine function of R4, clamped at zero.
struct BushingExpression {
    double intercept_w_per_rad_s = 0.0;
    double slope_per_k_per_w = 0.0;

    double operator()(double r4_k_per_w) const;
};

struct FitOptions {
    optim::GaConfig ga;
    bool polish = true;
    optim::NelderMeadConfig polish_config;
    std::optional<BushingExpression> bushing_of_r4;
    double fin_c23_factor = 2.0;
    double speed_tolerance_rad_s = 1e-6;
};

struct SpeedFit {
    double speed_rad_s;
    double r12_k_per_w;
    double r4_k_per_w;
    double c1_j_per_k;
    double c23_j_per_k;
    double sse;
    double sse_at_estimates;
};

struct LineFit {
    double intercept;
    double slope;  // in the R12 convention: R12 = intercept - slope * omega
    double r_squared;
};

struct DatasetSse {
    std::string name;
    double sse;
};

struct FitResult {
    ThermalParams tuned;
    std::vector<SpeedFit> per_speed;
    LineFit r12_line{};
    std::vector<DatasetSse> per_dataset_sse;
    double total_sse = 0.0;
    double total_sse_at_estimates = 0.0;
    std::size_t generations = 0;
    std::size_t evaluations = 0;
    std::uint64_t seed = 0;
    bool no_improvement = false;
};

/// Per-speed optimisation of {R12, R4, C1, C23} on motor-only pulse-spin records,
/// averaging R4/C1/C23 across speeds and fitting the per-speed R12 values to a line.
/// Groups run in ascending speed; a stall group's R12 is then used for the stall pulse
/// of the spinning records, whose fitted R12 applies to the spin leg only.
/// Heatsink records, when present, are fitted afterwards for Rfin alone with the
/// motor parameters held and C23 scaled by fin_c23_factor.
FitResult fit_parameters(std::span<const ExperimentRecord> records, const ThermalParams& estimates,
                         const FitBounds& bounds, const FitOptions& options);

/// Ordinary least squares y = a + b x with coefficient of determination.
struct Regression {
    double intercept;
    double slope;
    double r_squared;
};
Regression linear_regression(std::span<const double> x, std::span<const double> y);

/// Simulated bench record: pulse at pulse_current_a for pulse_duration_s at stall, then
/// spin unpowered at speed until total_duration_s, sampled every sample_dt_s.
/// Gaussian noise of noise_sigma_c is added when nonzero.
struct SyntheticRecordSpec {
    std::string name;
    RecordKind kind = RecordKind::PulseSpin;
    double speed_rad_s = 0.0;
    double pulse_current_a = 0.57;
    double pulse_duration_s = 5.0;
    double total_duration_s = 600.0;
    double sample_dt_s = 0.5;
    double sim_dt_s = 0.01;
    double noise_sigma_c = 0.0;
    std::uint64_t noise_seed = 1;
    bool heatsink = false;
};

ExperimentRecord synthesize_record(const ThermalParams& truth, const SyntheticRecordSpec& request);

}  // namespace resact
