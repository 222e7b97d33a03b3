#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "resact/characterization.hpp"
#include "resact/heatsink.hpp"
#include "resact/motor_model.hpp"
#include "resact/optimize.hpp"
#include "resact/param_ident.hpp"
#include "resact/thermal_circuit.hpp"

namespace resact::cli {

struct SimulationSettings {
    double dt_s = 0.01;
    double case_limit_c = 80.0;
    double winding_limit_c = 105.0;
    double band_c = 2.0;
    double max_cooling_s = 5000.0;
};

struct HoverSettings {
    double current_a = 0.24;
    double speed_rad_s = 88.06;
    double target_time_s = 41.0;
};

struct EnvelopeSettings {
    std::vector<double> currents_a{0.0, 0.12, 0.24, 0.36};
    std::vector<double> speeds_rad_s{0.0, 51.3, 88.06, 142.7};
};

struct SweepSettings {
    double drive_amplitude_v = 1.0;
    double f_min_hz = 10.0;
    double f_max_hz = 30.0;
    std::size_t n_points = 41;
};

struct ActuatorRunSettings {
    double amplitude_v = 1.0;
    double frequency_hz = 20.0;
    double duration_s = 5.0;
    double dt_s = 1.0e-4;
};

struct FitSettings {
    double rfin_estimate_k_per_w = 9.88;
    double capacitance_fraction = 0.2;
    std::optional<FitBounds> bounds;  // derived from the estimates when absent
    std::optional<BushingExpression> bushing_of_r4;
    double fin_c23_factor = 2.0;
    bool polish = true;
};

/// Everything a command can read from the JSON config. Every block is optional and
/// falls back to the defaults of the owning module.
struct ProjectConfig {
    ThermalParams thermal;
    double c23_with_fin_j_per_k = 0.762;
    ActuatorParams actuator;
    double actuator_mass_kg = 1.316e-3;
    ActuatorRunSettings actuator_run;
    CharacterizationOptions characterization;
    optim::GaConfig optimizer;
    optim::NelderMeadConfig polish;
    FitSettings fit;
    HeatsinkProblem heatsink;
    SimulationSettings simulation;
    HoverSettings hover;
    EnvelopeSettings envelope;
    SweepSettings sweep;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw InvalidInput.
ProjectConfig parse_config(const std::string& json_text, const std::string& source = "<config>");
ProjectConfig load_config(const std::filesystem::path& path);

OperatingProfile parse_profile(const std::string& json_text, const std::string& source = "<profile>");
OperatingProfile load_profile(const std::filesystem::path& path);

/// Field reference printed by --help: one line per key with its unit.
std::string config_reference();

}  // namespace resact::cli
