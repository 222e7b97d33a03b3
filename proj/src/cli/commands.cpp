#include "resact/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "resact/characterization.hpp"
#include "resact/cli_config.hpp"
#include "resact/csv_io.hpp"
#include "resact/errors.hpp"
#include "resact/heatsink.hpp"
#include "resact/motor_model.hpp"
#include "resact/param_ident.hpp"
#include "resact/thermal_circuit.hpp"

namespace resact::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// JSON numbers carry the same nine significant digits as the CSV files.
ordered_json num(double v) {
    if (!std::isfinite(v)) return io::format_number(v);
    return io::parse_number(io::format_number(v));
}

ordered_json opt_num(const std::optional<double>& v) { return v ? num(*v) : ordered_json("inf"); }

std::string csv_opt(const std::optional<double>& v) { return v ? io::format_number(*v) : "inf"; }

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json thermal_json(const ThermalParams& t) {
    ordered_json j;
    j["r12_intercept_k_per_w"] = num(t.r12_intercept_k_per_w);
    j["r12_slope_k_per_w_per_speed"] = num(t.r12_slope_k_per_w);
    j["r12_speed_unit"] = t.r12_speed_unit == SpeedUnit::Rpm ? "rpm" : "rad_per_s";
    j["r12_floor_k_per_w"] = num(t.r12_floor_k_per_w);
    j["r4_k_per_w"] = num(t.r4_k_per_w);
    j["rfin_k_per_w"] = t.rfin_k_per_w ? num(*t.rfin_k_per_w) : ordered_json(nullptr);
    j["c1_j_per_k"] = num(t.c1_j_per_k);
    j["c23_j_per_k"] = num(t.c23_j_per_k);
    j["r0_ohm"] = num(t.r0_ohm);
    j["alpha_per_c"] = num(t.alpha_per_c);
    j["t0_c"] = num(t.t0_c);
    j["bushing_slope_w_per_rad_s"] = num(t.bushing_slope_w_per_rad_s);
    return j;
}

HeatCoolOptions heat_cool_options(const ProjectConfig& c) {
    return {c.simulation.case_limit_c, c.simulation.band_c, c.simulation.dt_s, c.simulation.max_cooling_s};
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(io::parse_number(item));
        } catch (const InvalidInput&) {
            throw InvalidInput(what + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw InvalidInput(what + ": empty list");
    return out;
}

// Runs work(i) for i in [0, n) on up to `jobs` threads; results stay indexed.
template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F work) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(jobs);
    for (unsigned j = 0; j < jobs; ++j) {
        threads.emplace_back([&, j] {
            try {
                for (std::size_t i = j; i < n; i += jobs) work(i);
            } catch (...) {
                errors[j] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct Common {
    std::string config_path;
    unsigned jobs = 1;

    ProjectConfig load() const {
        ProjectConfig c = config_path.empty() ? parse_config("{}") : load_config(config_path);
        c.optimizer.jobs = jobs;
        return c;
    }
};

void add_common(CLI::App* sub, Common& common) {
    sub->add_option("--config", common.config_path, "Project config JSON (see 'resact config-help')");
    sub->add_option("--jobs", common.jobs, "Worker threads; results do not depend on it")->check(CLI::Range(1u, 256u));
}

int cmd_simulate(const Common& common, const std::string& profile_path, const std::string& out) {
    const ProjectConfig c = common.load();
    const OperatingProfile profile = load_profile(profile_path);
    const ThermalTrace trace = simulate(c.thermal, profile, c.simulation.dt_s);
    io::write_text_atomic(out, io::thermal_to_csv(trace));

    const double peak_w = *std::max_element(trace.t_winding_c.begin(), trace.t_winding_c.end());
    const double peak_c = *std::max_element(trace.t_case_c.begin(), trace.t_case_c.end());
    std::optional<double> t_limit;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        const double a = trace.t_case_c[i - 1], b = trace.t_case_c[i];
        if (a < c.simulation.case_limit_c && b >= c.simulation.case_limit_c) {
            const double f = (c.simulation.case_limit_c - a) / (b - a);
            t_limit = trace.time_s[i - 1] + f * (trace.time_s[i] - trace.time_s[i - 1]);
            break;
        }
    }
    if (!t_limit && trace.t_case_c.front() >= c.simulation.case_limit_c) t_limit = trace.time_s.front();
    std::cout << "samples: " << trace.size() << "\n"
              << "peak_winding_c: " << io::format_number(peak_w) << "\n"
              << "peak_case_c: " << io::format_number(peak_c) << "\n"
              << "time_to_case_limit_s: " << (t_limit ? io::format_number(*t_limit) : "not reached") << "\n";
    return kOk;
}

ordered_json fit_json(const FitResult& r) {
    ordered_json j;
    j["seed"] = r.seed;
    j["no_improvement"] = r.no_improvement;
    j["tuned"] = thermal_json(r.tuned);
    j["r12_line"] = {{"intercept_k_per_w", num(r.r12_line.intercept)},
                     {"slope_k_per_w_per_speed", num(r.r12_line.slope)},
                     {"r_squared", num(r.r12_line.r_squared)}};
    ordered_json speeds = ordered_json::array();
    for (const auto& s : r.per_speed) {
        speeds.push_back({{"speed_rad_s", num(s.speed_rad_s)},
                          {"r12_k_per_w", num(s.r12_k_per_w)},
                          {"r4_k_per_w", num(s.r4_k_per_w)},
                          {"c1_j_per_k", num(s.c1_j_per_k)},
                          {"c23_j_per_k", num(s.c23_j_per_k)},
                          {"sse_c2", num(s.sse)},
                          {"sse_at_estimates_c2", num(s.sse_at_estimates)}});
    }
    j["per_speed"] = speeds;
    ordered_json sets = ordered_json::array();
    for (const auto& d : r.per_dataset_sse) sets.push_back({{"name", d.name}, {"sse_c2", num(d.sse)}});
    j["per_dataset_sse"] = sets;
    j["total_sse_c2"] = num(r.total_sse);
    j["total_sse_at_estimates_c2"] = num(r.total_sse_at_estimates);
    j["generations"] = r.generations;
    j["evaluations"] = r.evaluations;
    return j;
}

int cmd_fit(const Common& common, const std::string& records_dir, const std::string& out) {
    const ProjectConfig c = common.load();
    const std::vector<ExperimentRecord> records = io::read_record_dir(records_dir);

    ThermalParams estimates = c.thermal;
    ordered_json extra;
    std::vector<ResistanceSample> oven;
    for (const auto& r : records) {
        if (r.kind == RecordKind::Oven) oven.insert(oven.end(), r.oven_samples.begin(), r.oven_samples.end());
    }
    if (!oven.empty()) {
        const AlphaFit a = fit_alpha(oven, estimates.t0_c);
        estimates.r0_ohm = a.r0_ohm;
        estimates.alpha_per_c = a.alpha_per_c;
        extra["alpha_fit"] = {{"r0_ohm", num(a.r0_ohm)}, {"alpha_per_c", num(a.alpha_per_c)}, {"r_squared", num(a.r_squared)}};
    }

    const FitBounds bounds = c.fit.bounds ? *c.fit.bounds
                                          : FitBounds::from_estimates(estimates, c.fit.rfin_estimate_k_per_w,
                                                                      c.fit.capacitance_fraction);
    FitOptions options;
    options.ga = c.optimizer;
    options.polish = c.fit.polish;
    options.polish_config = c.polish;
    options.bushing_of_r4 = c.fit.bushing_of_r4;
    options.fin_c23_factor = c.fit.fin_c23_factor;
    ThermalParams start = estimates;
    if (!start.rfin_k_per_w) start.rfin_k_per_w = c.fit.rfin_estimate_k_per_w;
    const FitResult result = fit_parameters(records, start, bounds, options);

    ordered_json j = fit_json(result);
    for (auto& [k, v] : extra.items()) j[k] = v;
    const bool has_constant_speed = std::any_of(records.begin(), records.end(),
                                                [](const ExperimentRecord& r) { return r.kind == RecordKind::ConstantSpeed; });
    if (has_constant_speed) {
        const BushingFit b = fit_bushing_slope(records, result.tuned);
        j["bushing_fit"] = {{"slope_w_per_rad_s", num(b.slope_w_per_rad_s)}, {"r_squared", num(b.r_squared)}};
    }
    io::write_text_atomic(out, dump(j));
    std::cout << "total_sse_c2: " << io::format_number(result.total_sse) << " (estimates "
              << io::format_number(result.total_sse_at_estimates) << ")\n";
    if (result.no_improvement) {
        std::cerr << "fit did not improve on the estimates; estimates written\n";
        return kNoImprovement;
    }
    return kOk;
}

int cmd_envelope(const Common& common, const std::string& currents, const std::string& speeds,
                 const std::string& out) {
    ProjectConfig c = common.load();
    if (!currents.empty()) c.envelope.currents_a = parse_list(currents, "--currents");
    if (!speeds.empty()) c.envelope.speeds_rad_s = parse_list(speeds, "--speeds");
    for (double v : c.envelope.currents_a) {
        if (v < 0.0) throw InvalidInput("--currents: values must be >= 0");
    }
    for (double v : c.envelope.speeds_rad_s) {
        if (v < 0.0) throw InvalidInput("--speeds: values must be >= 0");
    }

    struct Row {
        double current, speed;
        std::optional<double> t_case, t_wind, ss_case, ss_wind;
    };
    std::vector<Row> rows;
    for (double i : c.envelope.currents_a) {
        for (double w : c.envelope.speeds_rad_s) rows.push_back({i, w, {}, {}, {}, {}});
    }
    const double dt = c.simulation.dt_s;
    parallel_for(rows.size(), common.jobs, [&](std::size_t k) {
        Row& r = rows[k];
        OperatingProfile p;
        p.initial_winding_c = c.thermal.t_ambient_c;
        p.initial_case_c = c.thermal.t_ambient_c;
        p.segments.push_back({100.0 * dt, r.current, r.speed});
        r.t_case = time_to_threshold(c.thermal, p, c.simulation.case_limit_c, ThermalNode::Case, dt);
        r.t_wind = time_to_threshold(c.thermal, p, c.simulation.winding_limit_c, ThermalNode::Winding, dt);
        try {
            const SteadyState s = steady_state(c.thermal, r.current, r.speed);
            r.ss_case = s.case_c;
            r.ss_wind = s.winding_c;
        } catch (const ThermalRunaway&) {
        }
    });

    std::string text = "current_a,speed_rad_s,time_to_case80_s,time_to_wind105_s,ss_case_c,ss_wind_c\n";
    for (const Row& r : rows) {
        text += io::format_number(r.current) + "," + io::format_number(r.speed) + "," + csv_opt(r.t_case) + "," +
                csv_opt(r.t_wind) + "," + csv_opt(r.ss_case) + "," + csv_opt(r.ss_wind) + "\n";
    }
    io::write_text_atomic(out, text);
    std::cout << "cells: " << rows.size() << "\n";
    return kOk;
}

ordered_json design_json(const FinArrayDesign& d) {
    return {{"n_fins", d.n_fins},
            {"length_m", num(d.geometry.length_m)},
            {"thickness_m", num(d.geometry.thickness_m)},
            {"width_m", num(d.geometry.width_m)},
            {"n_segments", d.geometry.n_segments},
            {"conductivity_w_per_m_k", num(d.geometry.conductivity_w_per_m_k)},
            {"density_kg_per_m3", num(d.geometry.density_kg_per_m3)},
            {"h_w_per_m2_k", num(d.h_w_per_m2_k)},
            {"attach_resistance_k_per_w", num(d.attach_resistance_k_per_w)},
            {"total_resistance_k_per_w", num(d.total_resistance_k_per_w)},
            {"total_weight_kg", num(d.total_weight_kg)},
            {"max_segment_biot", num(d.max_segment_biot)}};
}

int cmd_heatsink(const Common& common, const std::string& out, bool system_effect) {
    const ProjectConfig c = common.load();
    const HeatsinkOptimum opt = optimize_heatsink(c.heatsink);
    ordered_json j;
    j["feasible"] = opt.feasible;
    j["design"] = design_json(opt.design);
    j["constraints_verified"] =
        opt.feasible && satisfies_constraints(opt.design, c.heatsink.target_r_max_k_per_w, c.heatsink.biot_max);
    j["best_violation"] = num(opt.best_violation);
    j["evaluations"] = opt.evaluations;
    if (opt.feasible && system_effect) {
        const SystemEffect e = evaluate_design_in_system(opt.design, c.c23_with_fin_j_per_k, c.thermal,
                                                         c.hover.current_a, c.hover.speed_rad_s, heat_cool_options(c));
        j["system_effect"] = {{"current_a", num(c.hover.current_a)},
                              {"speed_rad_s", num(c.hover.speed_rad_s)},
                              {"time_to_limit_without_s", opt_num(e.time_to_limit_without_s)},
                              {"time_to_limit_with_s", opt_num(e.time_to_limit_with_s)},
                              {"cooling_without_s", opt_num(e.cooling_without_s)},
                              {"cooling_with_s", opt_num(e.cooling_with_s)},
                              {"operating_time_change", e.operating_time_change ? num(*e.operating_time_change) : ordered_json(nullptr)},
                              {"cooling_time_change", e.cooling_time_change ? num(*e.cooling_time_change) : ordered_json(nullptr)}};
    }
    io::write_text_atomic(out, dump(j));
    if (!opt.feasible) {
        std::cerr << "no design meets the constraints; smallest violation " << io::format_number(opt.best_violation) << "\n";
        return kInvalidInput;
    }
    std::cout << "n_fins: " << opt.design.n_fins << "\n"
              << "total_resistance_k_per_w: " << io::format_number(opt.design.total_resistance_k_per_w) << "\n"
              << "total_weight_kg: " << io::format_number(opt.design.total_weight_kg) << "\n";
    return kOk;
}

int cmd_characterize(const Common& common, const std::string& motion_csv, const std::string& electrical_csv,
                     const std::string& out) {
    const ProjectConfig c = common.load();
    const MotionTrace motion = io::motion_from_csv(io::read_csv(motion_csv));
    const ElectricalTrace electrical = io::electrical_from_csv(io::read_csv(electrical_csv));
    const TrialMetrics m = characterize_trial(motion, electrical, c.characterization);
    const DensityMetrics d = density_metrics(m, c.actuator_mass_kg);
    const ordered_json j = {{"rms_voltage_v", num(m.rms_voltage_v)},
                            {"rms_current_a", num(m.rms_current_a)},
                            {"input_power_w", num(m.input_power_w)},
                            {"peak_torque_n_m", num(m.peak_torque_n_m)},
                            {"mech_power_avg_w", num(m.mech_power_avg_w)},
                            {"efficiency", num(m.efficiency)},
                            {"pk_pk_amplitude_deg", num(m.pk_pk_amplitude_deg)},
                            {"effective_speed_rpm", num(m.effective_speed_rpm)},
                            {"n_cycles_used", m.n_cycles_used},
                            {"mass_kg", num(d.mass_kg)},
                            {"power_density_w_per_kg", num(d.power_density_w_per_kg)},
                            {"torque_density_n_m_per_kg", num(d.torque_density_n_m_per_kg)}};
    io::write_text_atomic(out, dump(j));
    std::cout << "effective_speed_rpm: " << io::format_number(m.effective_speed_rpm) << "\n";
    return kOk;
}

int cmd_sweep(const Common& common, const std::string& out) {
    const ProjectConfig c = common.load();
    const auto curve = frequency_sweep(c.actuator, c.sweep.drive_amplitude_v, c.sweep.f_min_hz, c.sweep.f_max_hz,
                                       c.sweep.n_points);
    std::string text = "frequency_hz,pk_pk_amplitude_rad\n";
    const SweepPoint* peak = &curve.front();
    for (const auto& p : curve) {
        text += io::format_number(p.frequency_hz) + "," + io::format_number(p.pk_pk_amplitude_rad) + "\n";
        if (p.pk_pk_amplitude_rad > peak->pk_pk_amplitude_rad) peak = &p;
    }
    io::write_text_atomic(out, text);
    std::cout << "peak_frequency_hz: " << io::format_number(peak->frequency_hz) << "\n";
    return kOk;
}

// Writes several files; any already written are removed if a later one fails.
void write_all(const std::vector<std::pair<fs::path, std::string>>& files) {
    std::vector<fs::path> done;
    try {
        for (const auto& [path, text] : files) {
            io::write_text_atomic(path, text);
            done.push_back(path);
        }
    } catch (...) {
        std::error_code ec;
        for (const auto& p : done) fs::remove(p, ec);
        throw;
    }
}

int cmd_simulate_actuator(const Common& common, const std::string& motion_out, const std::string& electrical_out) {
    const ProjectConfig c = common.load();
    SinusoidalDrive drive;
    drive.amplitude_v = c.actuator_run.amplitude_v;
    drive.frequency_hz = c.actuator_run.frequency_hz;
    drive.duration_s = c.actuator_run.duration_s;
    const ActuatorRun run = simulate_actuator(c.actuator, drive, c.actuator_run.dt_s);
    write_all({{motion_out, io::motion_to_csv(run.motion)}, {electrical_out, io::electrical_to_csv(run.electrical)}});
    std::cout << "energy_relative_residual: " << io::format_number(run.audit.relative_residual()) << "\n";
    return kOk;
}

struct SynthArgs {
    std::string speeds = "0,51.3,142.7";
    double noise_c = 0.0;
    std::uint64_t seed = 1;
    double pulse_current_a = 0.57;
    double pulse_duration_s = 5.0;
    double duration_s = 600.0;
    double sample_dt_s = 0.5;
    bool heatsink = false;
};

int cmd_synth_records(const Common& common, const SynthArgs& a, const std::string& out_dir) {
    const ProjectConfig c = common.load();
    ThermalParams truth = c.thermal;
    if (c.fit.bushing_of_r4) truth.bushing_slope_w_per_rad_s = (*c.fit.bushing_of_r4)(truth.r4_k_per_w);
    std::error_code ec;
    if (!fs::is_directory(out_dir, ec)) throw IoError("'" + out_dir + "' is not a directory");
    const std::vector<double> speeds = parse_list(a.speeds, "--speeds");
    std::vector<std::pair<fs::path, std::string>> files;
    std::size_t k = 0;
    for (double w : speeds) {
        SyntheticRecordSpec s;
        char name[64];
        std::snprintf(name, sizeof name, "%s_%02zu", a.heatsink ? "fin" : "pulse_spin", k);
        s.name = name;
        s.speed_rad_s = w;
        s.pulse_current_a = a.pulse_current_a;
        s.pulse_duration_s = a.pulse_duration_s;
        s.total_duration_s = a.duration_s;
        s.sample_dt_s = a.sample_dt_s;
        s.noise_sigma_c = a.noise_c;
        s.noise_seed = a.seed * 1000 + k;
        s.heatsink = a.heatsink;
        ThermalParams t = truth;
        if (a.heatsink) {
            if (!t.rfin_k_per_w) throw InvalidInput("--heatsink needs thermal.rfin_k_per_w in the config");
            t.c23_j_per_k = c.c23_with_fin_j_per_k;
        } else {
            t.rfin_k_per_w.reset();
        }
        const ExperimentRecord r = synthesize_record(t, s);
        files.push_back({fs::path(out_dir) / (s.name + ".csv"), io::record_csv(r)});
        files.push_back({fs::path(out_dir) / (s.name + ".json"), io::record_sidecar(r)});
        ++k;
    }
    write_all(files);
    std::cout << "records: " << speeds.size() << "\n";
    return kOk;
}

int cmd_calibrate(const Common& common, const std::string& out) {
    const ProjectConfig c = common.load();
    const HoverCalibration cal = calibrate_hover(c.thermal, c.hover.current_a, c.hover.speed_rad_s,
                                                 c.hover.target_time_s, heat_cool_options(c));
    nlohmann::ordered_json root = common.config_path.empty()
                                      ? ordered_json::object()
                                      : ordered_json::parse(io::read_text(common.config_path));
    root["_comment"] = "Calibrated: thermal.r0_ohm and thermal.bushing_slope_w_per_rad_s solved so hover heating reaches the case limit at the target time.";
    root["thermal"]["r0_ohm"] = num(cal.r0_ohm);
    root["thermal"]["bushing_slope_w_per_rad_s"] = num(cal.bushing_slope_w_per_rad_s);
    io::write_text_atomic(out, dump(root));
    std::cout << "r0_ohm: " << io::format_number(cal.r0_ohm) << "\n"
              << "bushing_slope_w_per_rad_s: " << io::format_number(cal.bushing_slope_w_per_rad_s) << "\n"
              << "r0_adjusted: " << (cal.r0_adjusted ? "true" : "false") << "\n";
    return kOk;
}

int report(const char* kind, const std::exception& e, int code) {
    std::cerr << "error (" << kind << "): " << e.what() << "\n";
    return code;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Resonant actuator thermal and electromechanical toolkit", "resact"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");
    app.footer("Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 4 I/O, 5 fit did not improve.\n"
               "All temperatures in degC, resistances in K/W, capacitances in J/K, speeds in rad/s at the output shaft.");

    Common common;
    std::string a1, a2, a3, currents, speeds;
    bool system_effect = true;
    SynthArgs synth;
    std::function<int()> action;

    auto* sim = app.add_subcommand("simulate", "Integrate the thermal network over a profile");
    add_common(sim, common);
    sim->add_option("profile", a1, "Profile JSON: initial {t_winding_c, t_case_c} [degC], segments [{duration_s [s], current_a [A], speed_rad_s [rad/s]}]")->required();
    sim->add_option("out_trace", a2, "Output CSV: time_s [s], t_winding_c, t_case_c [degC], q_joule_w, q_bushing_w [W]")->required();
    sim->callback([&] { action = [&] { return cmd_simulate(common, a1, a2); }; });

    auto* fit = app.add_subcommand("fit", "Identify thermal parameters from bench records");
    add_common(fit, common);
    fit->add_option("records_dir", a1, "Directory of <name>.csv traces (time_s [s], t_case_c [degC]) with <name>.json sidecars {kind, speed_rad_s [rad/s], pulse_current_a [A], pulse_duration_s [s], heatsink}")->required();
    fit->add_option("out_fit", a2, "Output JSON: tuned parameters (units in key names), per-speed fits, SSE [degC^2], seed")->required();
    fit->callback([&] { action = [&] { return cmd_fit(common, a1, a2); }; });

    auto* env = app.add_subcommand("envelope", "Time-to-limit and steady-state table over a current x speed grid");
    add_common(env, common);
    env->add_option("--currents", currents, "Comma-separated currents [A]; overrides the config grid");
    env->add_option("--speeds", speeds, "Comma-separated speeds [rad/s]; overrides the config grid");
    env->add_option("out_table", a1, "Output CSV: current_a [A], speed_rad_s [rad/s], time_to_case80_s, time_to_wind105_s [s], ss_case_c, ss_wind_c [degC]; inf = never")->required();
    env->callback([&] { action = [&] { return cmd_envelope(common, currents, speeds, a1); }; });

    auto* hs = app.add_subcommand("heatsink", "Minimum-weight fin array meeting the resistance and Biot limits");
    add_common(hs, common);
    hs->add_flag("!--no-system-effect", system_effect, "Skip the heat/cool comparison with and without the design");
    hs->add_option("out_design", a1, "Output JSON: geometry [m], resistance [K/W], weight [kg], Biot [-], system effect [s]")->required();
    hs->callback([&] { action = [&] { return cmd_heatsink(common, a1, system_effect); }; });

    auto* ch = app.add_subcommand("characterize", "Trial metrics from motion and electrical traces");
    add_common(ch, common);
    ch->add_option("motion_csv", a1, "time_s [s], position_rad [rad], optional velocity_rad_s [rad/s], accel_rad_s2 [rad/s^2]")->required();
    ch->add_option("electrical_csv", a2, "time_s [s], voltage_v [V], current_a [A]")->required();
    ch->add_option("out_metrics", a3, "Output JSON: metrics with units in key names")->required();
    ch->callback([&] { action = [&] { return cmd_characterize(common, a1, a2, a3); }; });

    auto* sw = app.add_subcommand("sweep", "Steady pk-pk amplitude over a drive frequency grid");
    add_common(sw, common);
    sw->add_option("out_curve", a1, "Output CSV: frequency_hz [Hz], pk_pk_amplitude_rad [rad]")->required();
    sw->callback([&] { action = [&] { return cmd_sweep(common, a1); }; });

    auto* sa = app.add_subcommand("simulate-actuator", "Sinusoidally driven actuator run");
    add_common(sa, common);
    sa->add_option("out_motion", a1, "Output CSV: time_s [s], position_rad [rad], velocity_rad_s [rad/s], accel_rad_s2 [rad/s^2]")->required();
    sa->add_option("out_electrical", a2, "Output CSV: time_s [s], voltage_v [V], current_a [A]")->required();
    sa->callback([&] { action = [&] { return cmd_simulate_actuator(common, a1, a2); }; });

    auto* sy = app.add_subcommand("synth-records", "Synthetic pulse-spin records from the configured parameters");
    add_common(sy, common);
    sy->add_option("--speeds", synth.speeds, "Comma-separated spin speeds [rad/s]");
    sy->add_option("--noise-c", synth.noise_c, "Gaussian measurement noise sigma [degC]");
    sy->add_option("--seed", synth.seed, "Noise seed");
    sy->add_option("--pulse-current-a", synth.pulse_current_a, "Stall pulse current [A]");
    sy->add_option("--pulse-duration-s", synth.pulse_duration_s, "Stall pulse length [s]");
    sy->add_option("--duration-s", synth.duration_s, "Record length [s]");
    sy->add_option("--sample-dt-s", synth.sample_dt_s, "Sampling interval [s]");
    sy->add_flag("--heatsink", synth.heatsink, "Generate heatsink records (uses thermal.rfin_k_per_w, c23_with_fin_j_per_k)");
    sy->add_option("out_dir", a1, "Existing output directory")->required();
    sy->callback([&] { action = [&] { return cmd_synth_records(common, synth, a1); }; });

    auto* cal = app.add_subcommand("calibrate", "Solve R0 and bushing slope so hover heating reaches the case limit at the target time");
    add_common(cal, common);
    cal->add_option("out_config", a1, "Output: the input config with thermal.r0_ohm [ohm] and thermal.bushing_slope_w_per_rad_s [W/(rad/s)] replaced")->required();
    cal->callback([&] { action = [&] { return cmd_calibrate(common, a1); }; });

    auto* ref = app.add_subcommand("config-help", "List every config key with its unit");
    ref->callback([&] { action = [] { std::cout << config_reference(); return int{kOk}; }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        return action();
    } catch (const InvalidInput& e) {
        return report("invalid input", e, kInvalidInput);
    } catch (const InsufficientData& e) {
        return report("invalid input", e, kInvalidInput);
    } catch (const IoError& e) {
        return report("i/o", e, kIoFailure);
    } catch (const fs::filesystem_error& e) {
        return report("i/o", e, kIoFailure);
    } catch (const nlohmann::json::exception& e) {
        return report("invalid input", e, kInvalidInput);
    } catch (const Error& e) {
        return report("numerical failure", e, kNumericalFailure);
    } catch (const std::exception& e) {
        return report("numerical failure", e, kNumericalFailure);
    }
}

}  // namespace resact::cli
