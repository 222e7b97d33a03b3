#include "resact/cli_config.hpp"

#include <set>

#include <json.hpp>

#include "resact/csv_io.hpp"
#include "resact/errors.hpp"

namespace resact::cli {

using nlohmann::json;

namespace {

// Strict view on one JSON object: every key must be consumed before finish().
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw InvalidInput(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    void number(const std::string& key, double& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) throw InvalidInput(where(key) + ": expected a number");
            out = v->get<double>();
        }
    }

    void optional_number(const std::string& key, std::optional<double>& out) {
        if (const json* v = take(key)) {
            if (v->is_null()) out.reset();
            else if (v->is_number()) out = v->get<double>();
            else throw InvalidInput(where(key) + ": expected a number or null");
        }
    }

    template <typename Int>
    void integer(const std::string& key, Int& out) {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned()) throw InvalidInput(where(key) + ": expected a non-negative integer");
            out = v->get<Int>();
        }
    }

    void boolean(const std::string& key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) throw InvalidInput(where(key) + ": expected true or false");
            out = v->get<bool>();
        }
    }

    void string(const std::string& key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) throw InvalidInput(where(key) + ": expected a string");
            out = v->get<std::string>();
        }
    }

    void numbers(const std::string& key, std::vector<double>& out) {
        if (const json* v = take(key)) {
            if (!v->is_array()) throw InvalidInput(where(key) + ": expected an array of numbers");
            out.clear();
            for (const auto& e : *v) {
                if (!e.is_number()) throw InvalidInput(where(key) + ": expected an array of numbers");
                out.push_back(e.get<double>());
            }
        }
    }

    void interval(const std::string& key, double& lo, double& hi) {
        std::vector<double> v;
        if (!has(key)) return;
        numbers(key, v);
        if (v.size() != 2) throw InvalidInput(where(key) + ": expected [lower, upper]");
        lo = v[0];
        hi = v[1];
    }

    std::optional<Section> child(const std::string& key) {
        const json* v = take(key);
        if (!v) return std::nullopt;
        return Section(*v, where(key));
    }

    const json* raw(const std::string& key) { return take(key); }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) throw InvalidInput(where(key) + ": unknown key");
        }
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

private:
    const json* take(const std::string& key) {
        used_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void read_thermal(Section s, ProjectConfig& c) {
    ThermalParams& t = c.thermal;
    s.number("r12_intercept_k_per_w", t.r12_intercept_k_per_w);
    s.number("r12_slope_k_per_w_per_speed", t.r12_slope_k_per_w);
    s.number("r12_floor_k_per_w", t.r12_floor_k_per_w);
    std::string unit = t.r12_speed_unit == SpeedUnit::Rpm ? "rpm" : "rad_per_s";
    s.string("r12_speed_unit", unit);
    if (unit == "rad_per_s") t.r12_speed_unit = SpeedUnit::RadPerSecond;
    else if (unit == "rpm") t.r12_speed_unit = SpeedUnit::Rpm;
    else throw InvalidInput(s.where("r12_speed_unit") + ": expected \"rad_per_s\" or \"rpm\"");
    s.number("r4_k_per_w", t.r4_k_per_w);
    s.optional_number("rfin_k_per_w", t.rfin_k_per_w);
    s.number("c1_j_per_k", t.c1_j_per_k);
    s.number("c23_j_per_k", t.c23_j_per_k);
    s.number("c23_with_fin_j_per_k", c.c23_with_fin_j_per_k);
    s.number("r0_ohm", t.r0_ohm);
    s.number("alpha_per_c", t.alpha_per_c);
    s.number("t0_c", t.t0_c);
    s.number("bushing_slope_w_per_rad_s", t.bushing_slope_w_per_rad_s);
    s.finish();
}

void read_actuator(Section s, ProjectConfig& c) {
    ActuatorParams& a = c.actuator;
    s.number("winding_resistance_ohm", a.winding_resistance_ohm);
    s.number("torque_constant_n_m_per_a", a.torque_constant_n_m_per_a);
    s.number("backemf_constant_v_s_per_rad", a.backemf_constant_v_s_per_rad);
    s.number("gear_ratio", a.gear_ratio);
    s.number("gearbox_efficiency", a.gearbox_efficiency);
    s.number("rotor_inertia_kg_m2", a.rotor_inertia_kg_m2);
    s.number("spring_stiffness_n_m_per_rad", a.spring_stiffness_n_m_per_rad);
    s.number("load_inertia_kg_m2", a.load_inertia_kg_m2);
    s.number("viscous_damping_n_m_s_per_rad", a.viscous_damping_n_m_s_per_rad);
    s.number("actuator_mass_kg", c.actuator_mass_kg);
    if (auto d = s.child("drive")) {
        d->number("amplitude_v", c.actuator_run.amplitude_v);
        d->number("frequency_hz", c.actuator_run.frequency_hz);
        d->number("duration_s", c.actuator_run.duration_s);
        d->number("dt_s", c.actuator_run.dt_s);
        d->finish();
    }
    if (auto d = s.child("sweep")) {
        d->number("drive_amplitude_v", c.sweep.drive_amplitude_v);
        d->number("f_min_hz", c.sweep.f_min_hz);
        d->number("f_max_hz", c.sweep.f_max_hz);
        d->integer("n_points", c.sweep.n_points);
        d->finish();
    }
    s.finish();
}

void read_characterization(Section s, ProjectConfig& c) {
    CharacterizationOptions& o = c.characterization;
    s.number("frequency_hz", o.frequency_hz);
    s.number("load_inertia_kg_m2", o.load_inertia_kg_m2);
    s.integer("max_cycles", o.max_cycles);
    s.integer("smoothing_window", o.smoothing_window);
    s.optional_number("damping_n_m_s_per_rad", o.damping_n_m_s_per_rad);
    s.finish();
}

void read_optimizer(Section s, ProjectConfig& c) {
    optim::GaConfig& g = c.optimizer;
    s.integer("seed", g.seed);
    s.integer("population", g.population);
    s.integer("generations", g.generations);
    s.integer("tournament_size", g.tournament_size);
    s.integer("elite_count", g.elite_count);
    s.number("blend_alpha", g.blend_alpha);
    s.number("mutation_rate", g.mutation_rate);
    s.number("mutation_scale_box_fraction", g.mutation_scale);
    s.boolean("polish", c.fit.polish);
    s.integer("polish_max_evaluations", c.polish.max_evaluations);
    s.integer("polish_restarts", c.polish.restarts);
    s.finish();
}

void read_fit(Section s, ProjectConfig& c) {
    FitSettings& f = c.fit;
    s.number("rfin_estimate_k_per_w", f.rfin_estimate_k_per_w);
    s.number("capacitance_fraction", f.capacitance_fraction);
    s.number("fin_c23_factor", f.fin_c23_factor);
    if (auto b = s.child("bounds")) {
        FitBounds fb{};
        const char* keys[] = {"r12_k_per_w", "r4_k_per_w", "rfin_k_per_w", "c1_j_per_k", "c23_j_per_k"};
        ParamBound* dst[] = {&fb.r12, &fb.r4, &fb.rfin, &fb.c1, &fb.c23};
        for (int i = 0; i < 5; ++i) {
            if (!b->has(keys[i])) throw InvalidInput(b->where(keys[i]) + ": required when bounds are given");
            b->interval(keys[i], dst[i]->lower, dst[i]->upper);
        }
        b->finish();
        f.bounds = fb;
    }
    if (auto m = s.child("bushing_of_r4")) {
        BushingExpression e;
        m->number("intercept_w_per_rad_s", e.intercept_w_per_rad_s);
        m->number("slope_w_per_rad_s_per_k_per_w", e.slope_per_k_per_w);
        m->finish();
        f.bushing_of_r4 = e;
    }
    s.finish();
}

void read_heatsink(Section s, ProjectConfig& c) {
    HeatsinkProblem& h = c.heatsink;
    s.number("target_r_max_k_per_w", h.target_r_max_k_per_w);
    s.number("biot_max", h.biot_max);
    s.interval("length_m", h.length_m.lower, h.length_m.upper);
    s.interval("thickness_m", h.thickness_m.lower, h.thickness_m.upper);
    s.interval("width_m", h.width_m.lower, h.width_m.upper);
    if (s.has("n_fins")) {
        double lo = 0, hi = 0;
        s.interval("n_fins", lo, hi);
        if (lo < 1 || hi < lo || lo != static_cast<double>(static_cast<std::size_t>(lo)) ||
            hi != static_cast<double>(static_cast<std::size_t>(hi))) {
            throw InvalidInput(s.where("n_fins") + ": expected integer [min, max] with 1 <= min <= max");
        }
        h.n_fins_min = static_cast<std::size_t>(lo);
        h.n_fins_max = static_cast<std::size_t>(hi);
    }
    s.integer("n_segments", h.n_segments);
    s.number("h_w_per_m2_k", h.h_w_per_m2_k);
    s.number("attach_resistance_k_per_w", h.attach_resistance_k_per_w);
    s.integer("starts_per_axis", h.starts_per_axis);
    if (auto m = s.child("material")) {
        m->number("conductivity_w_per_m_k", h.material.conductivity_w_per_m_k);
        m->number("density_kg_per_m3", h.material.density_kg_per_m3);
        m->finish();
    }
    s.finish();
}

void read_simulation(Section s, ProjectConfig& c) {
    SimulationSettings& o = c.simulation;
    s.number("dt_s", o.dt_s);
    s.number("case_limit_c", o.case_limit_c);
    s.number("winding_limit_c", o.winding_limit_c);
    s.number("band_c", o.band_c);
    s.number("max_cooling_s", o.max_cooling_s);
    if (auto h = s.child("hover")) {
        h->number("current_a", c.hover.current_a);
        h->number("speed_rad_s", c.hover.speed_rad_s);
        h->number("target_time_s", c.hover.target_time_s);
        h->finish();
    }
    if (auto e = s.child("envelope")) {
        e->numbers("currents_a", c.envelope.currents_a);
        e->numbers("speeds_rad_s", c.envelope.speeds_rad_s);
        e->finish();
    }
    s.finish();
}

void check(bool ok, const std::string& what) {
    if (!ok) throw InvalidInput(what);
}

void validate(const ProjectConfig& c) {
    c.thermal.validate();
    c.actuator.validate();
    check(c.c23_with_fin_j_per_k > 0.0, "thermal.c23_with_fin_j_per_k must be > 0");
    check(c.actuator_mass_kg > 0.0, "actuator.actuator_mass_kg must be > 0");
    check(c.actuator_run.dt_s > 0.0 && c.actuator_run.duration_s > 0.0, "actuator.drive: dt_s and duration_s must be > 0");
    check(c.sweep.f_min_hz > 0.0 && c.sweep.f_max_hz > c.sweep.f_min_hz && c.sweep.n_points >= 2,
          "actuator.sweep: need 0 < f_min_hz < f_max_hz and n_points >= 2");
    check(c.characterization.frequency_hz > 0.0 && c.characterization.load_inertia_kg_m2 > 0.0,
          "characterization: frequency_hz and load_inertia_kg_m2 must be > 0");
    check(c.characterization.smoothing_window % 2 == 1, "characterization.smoothing_window must be odd");
    check(c.optimizer.population >= 2 && c.optimizer.tournament_size >= 1 &&
              c.optimizer.elite_count < c.optimizer.population,
          "optimizer: need population >= 2, tournament_size >= 1, elite_count < population");
    check(c.optimizer.mutation_rate >= 0.0 && c.optimizer.mutation_rate <= 1.0, "optimizer.mutation_rate must be in [0, 1]");
    check(c.optimizer.blend_alpha >= 0.0 && c.optimizer.mutation_scale >= 0.0,
          "optimizer: blend_alpha and mutation_scale_box_fraction must be >= 0");
    check(c.fit.rfin_estimate_k_per_w > 0.0, "fit.rfin_estimate_k_per_w must be > 0");
    check(c.fit.capacitance_fraction >= 0.0 && c.fit.capacitance_fraction < 1.0,
          "fit.capacitance_fraction must be in [0, 1)");
    check(c.fit.fin_c23_factor > 0.0, "fit.fin_c23_factor must be > 0");
    if (c.fit.bounds) c.fit.bounds->validate();
    c.heatsink.validate();
    check(c.simulation.dt_s > 0.0 && c.simulation.band_c > 0.0 && c.simulation.max_cooling_s > 0.0,
          "simulation: dt_s, band_c and max_cooling_s must be > 0");
    check(c.hover.current_a >= 0.0 && c.hover.speed_rad_s >= 0.0 && c.hover.target_time_s > 0.0,
          "simulation.hover: current and speed must be >= 0, target_time_s > 0");
    check(!c.envelope.currents_a.empty() && !c.envelope.speeds_rad_s.empty(), "simulation.envelope: empty grid");
    for (double v : c.envelope.currents_a) check(v >= 0.0, "simulation.envelope.currents_a must be >= 0");
    for (double v : c.envelope.speeds_rad_s) check(v >= 0.0, "simulation.envelope.speeds_rad_s must be >= 0");
}

json parse_json(const std::string& text, const std::string& source) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(source + ": " + e.what());
    }
}

}  // namespace

ProjectConfig parse_config(const std::string& json_text, const std::string& source) {
    const json root = parse_json(json_text, source);
    ProjectConfig c;
    try {
        Section s(root, source);
        std::string comment;
        s.string("_comment", comment);
        if (auto t = s.child("thermal")) read_thermal(*t, c);
        if (auto a = s.child("ambient")) {
            a->number("t_ambient_c", c.thermal.t_ambient_c);
            a->finish();
        }
        if (auto a = s.child("actuator")) read_actuator(*a, c);
        if (auto a = s.child("characterization")) read_characterization(*a, c);
        if (auto a = s.child("optimizer")) read_optimizer(*a, c);
        if (auto a = s.child("fit")) read_fit(*a, c);
        if (auto a = s.child("heatsink")) read_heatsink(*a, c);
        if (auto a = s.child("simulation")) read_simulation(*a, c);
        s.finish();
        validate(c);
    } catch (const json::exception& e) {
        throw InvalidInput(source + ": " + e.what());
    }
    return c;
}

ProjectConfig load_config(const std::filesystem::path& path) {
    return parse_config(io::read_text(path), path.string());
}

OperatingProfile parse_profile(const std::string& json_text, const std::string& source) {
    const json root = parse_json(json_text, source);
    OperatingProfile p;
    p.initial_winding_c = 25.0;
    p.initial_case_c = 25.0;
    Section s(root, source);
    if (auto init = s.child("initial")) {
        init->number("t_winding_c", p.initial_winding_c);
        init->number("t_case_c", p.initial_case_c);
        init->finish();
    }
    std::string comment;
    s.string("_comment", comment);
    const json* found = s.raw("segments");
    if (!found) throw InvalidInput(source + ": missing 'segments'");
    const json& segs = *found;
    if (!segs.is_array() || segs.empty()) throw InvalidInput(source + ".segments: expected a non-empty array");
    for (std::size_t i = 0; i < segs.size(); ++i) {
        Section seg(segs[i], source + ".segments[" + std::to_string(i) + "]");
        ProfileSegment ps;
        for (const char* k : {"duration_s", "current_a", "speed_rad_s"}) {
            if (!seg.has(k)) throw InvalidInput(seg.where(k) + ": required");
        }
        seg.number("duration_s", ps.duration_s);
        seg.number("current_a", ps.current_a);
        seg.number("speed_rad_s", ps.speed_rad_s);
        seg.finish();
        p.segments.push_back(ps);
    }
    s.finish();
    p.validate();
    return p;
}

OperatingProfile load_profile(const std::filesystem::path& path) {
    return parse_profile(io::read_text(path), path.string());
}

std::string config_reference() {
    return R"(Config file keys (JSON; every block optional, unknown keys rejected):
  thermal.r12_intercept_k_per_w          R12 at zero speed [K/W]
  thermal.r12_slope_k_per_w_per_speed    R12 drop per unit speed [K/W per r12_speed_unit]
  thermal.r12_speed_unit                 "rad_per_s" (default) or "rpm"
  thermal.r12_floor_k_per_w              lower clamp on R12 [K/W]
  thermal.r4_k_per_w                     case to ambient [K/W]
  thermal.rfin_k_per_w                   heatsink, parallel to R4 [K/W]; null = none
  thermal.c1_j_per_k                     winding capacitance [J/K]
  thermal.c23_j_per_k                    case+magnet capacitance [J/K]
  thermal.c23_with_fin_j_per_k           case capacitance with heatsink fitted [J/K]
  thermal.r0_ohm                         winding resistance at t0_c [ohm]
  thermal.alpha_per_c                    resistance temperature coefficient [1/degC]
  thermal.t0_c                           reference temperature [degC]
  thermal.bushing_slope_w_per_rad_s      bearing heat per unit speed [W/(rad/s)]
  ambient.t_ambient_c                    ambient temperature [degC]
  actuator.winding_resistance_ohm        [ohm]
  actuator.torque_constant_n_m_per_a     motor side [N*m/A]
  actuator.backemf_constant_v_s_per_rad  motor side [V*s/rad]
  actuator.gear_ratio                    motor turns per output turn [-]
  actuator.gearbox_efficiency            torque efficiency [-]
  actuator.rotor_inertia_kg_m2           motor side [kg*m^2]
  actuator.spring_stiffness_n_m_per_rad  output side [N*m/rad]
  actuator.load_inertia_kg_m2            output side [kg*m^2]
  actuator.viscous_damping_n_m_s_per_rad output side [N*m*s/rad]
  actuator.actuator_mass_kg              for density metrics [kg]
  actuator.drive.{amplitude_v [V], frequency_hz [Hz], duration_s [s], dt_s [s]}
  actuator.sweep.{drive_amplitude_v [V], f_min_hz [Hz], f_max_hz [Hz], n_points [-]}
  characterization.frequency_hz          drive frequency [Hz]
  characterization.load_inertia_kg_m2    [kg*m^2]
  characterization.max_cycles            trailing cycles analysed [-]
  characterization.smoothing_window      odd moving-average width [samples]
  characterization.damping_n_m_s_per_rad model damping for mechanical power [N*m*s/rad]; null = from kinematics
  optimizer.{seed, population, generations, tournament_size, elite_count} [-]
  optimizer.{blend_alpha, mutation_rate, mutation_scale_box_fraction} [-]
  optimizer.{polish [bool], polish_max_evaluations, polish_restarts} [-]
  fit.rfin_estimate_k_per_w              starting heatsink resistance [K/W]
  fit.capacitance_fraction               +/- band around capacitance estimates [-]
  fit.fin_c23_factor                     C23 multiplier for heatsink records [-]
  fit.bounds.{r12_k_per_w, r4_k_per_w, rfin_k_per_w} [K/W], {c1_j_per_k, c23_j_per_k} [J/K]: [lower, upper]
  fit.bushing_of_r4.intercept_w_per_rad_s [W/(rad/s)], .slope_w_per_rad_s_per_k_per_w [W/(rad/s) per K/W]
  heatsink.target_r_max_k_per_w          array resistance limit [K/W]
  heatsink.biot_max                      per-fin Biot limit [-]
  heatsink.length_m, thickness_m, width_m  [lower, upper] [m]
  heatsink.n_fins                        [min, max] [-]
  heatsink.n_segments                    ladder segments per fin [-]
  heatsink.h_w_per_m2_k                  convection coefficient [W/(m^2*K)]
  heatsink.attach_resistance_k_per_w     base contact [K/W]
  heatsink.starts_per_axis               search starts per cross-section axis [-]
  heatsink.material.{conductivity_w_per_m_k [W/(m*K)], density_kg_per_m3 [kg/m^3]}
  simulation.dt_s                        integration step [s]
  simulation.case_limit_c, winding_limit_c  thresholds [degC]
  simulation.band_c                      cooling band around ambient [K]
  simulation.max_cooling_s               cooling horizon [s]
  simulation.hover.{current_a [A], speed_rad_s [rad/s], target_time_s [s]}
  simulation.envelope.{currents_a [A], speeds_rad_s [rad/s]}: grid axes
Profile file: {"initial": {"t_winding_c", "t_case_c"} [degC],
               "segments": [{"duration_s" [s], "current_a" [A], "speed_rad_s" [rad/s]}, ...]}
)";
}

}  // namespace resact::cli
