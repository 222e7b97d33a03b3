#include "resact/thermal_circuit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "resact/errors.hpp"
#include "resact/quadrature.hpp"
#include "resact/rk4.hpp"

namespace resact {
namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidInput(std::string("thermal params: ") + name + " must be positive and finite");
    }
}

// Number of dt steps spanning `duration`; throws unless duration is a multiple of dt.
std::size_t steps_for(double duration, double dt) {
    const double ratio = duration / dt;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-6) {
        throw InvalidInput("simulate: segment duration " + std::to_string(duration) +
                           " s is not a positive integer multiple of dt = " + std::to_string(dt) + " s");
    }
    return static_cast<std::size_t>(rounded);
}

struct SegmentModel {
    const ThermalParams& p;
    double current;
    double speed;
    double r12;
    double r_ca;

    SegmentModel(const ThermalParams& params, const ProfileSegment& seg)
        : p(params),
          current(seg.current_a),
          speed(seg.speed_rad_s),
          r12(r12_at_speed(seg.speed_rad_s, params)),
          r_ca(case_ambient_resistance(params)) {}

    StateVector<2> operator()(double /*t*/, const StateVector<2>& y) const {
        const double q_internal = (y[0] - y[1]) / r12;
        const double q_j = joule_heat(current, y[0], p);
        const double q_b = bushing_heat(speed, p);
        return {(q_j - q_internal) / p.c1_j_per_k,
                (q_internal + q_b - (y[1] - p.t_ambient_c) / r_ca) / p.c23_j_per_k};
    }
};

double node_value(const ThermalTrace& tr, std::size_t i, ThermalNode node) {
    return node == ThermalNode::Winding ? tr.t_winding_c[i] : tr.t_case_c[i];
}

std::optional<double> first_crossing(const ThermalTrace& tr, double threshold, ThermalNode node,
                                     double time_offset) {
    for (std::size_t i = 1; i < tr.size(); ++i) {
        const double a = node_value(tr, i - 1, node);
        const double b = node_value(tr, i, node);
        if (a < threshold && b >= threshold) {
            const double frac = (threshold - a) / (b - a);
            return time_offset + tr.time_s[i - 1] + frac * (tr.time_s[i] - tr.time_s[i - 1]);
        }
    }
    return std::nullopt;
}

}  // namespace

void ThermalParams::validate() const {
    require_positive(r12_intercept_k_per_w, "R12 intercept");
    require_positive(r4_k_per_w, "R4");
    require_positive(c1_j_per_k, "C1");
    require_positive(c23_j_per_k, "C23");
    require_positive(r0_ohm, "R0");
    if (!(r12_floor_k_per_w >= 1.0) || !std::isfinite(r12_floor_k_per_w)) {
        throw InvalidInput("thermal params: R12 floor must be >= 1 K/W");
    }
    if (!std::isfinite(r12_slope_k_per_w)) throw InvalidInput("thermal params: R12 slope must be finite");
    if (rfin_k_per_w && !(*rfin_k_per_w > 0.0)) {
        throw InvalidInput("thermal params: Rfin must be positive when present");
    }
    if (!(alpha_per_c >= 0.0)) throw InvalidInput("thermal params: alpha must be >= 0");
    if (!(bushing_slope_w_per_rad_s >= 0.0)) throw InvalidInput("thermal params: bushing slope must be >= 0");
    if (!std::isfinite(t0_c) || !std::isfinite(t_ambient_c)) {
        throw InvalidInput("thermal params: reference temperatures must be finite");
    }
}

double OperatingProfile::duration_s() const {
    double d = 0.0;
    for (const auto& s : segments) d += s.duration_s;
    return d;
}

void OperatingProfile::validate() const {
    if (segments.empty()) throw InvalidInput("profile: needs at least one segment");
    for (const auto& s : segments) {
        if (!(s.duration_s > 0.0)) throw InvalidInput("profile: segment durations must be > 0");
        if (!(s.current_a >= 0.0)) throw InvalidInput("profile: currents must be >= 0");
        if (!(s.speed_rad_s >= 0.0)) throw InvalidInput("profile: speeds must be >= 0");
    }
    if (!std::isfinite(initial_winding_c) || !std::isfinite(initial_case_c)) {
        throw InvalidInput("profile: initial temperatures must be finite");
    }
}

double joule_heat(double current_a, double t_winding_c, const ThermalParams& params) {
    return current_a * current_a * params.r0_ohm * (1.0 + params.alpha_per_c * (t_winding_c - params.t0_c));
}

double bushing_heat(double speed_rad_s, const ThermalParams& params) {
    return params.bushing_slope_w_per_rad_s * speed_rad_s;
}

double r12_at_speed(double speed_rad_s, const ThermalParams& params) {
    const double w = params.r12_speed_unit == SpeedUnit::Rpm ? speed_rad_s * 60.0 / (2.0 * std::numbers::pi)
                                                             : speed_rad_s;
    return std::max(params.r12_floor_k_per_w, params.r12_intercept_k_per_w - params.r12_slope_k_per_w * w);
}

double case_ambient_resistance(const ThermalParams& params) {
    if (!params.rfin_k_per_w || std::isinf(*params.rfin_k_per_w)) return params.r4_k_per_w;
    const double r4 = params.r4_k_per_w;
    const double rf = *params.rfin_k_per_w;
    return r4 * rf / (r4 + rf);
}

double max_stable_step(const ThermalParams& params, const OperatingProfile& profile) {
    double r12_min = INFINITY;
    for (const auto& s : profile.segments) r12_min = std::min(r12_min, r12_at_speed(s.speed_rad_s, params));
    if (!std::isfinite(r12_min)) r12_min = params.r12_floor_k_per_w;
    return std::min(params.c1_j_per_k * r12_min, params.c23_j_per_k * case_ambient_resistance(params)) / 20.0;
}

ThermalTrace simulate(const ThermalParams& params, const OperatingProfile& profile, double dt) {
    params.validate();
    profile.validate();
    if (!(dt > 0.0)) throw InvalidInput("simulate: dt must be > 0");
    const double dt_max = max_stable_step(params, profile);
    if (dt > dt_max * (1.0 + 1e-9)) {
        throw InvalidInput("simulate: dt = " + std::to_string(dt) + " s exceeds the stability bound " +
                           std::to_string(dt_max) + " s");
    }
    std::vector<std::size_t> seg_steps;
    std::size_t total = 0;
    for (const auto& s : profile.segments) {
        seg_steps.push_back(steps_for(s.duration_s, dt));
        total += seg_steps.back();
    }

    ThermalTrace tr;
    for (auto* v : {&tr.time_s, &tr.t_winding_c, &tr.t_case_c, &tr.q_joule_w, &tr.q_bushing_w}) {
        v->reserve(total + 1);
    }
    StateVector<2> y{profile.initial_winding_c, profile.initial_case_c};
    std::size_t index = 0;
    auto record = [&](const ProfileSegment& inputs) {
        tr.time_s.push_back(static_cast<double>(index) * dt);
        tr.t_winding_c.push_back(y[0]);
        tr.t_case_c.push_back(y[1]);
        tr.q_joule_w.push_back(joule_heat(inputs.current_a, y[0], params));
        tr.q_bushing_w.push_back(bushing_heat(inputs.speed_rad_s, params));
    };
    record(profile.segments.front());
    for (std::size_t s = 0; s < profile.segments.size(); ++s) {
        const SegmentModel model(params, profile.segments[s]);
        // Boundary samples carry the inputs that act from that instant on.
        const ProfileSegment& next = s + 1 < profile.segments.size() ? profile.segments[s + 1]
                                                                      : profile.segments[s];
        for (std::size_t k = 0; k < seg_steps[s]; ++k) {
            const double t = static_cast<double>(index) * dt;
            y = rk4_step<2>(model, t, y, dt);
            ++index;
            if (!all_finite(y)) throw IntegrationFailure("thermal state diverged", t + dt);
            record(k + 1 == seg_steps[s] ? next : profile.segments[s]);
        }
    }
    return tr;
}

double self_heating_loop_gain(const ThermalParams& params, double current_a, double speed_rad_s) {
    return current_a * current_a * params.r0_ohm * params.alpha_per_c *
           (r12_at_speed(speed_rad_s, params) + case_ambient_resistance(params));
}

SteadyState steady_state(const ThermalParams& params, double current_a, double speed_rad_s) {
    params.validate();
    if (!(current_a >= 0.0) || !(speed_rad_s >= 0.0)) {
        throw InvalidInput("steady_state: current and speed must be >= 0");
    }
    const double gain = self_heating_loop_gain(params, current_a, speed_rad_s);
    if (gain >= 1.0) throw ThermalRunaway(gain);
    const double r12 = r12_at_speed(speed_rad_s, params);
    const double r_ca = case_ambient_resistance(params);
    const double i2r = current_a * current_a * params.r0_ohm;
    // Qj = a + b * Tw, affine in the winding temperature.
    const double a = i2r * (1.0 - params.alpha_per_c * params.t0_c);
    const double b = i2r * params.alpha_per_c;
    const double q_b = bushing_heat(speed_rad_s, params);
    const double t_w = (params.t_ambient_c + q_b * r_ca + a * (r12 + r_ca)) / (1.0 - b * (r12 + r_ca));
    const double q_j = a + b * t_w;
    return {t_w, t_w - q_j * r12};
}

std::pair<double, double> network_eigenvalues(const ThermalParams& params, double current_a,
                                              double speed_rad_s) {
    const double r12 = r12_at_speed(speed_rad_s, params);
    const double r_ca = case_ambient_resistance(params);
    const double b = current_a * current_a * params.r0_ohm * params.alpha_per_c;
    const double a11 = (b - 1.0 / r12) / params.c1_j_per_k;
    const double a12 = 1.0 / (r12 * params.c1_j_per_k);
    const double a21 = 1.0 / (r12 * params.c23_j_per_k);
    const double a22 = -(1.0 / r12 + 1.0 / r_ca) / params.c23_j_per_k;
    const double half_tr = 0.5 * (a11 + a22);
    const double det = a11 * a22 - a12 * a21;
    // Real for this network: the off-diagonal product is positive.
    const double disc = std::sqrt(std::max(0.0, half_tr * half_tr - det));
    return {half_tr + disc, half_tr - disc};
}

std::optional<double> time_to_threshold(const ThermalParams& params, const OperatingProfile& profile,
                                        double threshold_c, ThermalNode node, double dt) {
    profile.validate();
    const double initial = node == ThermalNode::Winding ? profile.initial_winding_c : profile.initial_case_c;
    if (initial >= threshold_c) return 0.0;

    const ThermalTrace tr = simulate(params, profile, dt);
    if (auto t = first_crossing(tr, threshold_c, node, 0.0)) return t;

    const ProfileSegment last = profile.segments.back();
    try {
        const SteadyState ss = steady_state(params, last.current_a, last.speed_rad_s);
        const double target = node == ThermalNode::Winding ? ss.winding_c : ss.case_c;
        if (target <= threshold_c) return std::nullopt;
    } catch (const ThermalRunaway&) {
        // Unbounded growth: the threshold is crossed eventually.
    }

    const double slow = network_eigenvalues(params, last.current_a, last.speed_rad_s).first;
    const double tau = slow < 0.0 ? -1.0 / slow
                                  : params.c23_j_per_k * case_ambient_resistance(params);
    const double chunk = dt * std::max(1.0, std::ceil(10.0 * tau / dt));
    double elapsed = profile.duration_s();
    OperatingProfile hold{{{chunk, last.current_a, last.speed_rad_s}},
                          tr.t_winding_c.back(),
                          tr.t_case_c.back()};
    for (int i = 0; i < 100; ++i) {
        const ThermalTrace ext = simulate(params, hold, dt);
        if (auto t = first_crossing(ext, threshold_c, node, elapsed)) return t;
        elapsed += chunk;
        hold.initial_winding_c = ext.t_winding_c.back();
        hold.initial_case_c = ext.t_case_c.back();
    }
    return std::nullopt;
}

double settling_time(const ThermalTrace& trace, double target_c, double band_c) {
    const std::size_t n = trace.size();
    if (n == 0 || trace.t_case_c.size() != n) throw InsufficientData("settling_time: empty trace");
    if (!(band_c >= 0.0)) throw InvalidInput("settling_time: band must be >= 0");
    auto excess = [&](std::size_t i) { return std::abs(trace.t_case_c[i] - target_c) - band_c; };
    if (excess(n - 1) > 0.0) {
        throw NotSettled("settling_time: trace ends outside the band", excess(n - 1) + band_c);
    }
    std::size_t j = n;
    for (std::size_t i = n; i-- > 0;) {
        if (excess(i) > 0.0) {
            j = i;
            break;
        }
    }
    if (j == n) return 0.0;
    const double ej = excess(j);
    const double ek = excess(j + 1);
    const double frac = ej / (ej - ek);
    return trace.time_s[j] + frac * (trace.time_s[j + 1] - trace.time_s[j]) - trace.time_s.front();
}

double archimedes_number(double g_m_s2, double beta_per_k, double delta_t_k, double length_m,
                         double velocity_m_s) {
    if (!(velocity_m_s > 0.0)) throw InvalidInput("archimedes_number: velocity must be > 0");
    if (!(length_m > 0.0)) throw InvalidInput("archimedes_number: length must be > 0");
    return g_m_s2 * beta_per_k * delta_t_k * length_m / (velocity_m_s * velocity_m_s);
}

double ThermalEnergyAudit::relative_residual() const {
    const double scale = std::max({std::abs(heat_in_j), std::abs(heat_out_j), std::abs(stored_j)});
    return scale > 0.0 ? std::abs(residual_j()) / scale : 0.0;
}

ThermalEnergyAudit energy_audit(const ThermalParams& params, const OperatingProfile& profile,
                                const ThermalTrace& trace) {
    if (trace.size() < 2) throw InsufficientData("energy_audit: trace too short");
    const double dt = trace.time_s[1] - trace.time_s[0];
    const double r_ca = case_ambient_resistance(params);
    ThermalEnergyAudit audit;
    std::size_t begin = 0;
    for (const auto& seg : profile.segments) {
        const std::size_t steps = steps_for(seg.duration_s, dt);
        const std::size_t end = begin + steps;
        if (end > trace.size() - 1) throw InvalidInput("energy_audit: trace shorter than profile");
        std::vector<double> q_in, q_out;
        q_in.reserve(steps + 1);
        q_out.reserve(steps + 1);
        for (std::size_t i = begin; i <= end; ++i) {
            q_in.push_back(joule_heat(seg.current_a, trace.t_winding_c[i], params) +
                           bushing_heat(seg.speed_rad_s, params));
            q_out.push_back((trace.t_case_c[i] - params.t_ambient_c) / r_ca);
        }
        audit.heat_in_j += simpson(q_in, dt);
        audit.heat_out_j += simpson(q_out, dt);
        begin = end;
    }
    const std::size_t last = begin;
    audit.stored_j = params.c1_j_per_k * (trace.t_winding_c[last] - trace.t_winding_c.front()) +
                     params.c23_j_per_k * (trace.t_case_c[last] - trace.t_case_c.front());
    return audit;
}

HeatCoolResult heat_then_cool(const ThermalParams& params, double current_a, double speed_rad_s,
                              const HeatCoolOptions& options) {
    const double dt = options.dt_s;
    const double t_amb = params.t_ambient_c;
    const double probe = dt * std::max(1.0, std::round(100.0 / dt));
    const OperatingProfile heat_probe{{{probe, current_a, speed_rad_s}}, t_amb, t_amb};

    HeatCoolResult out;
    out.time_to_limit_s = time_to_threshold(params, heat_probe, options.case_limit_c, ThermalNode::Case, dt);
    if (!out.time_to_limit_s) return out;

    const double heat_steps = std::max(1.0, std::round(*out.time_to_limit_s / dt));
    const OperatingProfile heating{{{heat_steps * dt, current_a, speed_rad_s}}, t_amb, t_amb};
    out.heating = simulate(params, heating, dt);
    for (std::size_t i = 0; i < out.heating.size(); ++i) {
        out.peak_gap_c = std::max(out.peak_gap_c, out.heating.t_winding_c[i] - out.heating.t_case_c[i]);
        out.peak_winding_c = std::max(out.peak_winding_c, out.heating.t_winding_c[i]);
    }

    const double cool_duration = dt * std::max(1.0, std::round(options.max_cooling_s / dt));
    const OperatingProfile cooling{{{cool_duration, 0.0, 0.0}},
                                   out.heating.t_winding_c.back(),
                                   out.heating.t_case_c.back()};
    out.cooling = simulate(params, cooling, dt);
    try {
        out.cooling_settling_s = settling_time(out.cooling, t_amb, options.band_c);
    } catch (const NotSettled&) {
        out.cooling_settling_s = std::nullopt;
    }
    return out;
}

HoverCalibration calibrate_hover(const ThermalParams& params, double current_a, double speed_rad_s,
                                 double target_time_s, const HeatCoolOptions& options) {
    if (!(target_time_s > 0.0)) throw InvalidInput("calibrate_hover: target time must be > 0");
    const double dt = options.dt_s;
    const double probe = dt * std::max(1.0, std::round(100.0 / dt));
    auto time_for = [&](double r0, double m) {
        ThermalParams p = params;
        p.r0_ohm = r0;
        p.bushing_slope_w_per_rad_s = m;
        const OperatingProfile prof{{{probe, current_a, speed_rad_s}}, p.t_ambient_c, p.t_ambient_c};
        const auto t = time_to_threshold(p, prof, options.case_limit_c, ThermalNode::Case, dt);
        return t ? *t : INFINITY;
    };
    // Bisection on a quantity whose time-to-limit decreases monotonically.
    auto solve = [&](auto&& time_of, double lo, double hi) {
        for (int it = 0; it < 200 && (hi - lo) > 1e-12 * std::max(1.0, std::abs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if (time_of(mid) > target_time_s) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    const double r0_nominal = params.r0_ohm;
    if (time_for(r0_nominal, 0.0) >= target_time_s) {
        if (speed_rad_s <= 0.0) throw InvalidInput("calibrate_hover: bushing heat needs a positive speed");
        double hi = 1e-3;
        while (time_for(r0_nominal, hi) > target_time_s) {
            hi *= 2.0;
            if (hi > 1e3) throw InvalidInput("calibrate_hover: target time unreachable");
        }
        const double m = solve([&](double x) { return time_for(r0_nominal, x); }, 0.0, hi);
        return {r0_nominal, m, false};
    }
    const double r0 = solve([&](double x) { return time_for(x, 0.0); }, 0.0, r0_nominal);
    return {r0, 0.0, true};
}

}  // namespace resact
