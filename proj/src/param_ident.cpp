#include "resact/param_ident.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "resact/errors.hpp"

namespace resact {
namespace {

double tail_mean(const std::vector<double>& v, std::size_t count) {
    double s = 0.0;
    for (std::size_t i = v.size() - count; i < v.size(); ++i) s += v[i];
    return s / static_cast<double>(count);
}

double tail_stddev(const std::vector<double>& v, std::size_t count) {
    const double mean = tail_mean(v, count);
    double s = 0.0;
    for (std::size_t i = v.size() - count; i < v.size(); ++i) s += (v[i] - mean) * (v[i] - mean);
    return std::sqrt(s / static_cast<double>(count));
}

std::size_t tail_count(std::size_t n) { return std::max<std::size_t>(2, n / 10); }

// Uniform measurement step, or 0 when the timestamps are irregular.
double uniform_step(const std::vector<double>& t) {
    if (t.size() < 2) return 0.0;
    const double h = t[1] - t[0];
    if (!(h > 0.0)) return 0.0;
    for (std::size_t i = 2; i < t.size(); ++i) {
        if (std::abs((t[i] - t[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(t[i]))) return 0.0;
    }
    return h;
}

bool is_multiple(double value, double step) {
    const double r = value / step;
    return std::abs(r - std::round(r)) < 1e-6 && std::round(r) >= 1.0;
}

std::string describe(const ThermalParams& p) {
    std::ostringstream os;
    os << "[R12=" << p.r12_intercept_k_per_w << " R4=" << p.r4_k_per_w << " C1=" << p.c1_j_per_k
       << " C23=" << p.c23_j_per_k;
    if (p.rfin_k_per_w) os << " Rfin=" << *p.rfin_k_per_w;
    os << " m=" << p.bushing_slope_w_per_rad_s << "]";
    return os.str();
}

double record_sse(const ThermalParams& params, const ExperimentRecord& record) {
    const OperatingProfile exact = record_profile(record);
    const auto& t = record.trace.time_s;
    const double t0 = t.front();
    const double t_end = t.back() - t0;
    const double dt_max = max_stable_step(params, exact);
    const double h = uniform_step(t);

    double base = h;
    if (record.kind == RecordKind::PulseSpin) {
        if (!(h > 0.0) || !is_multiple(record.pulse_duration_s, h)) base = record.pulse_duration_s;
    } else if (!(h > 0.0)) {
        base = std::max(t_end, dt_max);
    }
    const double dt = base / std::ceil(base / dt_max - 1e-12);

    OperatingProfile grid = exact;
    double covered = 0.0;
    for (std::size_t s = 0; s < grid.segments.size(); ++s) {
        auto& seg = grid.segments[s];
        const bool last = s + 1 == grid.segments.size();
        const double want = last ? t_end - covered : seg.duration_s;
        seg.duration_s = dt * std::max(1.0, std::ceil(want / dt - 1e-9));
        covered += seg.duration_s;
    }

    ThermalTrace model;
    try {
        model = simulate(params, grid, dt);
    } catch (const IntegrationFailure& e) {
        throw IntegrationFailure(std::string(e.what()) + " for parameters " + describe(params), e.time_s());
    }

    double sse = 0.0;
    const std::size_t last_index = model.size() - 1;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double pos = (t[i] - t0) / dt;
        auto k = static_cast<std::size_t>(std::floor(pos + 1e-9));
        k = std::min(k, last_index);
        double value = model.t_case_c[k];
        if (k < last_index) {
            const double frac = std::clamp(pos - static_cast<double>(k), 0.0, 1.0);
            value += frac * (model.t_case_c[k + 1] - model.t_case_c[k]);
        }
        const double r = value - record.trace.t_case_c[i];
        sse += r * r;
    }
    return sse;
}

struct SpeedGroup {
    double speed;
    std::vector<ExperimentRecord> records;
};

std::vector<SpeedGroup> group_by_speed(std::span<const ExperimentRecord> records, double tol, bool heatsink) {
    std::vector<SpeedGroup> groups;
    for (const auto& r : records) {
        if (r.kind != RecordKind::PulseSpin || r.heatsink != heatsink) continue;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const SpeedGroup& g) { return std::abs(g.speed - r.speed_rad_s) <= tol; });
        if (it == groups.end()) groups.push_back({r.speed_rad_s, {r}});
        else it->records.push_back(r);
    }
    std::sort(groups.begin(), groups.end(), [](const SpeedGroup& a, const SpeedGroup& b) { return a.speed < b.speed; });
    return groups;
}

double unit_speed(double speed_rad_s, const ThermalParams& p) {
    return p.r12_speed_unit == SpeedUnit::Rpm ? speed_rad_s * 60.0 / (2.0 * 3.14159265358979323846) : speed_rad_s;
}

}  // namespace

const char* to_string(RecordKind kind) {
    switch (kind) {
        case RecordKind::Oven: return "oven";
        case RecordKind::ConstantSpeed: return "constant_speed";
        case RecordKind::PulseSpin: return "pulse_spin";
    }
    return "unknown";
}

RecordKind record_kind_from_string(const std::string& name) {
    if (name == "oven") return RecordKind::Oven;
    if (name == "constant_speed") return RecordKind::ConstantSpeed;
    if (name == "pulse_spin") return RecordKind::PulseSpin;
    throw InvalidInput("unknown record kind '" + name + "'");
}

void ExperimentRecord::validate() const {
    if (kind == RecordKind::Oven) {
        if (oven_samples.empty()) throw InvalidInput("record " + name + ": oven record has no samples");
        return;
    }
    if (trace.time_s.size() < 2 || trace.t_case_c.size() != trace.time_s.size()) {
        throw InvalidInput("record " + name + ": case-temperature trace is empty or ragged");
    }
    for (std::size_t i = 1; i < trace.time_s.size(); ++i) {
        if (!(trace.time_s[i] > trace.time_s[i - 1])) {
            throw InvalidInput("record " + name + ": timestamps must increase");
        }
    }
    if (!(speed_rad_s >= 0.0)) throw InvalidInput("record " + name + ": speed must be >= 0");
    if (kind == RecordKind::PulseSpin) {
        if (!(pulse_current_a >= 0.0) || !(pulse_duration_s > 0.0)) {
            throw InvalidInput("record " + name + ": pulse_spin needs pulse current >= 0 and duration > 0");
        }
        if (pulse_duration_s >= trace.time_s.back() - trace.time_s.front()) {
            throw InvalidInput("record " + name + ": trace ends before the pulse does");
        }
    }
}

Regression linear_regression(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw InsufficientData("linear_regression: need >= 2 paired points");
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw InsufficientData("linear_regression: x has no spread");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        sse += r * r;
    }
    const double r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return {intercept, slope, r2};
}

AlphaFit fit_alpha(std::span<const ResistanceSample> samples, double t0_c) {
    if (samples.size() < 3) throw InsufficientData("fit_alpha: need at least 3 samples");
    std::vector<double> t, r;
    for (const auto& s : samples) {
        t.push_back(s.temperature_c);
        r.push_back(s.resistance_ohm);
    }
    const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
    if (*hi - *lo < 20.0) throw InsufficientData("fit_alpha: samples must span at least 20 C");
    const Regression reg = linear_regression(t, r);
    const double r0 = reg.intercept + reg.slope * t0_c;
    if (!(r0 > 0.0)) throw InvalidInput("fit_alpha: fitted reference resistance is not positive");
    return {r0, reg.slope / r0, reg.r_squared};
}

BushingFit fit_bushing_slope(std::span<const ExperimentRecord> records, const ThermalParams& params) {
    std::vector<double> speed, rise;
    for (const auto& rec : records) {
        if (rec.kind != RecordKind::ConstantSpeed) continue;
        rec.validate();
        const auto& tc = rec.trace.t_case_c;
        const std::size_t tail = tail_count(tc.size());
        const double sd = tail_stddev(tc, tail);
        if (!(sd < 0.2)) throw NotSettled("fit_bushing_slope: record '" + rec.name + "' has not settled", sd);
        speed.push_back(rec.speed_rad_s);
        rise.push_back(tail_mean(tc, tail) - params.t_ambient_c);
    }
    std::vector<double> distinct = speed;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw InsufficientData("fit_bushing_slope: need >= 2 distinct speeds");
    const Regression reg = linear_regression(speed, rise);
    return {std::max(0.0, reg.slope / case_ambient_resistance(params)), reg.r_squared};
}

std::vector<SettlingPoint> extract_settling_times(std::span<const ExperimentRecord> records, double band_c) {
    std::vector<SettlingPoint> out;
    for (const auto& rec : records) {
        if (rec.kind != RecordKind::PulseSpin) continue;
        rec.validate();
        const auto& t = rec.trace.time_s;
        const double spin_start = t.front() + rec.pulse_duration_s;
        ThermalTrace leg;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] >= spin_start - 1e-9) {
                leg.time_s.push_back(t[i]);
                leg.t_case_c.push_back(rec.trace.t_case_c[i]);
            }
        }
        const double target = tail_mean(rec.trace.t_case_c, tail_count(rec.trace.t_case_c.size()));
        const double settle = settling_time(leg, target, band_c) + (leg.time_s.front() - spin_start);
        out.push_back({rec.speed_rad_s, settle});
    }
    return out;
}

OperatingProfile record_profile(const ExperimentRecord& record) {
    record.validate();
    if (record.kind == RecordKind::Oven) throw InvalidInput("record_profile: oven records are not simulated");
    const double span = record.trace.time_s.back() - record.trace.time_s.front();
    const double t_start = record.trace.t_case_c.front();
    OperatingProfile profile;
    profile.initial_winding_c = t_start;
    profile.initial_case_c = t_start;
    if (record.kind == RecordKind::PulseSpin) {
        profile.segments.push_back({record.pulse_duration_s, record.pulse_current_a, 0.0});
        profile.segments.push_back({span - record.pulse_duration_s, 0.0, record.speed_rad_s});
    } else {
        profile.segments.push_back({span, 0.0, record.speed_rad_s});
    }
    return profile;
}

double fitness(const ThermalParams& params, std::span<const ExperimentRecord> records) {
    params.validate();
    double total = 0.0;
    for (const auto& rec : records) {
        if (rec.kind == RecordKind::Oven) continue;
        total += record_sse(params, rec);
    }
    return total;
}

FitBounds FitBounds::from_estimates(const ThermalParams& estimates, double rfin_estimate,
                                    double capacitance_fraction) {
    auto resistance = [](double est) { return ParamBound{1.0, std::max(1.0, est)}; };
    auto capacitance = [&](double est) {
        return ParamBound{est * (1.0 - capacitance_fraction), est * (1.0 + capacitance_fraction)};
    };
    return {resistance(estimates.r12_intercept_k_per_w), resistance(estimates.r4_k_per_w),
            resistance(rfin_estimate), capacitance(estimates.c1_j_per_k), capacitance(estimates.c23_j_per_k)};
}

void FitBounds::validate() const {
    auto check = [](const ParamBound& b, const char* name, bool resistance) {
        if (!(b.lower <= b.upper)) throw InvalidInput(std::string("fit bounds: ") + name + " lower > upper");
        if (resistance && !(b.lower >= 1.0)) throw InvalidInput(std::string("fit bounds: ") + name + " lower < 1");
        if (!(b.lower > 0.0)) throw InvalidInput(std::string("fit bounds: ") + name + " must be positive");
    };
    check(r12, "R12", true);
    check(r4, "R4", true);
    check(rfin, "Rfin", true);
    check(c1, "C1", false);
    check(c23, "C23", false);
}

double BushingExpression::operator()(double r4_k_per_w) const {
    return std::max(0.0, intercept_w_per_rad_s + slope_per_k_per_w * r4_k_per_w);
}

FitResult fit_parameters(std::span<const ExperimentRecord> records, const ThermalParams& estimates,
                         const FitBounds& bounds, const FitOptions& options) {
    estimates.validate();
    bounds.validate();
    for (const auto& r : records) r.validate();
    const auto groups = group_by_speed(records, options.speed_tolerance_rad_s, false);
    if (groups.empty()) throw InsufficientData("fit_parameters: need at least one motor-only pulse_spin record");

    const optim::Box box{{bounds.r12.lower, bounds.r4.lower, bounds.c1.lower, bounds.c23.lower},
                         {bounds.r12.upper, bounds.r4.upper, bounds.c1.upper, bounds.c23.upper}};
    const std::vector<double> start =
        box.clamp(std::vector<double>{estimates.r12_intercept_k_per_w, estimates.r4_k_per_w,
                                      estimates.c1_j_per_k, estimates.c23_j_per_k});

    // Pulses run at stall, so once the stall group is fitted its R12 anchors the pulse
    // leg of every spinning record: the line through (0, R12(0)) and (omega, x[0]) is
    // exact at the only two speeds such a record visits.
    std::optional<double> r12_stall;
    double group_speed = 0.0;
    auto motor_params = [&](std::span<const double> x) {
        ThermalParams p = estimates;
        p.r12_intercept_k_per_w = x[0];
        p.r12_slope_k_per_w = 0.0;
        const double w = unit_speed(group_speed, estimates);
        if (r12_stall && w > 0.0) {
            p.r12_intercept_k_per_w = *r12_stall;
            p.r12_slope_k_per_w = (*r12_stall - x[0]) / w;
        }
        p.r4_k_per_w = x[1];
        p.c1_j_per_k = x[2];
        p.c23_j_per_k = x[3];
        p.rfin_k_per_w.reset();
        if (options.bushing_of_r4) p.bushing_slope_w_per_rad_s = (*options.bushing_of_r4)(x[1]);
        return p;
    };

    FitResult result;
    result.seed = options.ga.seed;
    for (const auto& g : groups) {
        group_speed = g.speed;
        const optim::Objective objective = [&](std::span<const double> x) {
            return fitness(motor_params(x), g.records);
        };
        optim::OptimizeResult best = optim::genetic_minimize(objective, box, start, options.ga);
        result.generations += best.generations;
        result.evaluations += best.evaluations;
        if (options.polish) {
            const optim::OptimizeResult polished = optim::nelder_mead_minimize(objective, box, best.best, options.polish_config);
            result.evaluations += polished.evaluations;
            if (polished.best_value <= best.best_value) best = polished;
        }
        result.per_speed.push_back({g.speed, best.best[0], best.best[1], best.best[2], best.best[3],
                                    best.best_value, objective(start)});
        if (std::abs(g.speed) <= options.speed_tolerance_rad_s) r12_stall = best.best[0];
    }

    const double count = static_cast<double>(result.per_speed.size());
    double r4 = 0.0, c1 = 0.0, c23 = 0.0;
    std::vector<double> speeds, r12s;
    for (const auto& s : result.per_speed) {
        r4 += s.r4_k_per_w / count;
        c1 += s.c1_j_per_k / count;
        c23 += s.c23_j_per_k / count;
        speeds.push_back(unit_speed(s.speed_rad_s, estimates));
        r12s.push_back(s.r12_k_per_w);
    }
    if (result.per_speed.size() >= 2) {
        const Regression reg = linear_regression(speeds, r12s);
        result.r12_line = {reg.intercept, -reg.slope, reg.r_squared};
    } else {
        result.r12_line = {r12s.front(), 0.0, 1.0};
    }

    ThermalParams tuned = estimates;
    tuned.r12_intercept_k_per_w = std::max(result.r12_line.intercept, tuned.r12_floor_k_per_w);
    tuned.r12_slope_k_per_w = result.r12_line.slope;
    tuned.r4_k_per_w = r4;
    tuned.c1_j_per_k = c1;
    tuned.c23_j_per_k = c23;
    tuned.rfin_k_per_w.reset();
    if (options.bushing_of_r4) tuned.bushing_slope_w_per_rad_s = (*options.bushing_of_r4)(r4);

    ThermalParams baseline = estimates;
    baseline.r12_intercept_k_per_w = start[0];
    baseline.r4_k_per_w = start[1];
    baseline.c1_j_per_k = start[2];
    baseline.c23_j_per_k = start[3];
    baseline.rfin_k_per_w.reset();
    if (options.bushing_of_r4) baseline.bushing_slope_w_per_rad_s = (*options.bushing_of_r4)(start[1]);

    // Heatsink stage: Rfin alone, motor parameters held.
    const auto fin_groups = group_by_speed(records, options.speed_tolerance_rad_s, true);
    std::vector<ExperimentRecord> fin_records;
    for (const auto& g : fin_groups) fin_records.insert(fin_records.end(), g.records.begin(), g.records.end());
    auto with_fin = [&](ThermalParams p, double rfin) {
        p.rfin_k_per_w = rfin;
        p.c23_j_per_k *= options.fin_c23_factor;
        return p;
    };
    const double rfin_start = std::clamp(estimates.rfin_k_per_w.value_or(bounds.rfin.upper), bounds.rfin.lower,
                                         bounds.rfin.upper);
    if (!fin_records.empty()) {
        const optim::Box fin_box{{bounds.rfin.lower}, {bounds.rfin.upper}};
        const optim::Objective objective = [&](std::span<const double> x) {
            return fitness(with_fin(tuned, x[0]), fin_records);
        };
        const std::vector<double> fin_start{rfin_start};
        optim::OptimizeResult best = optim::genetic_minimize(objective, fin_box, fin_start, options.ga);
        result.generations += best.generations;
        result.evaluations += best.evaluations;
        if (options.polish) {
            const auto polished = optim::nelder_mead_minimize(objective, fin_box, best.best, options.polish_config);
            result.evaluations += polished.evaluations;
            if (polished.best_value <= best.best_value) best = polished;
        }
        tuned.rfin_k_per_w = best.best[0];
        baseline.rfin_k_per_w = rfin_start;
    }

    auto evaluate = [&](const ThermalParams& p, std::vector<DatasetSse>* per_dataset) {
        double total = 0.0;
        for (const auto& rec : records) {
            if (rec.kind != RecordKind::PulseSpin) continue;
            double sse = 0.0;
            if (rec.heatsink) {
                if (!p.rfin_k_per_w) continue;
                ThermalParams motor = p;
                motor.rfin_k_per_w.reset();
                sse = fitness(with_fin(motor, *p.rfin_k_per_w), std::span(&rec, 1));
            } else {
                ThermalParams motor = p;
                motor.rfin_k_per_w.reset();
                sse = fitness(motor, std::span(&rec, 1));
            }
            total += sse;
            if (per_dataset) per_dataset->push_back({rec.name, sse});
        }
        return total;
    };
    result.total_sse = evaluate(tuned, &result.per_dataset_sse);
    result.total_sse_at_estimates = evaluate(baseline, nullptr);
    result.tuned = tuned;
    if (!(result.total_sse < result.total_sse_at_estimates)) {
        result.no_improvement = true;
        result.tuned = baseline;
        result.per_dataset_sse.clear();
        result.total_sse = evaluate(baseline, &result.per_dataset_sse);
    }
    return result;
}

ExperimentRecord synthesize_record(const ThermalParams& truth, const SyntheticRecordSpec& request) {
    OperatingProfile profile;
    profile.initial_winding_c = truth.t_ambient_c;
    profile.initial_case_c = truth.t_ambient_c;
    if (request.kind == RecordKind::PulseSpin) {
        profile.segments.push_back({request.pulse_duration_s, request.pulse_current_a, 0.0});
        profile.segments.push_back({request.total_duration_s - request.pulse_duration_s, 0.0, request.speed_rad_s});
    } else if (request.kind == RecordKind::ConstantSpeed) {
        profile.segments.push_back({request.total_duration_s, 0.0, request.speed_rad_s});
    } else {
        throw InvalidInput("synthesize_record: oven records are not simulated");
    }
    ThermalParams p = truth;
    if (request.heatsink && !p.rfin_k_per_w) throw InvalidInput("synthesize_record: heatsink record needs Rfin");
    if (!request.heatsink) p.rfin_k_per_w.reset();
    const ThermalTrace full = simulate(p, profile, request.sim_dt_s);
    const double ratio = request.sample_dt_s / request.sim_dt_s;
    const auto stride = static_cast<std::size_t>(std::llround(ratio));
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-6) {
        throw InvalidInput("synthesize_record: sample step must be a multiple of the simulation step");
    }

    ExperimentRecord rec;
    rec.name = request.name;
    rec.kind = request.kind;
    rec.speed_rad_s = request.speed_rad_s;
    rec.heatsink = request.heatsink;
    if (request.kind == RecordKind::PulseSpin) {
        rec.pulse_current_a = request.pulse_current_a;
        rec.pulse_duration_s = request.pulse_duration_s;
    }
    std::mt19937_64 rng(request.noise_seed);
    std::normal_distribution<double> noise(0.0, request.noise_sigma_c > 0.0 ? request.noise_sigma_c : 1.0);
    for (std::size_t i = 0; i < full.size(); i += stride) {
        rec.trace.time_s.push_back(full.time_s[i]);
        double v = full.t_case_c[i];
        if (request.noise_sigma_c > 0.0) v += noise(rng);
        rec.trace.t_case_c.push_back(v);
    }
    return rec;
}

}  // namespace resact
