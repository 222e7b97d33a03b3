// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "resact/characterization.hpp"
#include "resact/heatsink.hpp"
#include "resact/motor_model.hpp"
#include "resact/param_ident.hpp"
#include "resact/thermal_circuit.hpp"

using namespace resact;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRpmToRadS = 2.0 * kPi / 60.0;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = elapsed <= budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("AC%-2d %s  %s  [%s] (%.2f s of %.0f s)\n", id, pass ? "PASS" : "FAIL", title, o.detail.c_str(),
                elapsed, budget_s);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

MotionTrace sinusoid(double pk_pk_deg, double f, double rate, double seconds) {
    MotionTrace t;
    t.sample_rate_hz = rate;
    const double amp = 0.5 * pk_pk_deg * kPi / 180.0;
    const auto n = static_cast<std::size_t>(std::lround(seconds * rate)) + 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double time = static_cast<double>(i) / rate;
        t.time_s.push_back(time);
        t.position_rad.push_back(amp * std::sin(2.0 * kPi * f * time));
    }
    return t;
}

OperatingProfile hold(double seconds, double current, double speed) {
    OperatingProfile p;
    p.segments.push_back({seconds, current, speed});
    return p;
}

ThermalParams calibrated_hover(SpeedUnit unit = SpeedUnit::RadPerSecond) {
    ThermalParams p;
    p.r12_speed_unit = unit;
    const HoverCalibration c = calibrate_hover(p, 0.24, 88.06, 41.0);
    p.r0_ohm = c.r0_ohm;
    p.bushing_slope_w_per_rad_s = c.bushing_slope_w_per_rad_s;
    return p;
}

std::string opt(const std::optional<double>& v) { return v ? fmt("%.2f", *v) : std::string("none"); }

}  // namespace

int main() {
    criterion(1, "effective speed of a 154.7 deg pk-pk 20 Hz sinusoid", 1.0, [] {
        const double rpm = effective_speed_rpm(sinusoid(154.7, 20.0, 20000.0, 1.0), 20.0);
        return Outcome{within(rpm, 1031.0, 1.0), fmt("%.3f rpm, target 1031 +/- 1", rpm)};
    });

    criterion(2, "torque density", 1.0, [] {
        TrialMetrics m;
        m.peak_torque_n_m = 11.87e-3;
        const double d = density_metrics(m, 1.316e-3).torque_density_n_m_per_kg;
        return Outcome{within(d, 9.02, 0.01), fmt("%.4f N m/kg, target 9.02 +/- 0.01", d)};
    });

    criterion(3, "simulation converges to the steady state", 30.0, [] {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int cases = 0;
        double worst = 0.0;
        while (cases < 100) {
            ThermalParams p;
            p.r12_intercept_k_per_w = 5.0 + 60.0 * u(rng);
            p.r12_slope_k_per_w = 0.05 * u(rng);
            p.r4_k_per_w = 40.0 + 260.0 * u(rng);
            p.c1_j_per_k = 0.01 + 0.1 * u(rng);
            p.c23_j_per_k = 0.1 + 0.8 * u(rng);
            p.r0_ohm = 5.0 + 15.0 * u(rng);
            p.alpha_per_c = 4e-3 * u(rng);
            p.bushing_slope_w_per_rad_s = 3e-3 * u(rng);
            if (u(rng) < 0.3) p.rfin_k_per_w = 20.0 + 500.0 * u(rng);
            const double i = 0.4 * u(rng), w = 150.0 * u(rng);
            if (self_heating_loop_gain(p, i, w) >= 0.9) continue;
            const auto [slow, fast] = network_eigenvalues(p, i, w);
            (void)fast;
            const double seconds = std::ceil(-25.0 / slow);
            const OperatingProfile prof = hold(seconds, i, w);
            const double dt = seconds / std::ceil(seconds / max_stable_step(p, prof));
            const ThermalTrace t = simulate(p, prof, dt);
            const SteadyState s = steady_state(p, i, w);
            worst = std::max({worst, std::abs(t.t_case_c.back() - s.case_c), std::abs(t.t_winding_c.back() - s.winding_c)});
            ++cases;
        }
        return Outcome{worst < 0.1, fmt("%d cases, worst deviation %.3g K, bound 0.1", cases, worst)};
    });

    criterion(4, "energy audits close with fourth-order residuals", 30.0, [] {
        ThermalParams tp;
        tp.bushing_slope_w_per_rad_s = 2e-3;
        OperatingProfile prof = hold(16.0, 0.4, 0.0);
        prof.segments.push_back({32.0, 0.0, 120.0});
        const double dt0 = 16.0 / std::ceil(16.0 / max_stable_step(tp, prof));
        double th[3], th_rel = 0.0;
        for (int k = 0; k < 3; ++k) {
            const ThermalEnergyAudit a = energy_audit(tp, prof, simulate(tp, prof, dt0 / std::pow(2.0, k)));
            if (k == 0) th_rel = a.relative_residual();
            th[k] = std::abs(a.residual_j());
        }
        const ActuatorParams ap;
        const SinusoidalDrive d{1.0, 20.0, 0.5, 0.0};
        const double mdt0 = 1.0 / (100.0 * 20.0);
        double me[3], me_rel = 0.0;
        for (int k = 0; k < 3; ++k) {
            const ActuatorRun r = simulate_actuator(ap, d, mdt0 / std::pow(2.0, k));
            if (k == 0) me_rel = r.audit.relative_residual();
            me[k] = std::abs(r.audit.residual_j());
        }
        const double t1 = std::log2(th[0] / th[1]), t2 = std::log2(th[1] / th[2]);
        const double m1 = std::log2(me[0] / me[1]), m2 = std::log2(me[1] / me[2]);
        const auto order_ok = [](double o) { return o > 3.5 && o < 4.5; };
        const bool ok = th_rel < 0.005 && me_rel < 0.005 && order_ok(t1) && order_ok(t2) && order_ok(m1) && order_ok(m2);
        return Outcome{ok, fmt("thermal %.2e (orders %.2f, %.2f), electromechanical %.2e (orders %.2f, %.2f)", th_rel,
                               t1, t2, me_rel, m1, m2)};
    });

    criterion(5, "570 mA 5 s stall pulse case temperature", 1.0, [] {
        const ThermalTrace t = simulate(ThermalParams{}, hold(5.0, 0.57, 0.0), 0.01);
        const double tc = t.t_case_c.back();
        return Outcome{within(tc, 70.0, 4.0), fmt("%.2f C, target 70 +/- 4", tc)};
    });

    criterion(6, "identification round trip over 10 seeds", 300.0, [] {
        const ThermalParams truth;
        ThermalParams est = truth;
        est.r12_intercept_k_per_w = 201.58;
        est.r12_slope_k_per_w = 0.0;
        est.r4_k_per_w = 622.37;
        est.c1_j_per_k = 0.048;
        est.c23_j_per_k = 0.375;
        std::vector<ExperimentRecord> recs;
        for (double rpm : {0.0, 490.0, 1363.0}) {
            SyntheticRecordSpec s;
            s.name = fmt("spin_%04.0f", rpm);
            s.speed_rad_s = rpm * kRpmToRadS;
            recs.push_back(synthesize_record(truth, s));
        }
        const FitBounds bounds = FitBounds::from_estimates(est, 9.88);
        int good = 0, slope_good = 0;
        double worst_slope = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            FitOptions o;
            o.ga.seed = seed;
            const FitResult r = fit_parameters(recs, est, bounds, o);
            const auto rel = [](double a, double b) { return std::abs(a / b - 1.0); };
            const bool ok = rel(r.r12_line.intercept, 33.29) <= 0.05 && rel(r.tuned.r4_k_per_w, 154.76) <= 0.05 &&
                            rel(r.tuned.c1_j_per_k, 0.057) <= 0.03 && rel(r.tuned.c23_j_per_k, 0.381) <= 0.03;
            if (ok) ++good;
            const double es = rel(r.r12_line.slope, 0.034);
            worst_slope = std::max(worst_slope, es);
            if (es <= 0.15) ++slope_good;
        }
        return Outcome{good >= 9 && slope_good >= 9,
                       fmt("%d/10 seeds within tolerance, slope within 15%% in %d/10 (worst %.1f%%)", good,
                           slope_good, 100.0 * worst_slope)};
    });

    criterion(7, "calibrated hover cooling and winding-case gap", 30.0, [] {
        const ThermalParams p = calibrated_hover();
        const HeatCoolResult r = heat_then_cool(p, 0.24, 88.06);
        const bool cool_ok = r.cooling_settling_s && within(*r.cooling_settling_s, 352.0, 0.2 * 352.0);
        const bool gap_ok = within(r.peak_gap_c, 6.0, 2.0);
        return Outcome{cool_ok && gap_ok,
                       fmt("R0 %.4f ohm, m %.3g W s/rad, heat %s s; cooling %s s (target 352 +/- 20%%), gap %.2f C "
                           "(target 6 +/- 2)",
                           p.r0_ohm, p.bushing_slope_w_per_rad_s, opt(r.time_to_limit_s).c_str(),
                           opt(r.cooling_settling_s).c_str(), r.peak_gap_c)};
    });
    {
        // Informational: the same scenario with the R12 line read per rpm.
        const ThermalParams p = calibrated_hover(SpeedUnit::Rpm);
        const HeatCoolResult r = heat_then_cool(p, 0.24, 88.06);
        std::printf("     info  rpm speed unit: R0 %.4f ohm, m %.3g, cooling %s s, gap %.2f C\n", p.r0_ohm,
                    p.bushing_slope_w_per_rad_s, opt(r.cooling_settling_s).c_str(), r.peak_gap_c);
    }

    criterion(8, "heatsink system effect in the hover scenario", 10.0, [] {
        const ThermalParams p = calibrated_hover();
        const SystemEffect e = evaluate_design_in_system(467.38, 2.0 * p.c23_j_per_k, p, 0.24, 88.06);
        const bool t_ok = e.time_to_limit_with_s && within(*e.time_to_limit_with_s, 83.0, 0.2 * 83.0);
        const bool c_ok = e.cooling_with_s && within(*e.cooling_with_s, 260.0, 0.2 * 260.0);
        const auto pct = [](const std::optional<double>& v) { return v ? fmt("%+.1f%%", 100.0 * *v) : std::string("n/a"); };
        return Outcome{t_ok && c_ok,
                       fmt("limit %s s (target 83 +/- 20%%), cooling %s s (target 260 +/- 20%%), operating %s "
                           "(target +102.4%%), cooling %s (target -26.1%%)",
                           opt(e.time_to_limit_with_s).c_str(), opt(e.cooling_with_s).c_str(),
                           pct(e.operating_time_change).c_str(), pct(e.cooling_time_change).c_str())};
    });

    criterion(9, "fin ladder against the closed form and the 42-fin array", 5.0, [] {
        FinGeometry g;
        g.n_segments = 50;
        double worst = 0.0;
        for (int k = 0; k <= 95; ++k) {
            const double h = 5.0 + k;
            const double ladder = ladder_resistance(segment_ladder(g, h));
            worst = std::max(worst, std::abs(ladder / analytic_fin_resistance(g, h) - 1.0));
        }
        const double r42 = evaluate_design(g, 42, 29.5).total_resistance_k_per_w;
        const double h_cal = calibrate_convection(g, 42, 9.88);
        return Outcome{worst < 0.01 && within(r42, 9.88, 0.02 * 9.88),
                       fmt("worst ladder error %.3f%% over h 5..100; 42 fins at h 29.5: %.3f K/W (target 9.88 +/- "
                           "2%%); exact calibration gives h %.2f",
                           100.0 * worst, r42, h_cal)};
    });

    criterion(10, "heatsink optimizer returns a verified lighter design", 120.0, [] {
        FinGeometry ref;
        HeatsinkProblem prob;
        prob.h_w_per_m2_k = calibrate_convection(ref, 42, 9.88);
        const HeatsinkOptimum opt_result = optimize_heatsink(prob);
        const double ref_weight = array_weight(ref, 42);
        const FinArrayDesign& d = opt_result.design;
        const bool verified = satisfies_constraints(d, prob.target_r_max_k_per_w, prob.biot_max);
        const bool ok = opt_result.feasible && verified && d.total_weight_kg <= ref_weight &&
                        d.total_resistance_k_per_w <= prob.target_r_max_k_per_w * (1.0 + 1e-9);
        return Outcome{ok, fmt("%zu fins, L %.2f mm, t %.3f mm, w %.2f mm: %.3f K/W, Bi %.2e, %.3f g vs %.3f g",
                               d.n_fins, 1e3 * d.geometry.length_m, 1e3 * d.geometry.thickness_m,
                               1e3 * d.geometry.width_m, d.total_resistance_k_per_w, d.max_segment_biot,
                               1e3 * d.total_weight_kg, 1e3 * ref_weight)};
    });

    criterion(11, "frequency sweep peaks at resonance", 60.0, [] {
        const auto curve = frequency_sweep(ActuatorParams{}, 1.0, 10.0, 30.0, 41);
        const auto best = std::max_element(curve.begin(), curve.end(), [](const SweepPoint& a, const SweepPoint& b) {
            return a.pk_pk_amplitude_rad < b.pk_pk_amplitude_rad;
        });
        const double step = (30.0 - 10.0) / 40.0;
        return Outcome{std::abs(best->frequency_hz - 20.0) <= step + 1e-9,
                       fmt("peak at %.2f Hz, grid step %.2f Hz", best->frequency_hz, step)};
    });

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
