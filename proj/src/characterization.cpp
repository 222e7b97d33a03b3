#include "resact/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "resact/errors.hpp"

namespace resact {
namespace {

std::vector<double> moving_average(const std::vector<double>& x, std::size_t window) {
    if (window <= 1) return x;
    if (window % 2 == 0) throw InvalidInput("smoothing window must be odd");
    const std::size_t half = window / 2;
    const std::size_t n = x.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t reach = std::min({half, i, n - 1 - i});
        double s = 0.0;
        for (std::size_t j = i - reach; j <= i + reach; ++j) s += x[j];
        out[i] = s / static_cast<double>(2 * reach + 1);
    }
    return out;
}

// Index of the first sample of the trailing `cycles` complete cycles.
std::size_t window_start(const std::vector<double>& t, double frequency_hz, std::size_t cycles) {
    const double start = t.back() - static_cast<double>(cycles) / frequency_hz;
    const double tol = 1e-6 * (t[1] - t[0]);
    const auto it = std::lower_bound(t.begin(), t.end(), start - tol);
    return static_cast<std::size_t>(it - t.begin());
}

std::size_t complete_cycles(const std::vector<double>& t, double frequency_hz) {
    const double span = t.back() - t.front();
    return static_cast<std::size_t>(std::floor(span * frequency_hz + 1e-6));
}

}  // namespace

MotionTrace differentiate_trace(const MotionTrace& trace, std::size_t smoothing_window) {
    trace.validate();
    const std::size_t n = trace.size();
    if (n < 5) throw InsufficientData("differentiate_trace: need at least 5 samples");
    const double h = trace.time_s[1] - trace.time_s[0];
    const std::vector<double> x = moving_average(trace.position_rad, smoothing_window);

    std::vector<double> v(n), a(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        v[i] = (x[i + 1] - x[i - 1]) / (2.0 * h);
        a[i] = (x[i + 1] - 2.0 * x[i] + x[i - 1]) / (h * h);
    }
    v[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) / (2.0 * h);
    v[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) / (2.0 * h);
    a[0] = (2.0 * x[0] - 5.0 * x[1] + 4.0 * x[2] - x[3]) / (h * h);
    a[n - 1] = (2.0 * x[n - 1] - 5.0 * x[n - 2] + 4.0 * x[n - 3] - x[n - 4]) / (h * h);

    MotionTrace out = trace;
    out.sample_rate_hz = 1.0 / h;
    out.velocity_rad_s = std::move(v);
    out.accel_rad_s2 = std::move(a);
    return out;
}

InverseDynamics inverse_dynamics(const MotionTrace& trace, double load_inertia_kg_m2) {
    if (!(load_inertia_kg_m2 > 0.0)) throw InvalidInput("inverse_dynamics: load inertia must be > 0");
    if (!trace.velocity_rad_s || !trace.accel_rad_s2) {
        throw InvalidInput("inverse_dynamics: trace needs velocity and acceleration");
    }
    trace.validate();
    const auto& v = *trace.velocity_rad_s;
    const auto& a = *trace.accel_rad_s2;
    InverseDynamics out;
    out.torque_n_m.resize(a.size());
    out.power_w.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.torque_n_m[i] = load_inertia_kg_m2 * a[i];
        out.power_w[i] = out.torque_n_m[i] * v[i];
    }
    return out;
}

double rms(std::span<const double> series) {
    if (series.empty()) throw InsufficientData("rms: empty series");
    double s = 0.0;
    for (double x : series) s += x * x;
    return std::sqrt(s / static_cast<double>(series.size()));
}

double input_power(std::span<const double> voltage_v, std::span<const double> current_a) {
    if (voltage_v.size() != current_a.size()) throw InvalidInput("input_power: length mismatch");
    return rms(voltage_v) * rms(current_a);
}

double efficiency(double mech_power_avg_w, double input_power_w) {
    if (!(input_power_w > 0.0)) throw InvalidInput("efficiency: input power must be > 0");
    return mech_power_avg_w / input_power_w;
}

double effective_speed_rpm(const MotionTrace& trace, double frequency_hz) {
    trace.validate();
    if (!(frequency_hz > 0.0)) throw InvalidInput("effective_speed: frequency must be > 0");
    if (trace.size() < 2) throw InsufficientData("effective_speed: trace spans less than one cycle");
    const std::size_t cycles = complete_cycles(trace.time_s, frequency_hz);
    if (cycles < 1) throw InsufficientData("effective_speed: trace spans less than one cycle");
    const std::size_t first = window_start(trace.time_s, frequency_hz, cycles);
    double travel = 0.0;
    for (std::size_t i = first + 1; i < trace.size(); ++i) {
        travel += std::abs(trace.position_rad[i] - trace.position_rad[i - 1]);
    }
    const double rad_per_s = travel / static_cast<double>(cycles) * frequency_hz;
    return rad_per_s * 60.0 / (2.0 * std::numbers::pi);
}

DensityMetrics density_metrics(const TrialMetrics& metrics, double actuator_mass_kg) {
    if (!(actuator_mass_kg > 0.0)) throw InvalidInput("density_metrics: mass must be > 0");
    return {actuator_mass_kg, metrics.mech_power_avg_w / actuator_mass_kg,
            metrics.peak_torque_n_m / actuator_mass_kg};
}

TrialMetrics characterize_trial(const MotionTrace& motion, const ElectricalTrace& electrical,
                                const CharacterizationOptions& options) {
    motion.validate();
    if (!(options.frequency_hz > 0.0)) throw InvalidInput("characterize: frequency must be > 0");
    if (motion.size() < 5) throw InsufficientData("characterize: need at least 5 samples");
    if (electrical.voltage_v.size() != electrical.current_a.size() || electrical.voltage_v.empty()) {
        throw InvalidInput("characterize: electrical trace is empty or ragged");
    }
    const MotionTrace kin = (motion.velocity_rad_s && motion.accel_rad_s2 && options.smoothing_window <= 1)
                                ? motion
                                : differentiate_trace(motion, options.smoothing_window);

    const std::size_t available = complete_cycles(kin.time_s, options.frequency_hz);
    if (available < 1) throw InsufficientData("characterize: less than one complete cycle");
    const std::size_t cycles = std::min(available, options.max_cycles);
    const std::size_t first = window_start(kin.time_s, options.frequency_hz, cycles);

    MotionTrace window;
    window.sample_rate_hz = kin.sample_rate_hz;
    auto slice = [first](const std::vector<double>& v) {
        return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(first), v.end());
    };
    window.time_s = slice(kin.time_s);
    window.position_rad = slice(kin.position_rad);
    window.velocity_rad_s = slice(*kin.velocity_rad_s);
    window.accel_rad_s2 = slice(*kin.accel_rad_s2);

    const InverseDynamics dyn = inverse_dynamics(window, options.load_inertia_kg_m2);

    TrialMetrics m;
    m.n_cycles_used = cycles;
    for (double tq : dyn.torque_n_m) m.peak_torque_n_m = std::max(m.peak_torque_n_m, std::abs(tq));
    // Averages run over [start, end): the closing sample repeats the opening phase.
    const std::size_t n_avg = window.size() - 1;
    double power_sum = 0.0;
    for (std::size_t k = 0; k < n_avg; ++k) {
        if (options.damping_n_m_s_per_rad) {
            const double w = (*window.velocity_rad_s)[k];
            power_sum += *options.damping_n_m_s_per_rad * w * w;
        } else {
            power_sum += std::abs(dyn.power_w[k]);
        }
    }
    m.mech_power_avg_w = power_sum / static_cast<double>(n_avg);
    const auto [lo, hi] = std::minmax_element(window.position_rad.begin(), window.position_rad.end());
    m.pk_pk_amplitude_deg = (*hi - *lo) * 180.0 / std::numbers::pi;
    m.effective_speed_rpm = effective_speed_rpm(window, options.frequency_hz);

    // Electrical window: same trailing time span.
    const double t_start = window.time_s.front();
    const double t_end = window.time_s.back();
    const double tol = 1e-6 / window.sample_rate_hz;
    std::vector<double> v, i;
    for (std::size_t k = 0; k < electrical.size(); ++k) {
        if (electrical.time_s[k] >= t_start - tol && electrical.time_s[k] < t_end - tol) {
            v.push_back(electrical.voltage_v[k]);
            i.push_back(electrical.current_a[k]);
        }
    }
    if (v.empty()) throw InsufficientData("characterize: electrical trace does not cover the window");
    m.rms_voltage_v = rms(v);
    m.rms_current_a = rms(i);
    m.input_power_w = m.rms_voltage_v * m.rms_current_a;
    m.efficiency = m.input_power_w > 0.0 ? efficiency(m.mech_power_avg_w, m.input_power_w) : 0.0;
    return m;
}

}  // namespace resact
