#pragma once

#include <cstddef>
#include <span>

namespace resact {

/// Composite Simpson integral of uniformly spaced samples. An odd number of
/// intervals closes with the 3/8 rule over the last three; one or two
/// intervals fall back to the trapezoid rule.
inline double simpson(std::span<const double> f, double h) {
    const std::size_t n = f.size();
    if (n < 2) return 0.0;
    const std::size_t intervals = n - 1;
    if (intervals < 3 && intervals % 2 == 1) {
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) s += 0.5 * h * (f[i] + f[i + 1]);
        return s;
    }
    const std::size_t simpson_intervals = intervals % 2 == 0 ? intervals : intervals - 3;
    double s = 0.0;
    for (std::size_t i = 0; i + 2 <= simpson_intervals; i += 2) {
        s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
    }
    if (simpson_intervals != intervals) {
        const std::size_t j = simpson_intervals;
        s += 3.0 * h / 8.0 * (f[j] + 3.0 * f[j + 1] + 3.0 * f[j + 2] + f[j + 3]);
    }
    return s;
}

/// Cumulative trapezoid integral, same length as the input, starting at zero.
template <class Out>
void cumulative_trapezoid(std::span<const double> f, double h, Out& out) {
    out.assign(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
}

}  // namespace resact
