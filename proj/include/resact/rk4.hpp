#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace resact {

template <std::size_t N>
using StateVector = std::array<double, N>;

/// One classical fourth-order Runge-Kutta step of dy/dt = rhs(t, y).
template <std::size_t N, class Rhs>
StateVector<N> rk4_step(const Rhs& rhs, double t, const StateVector<N>& y, double h) {
    auto axpy = [](const StateVector<N>& base, double a, const StateVector<N>& d) {
        StateVector<N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = base[i] + a * d[i];
        return out;
    };
    const StateVector<N> k1 = rhs(t, y);
    const StateVector<N> k2 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k1));
    const StateVector<N> k3 = rhs(t + 0.5 * h, axpy(y, 0.5 * h, k2));
    const StateVector<N> k4 = rhs(t + h, axpy(y, h, k3));
    StateVector<N> out;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = y[i] + h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0;
    }
    return out;
}

template <std::size_t N>
bool all_finite(const StateVector<N>& y) {
    for (double v : y) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace resact
