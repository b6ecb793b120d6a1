#pragma once

#include <array>
#include <cstddef>

namespace memsim {

template <std::size_t N>
using StateVector = std::array<double, N>;

/// One classical fourth-order Runge-Kutta step. `rhs(t, y)` returns dy/dt.
template <std::size_t N, class Rhs>
StateVector<N> rk4_step(const StateVector<N>& y, double t, double dt, Rhs&& rhs) {
    const double half = 0.5 * dt;
    auto shifted = [&y](const StateVector<N>& k, double h) {
        StateVector<N> out;
        for (std::size_t i = 0; i < N; ++i) out[i] = y[i] + h * k[i];
        return out;
    };

    const StateVector<N> k1 = rhs(t, y);
    const StateVector<N> k2 = rhs(t + half, shifted(k1, half));
    const StateVector<N> k3 = rhs(t + half, shifted(k2, half));
    const StateVector<N> k4 = rhs(t + dt, shifted(k3, dt));

    StateVector<N> next;
    const double sixth = dt / 6.0;
    for (std::size_t i = 0; i < N; ++i) next[i] = y[i] + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return next;
}

}  // namespace memsim
