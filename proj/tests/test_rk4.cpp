#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "memsim/rk4.hpp"
#include "memsim/waveforms.hpp"

using namespace memsim;
using Catch::Approx;

namespace {

// Max |q_rk4 - q_closed| over `periods` periods of dq/dt = I0 sin(w t).
double max_charge_error(const SinusoidCurrent& w, int steps_per_period, int periods = 3) {
    const double dt = w.period() / steps_per_period;
    auto rhs = [&w](double t, const StateVector<1>&) { return StateVector<1>{eval_current(w, t)}; };
    StateVector<1> q{0.0};
    double err = 0.0;
    for (int i = 0; i < steps_per_period * periods; ++i) {
        q = rk4_step(q, i * dt, dt, rhs);
        err = std::max(err, std::abs(q[0] - charge_integral(w, (i + 1) * dt)));
    }
    return err;
}

}  // namespace

TEST_CASE("rk4_step leaves the state alone for a zero derivative", "[rk4]") {
    const StateVector<3> y{1.0, -2.5, 3e-7};
    const auto next = rk4_step(y, 0.3, 0.01, [](double, const StateVector<3>&) { return StateVector<3>{}; });
    CHECK(next == y);
}

TEST_CASE("rk4_step integrates one sine period back to zero", "[rk4]") {
    const SinusoidCurrent w{2.0, 2 * std::numbers::pi * 60.0, 0.0};
    const double dt = w.period() / 1000;
    auto rhs = [&w](double t, const StateVector<1>&) { return StateVector<1>{eval_current(w, t)}; };
    StateVector<1> q{0.0};
    for (int i = 0; i < 1000; ++i) q = rk4_step(q, i * dt, dt, rhs);
    CHECK(std::abs(q[0]) < 1e-10 * w.amplitude / w.angular_frequency);
}

TEST_CASE("rk4 global error is fourth order", "[rk4]") {
    const SinusoidCurrent w{1.0, 2 * std::numbers::pi, 0.0};
    const double e1 = max_charge_error(w, 20);
    const double e2 = max_charge_error(w, 40);
    const double e3 = max_charge_error(w, 80);
    CHECK(e1 / e2 == Approx(16.0).epsilon(0.2));
    CHECK(e2 / e3 == Approx(16.0).epsilon(0.2));
}

TEST_CASE("rk4 on linear decay matches the exponential", "[rk4]") {
    auto rhs = [](double, const StateVector<2>& y) { return StateVector<2>{-y[0], -2.0 * y[1]}; };
    StateVector<2> y{1.0, 1.0};
    const double dt = 1e-3;
    for (int i = 0; i < 1000; ++i) y = rk4_step(y, i * dt, dt, rhs);
    CHECK(y[0] == Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(y[1] == Approx(std::exp(-2.0)).epsilon(1e-11));
}
