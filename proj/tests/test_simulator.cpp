#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "memsim/error.hpp"
#include "memsim/simulator.hpp"

using namespace memsim;
using Catch::Approx;

namespace {

constexpr double kTanh20Over3 = 0.999996760811661553821209081023;  // mpmath

// I0/(omega S_W) = 10/3 at 1 kHz with S_W = 1e-4 C.
SinusoidCurrent tenthirds_drive() {
    const double w = 2 * std::numbers::pi * 1000.0;
    return {10.0 / 3.0 * w * 1e-4, w, 0.0};
}

SimConfig periods(const SinusoidCurrent& w, double n, int steps_per_period) {
    SimConfig cfg;
    cfg.dt = w.period() / steps_per_period;
    cfg.t_end = n * w.period();
    return cfg;
}

const ThresholdHysteronParams kCore{10.0, 1e-5, 1000.0, 1e-4, 1.0, -1.0};

}  // namespace

TEST_CASE("tanh device over one period reaches tanh(20/3)", "[simulator][phi]") {
    const DeviceModel dev = PhiTanhModel({1e-4, 0.0, 1e-4, 1.0});
    const auto w = tenthirds_drive();
    const SimulationTrace tr = simulate_current_driven(dev, w, periods(w, 1, 2000));
    const auto [lo, hi] = std::minmax_element(tr.magnetization.begin(), tr.magnetization.end());
    CHECK(*lo == Approx(0.0).margin(1e-6));
    CHECK(*hi == Approx(kTanh20Over3).margin(1e-6));
    CHECK(*lo >= -1e-12);
}

TEST_CASE("tanh device with m0 = 0.5 never drops below 0.5", "[simulator][phi]") {
    const DeviceModel dev = PhiTanhModel({1e-4, 0.5, 1e-4, 1.0});
    const auto w = tenthirds_drive();
    const SimulationTrace tr = simulate_current_driven(dev, w, periods(w, 7, 2000));
    const double m_min = *std::min_element(tr.magnetization.begin(), tr.magnetization.end());
    CHECK(m_min == Approx(0.5).margin(1e-9));
}

TEST_CASE("tanh trace keeps m and phi functions of q", "[simulator][phi]") {
    const PhiTanhModel model({2e-4, -0.3, 5e-5, 1.0});
    const auto w = tenthirds_drive();
    const SimulationTrace tr = simulate_current_driven(model, w, periods(w, 2, 1000));
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(model.is_consistent({tr.charge[i], tr.magnetization[i], tr.flux[i]}));
        CHECK(tr.voltage[i] == Approx(model.resistance(tr.charge[i]) * tr.current[i]).margin(1e-15));
    }
}

TEST_CASE("trace columns: equal length, increasing time, q integrates I", "[simulator]") {
    const DeviceModel dev = IdealMemristorModel({100.0, 40.0, 1e-4});
    const auto w = tenthirds_drive();
    SimConfig cfg = periods(w, 2, 4000);
    const SimulationTrace tr = simulate_current_driven(dev, w, cfg);
    REQUIRE(tr.size() == 8001);
    for (auto* col : {&tr.current, &tr.voltage, &tr.charge, &tr.magnetization, &tr.flux, &tr.capacitor_voltage})
        CHECK(col->size() == tr.size());
    double q = 0.0;
    double worst = 0.0;
    for (std::size_t i = 1; i < tr.size(); ++i) {
        REQUIRE(tr.t[i] > tr.t[i - 1]);
        q += 0.5 * (tr.current[i] + tr.current[i - 1]) * (tr.t[i] - tr.t[i - 1]);
        worst = std::max(worst, std::abs(q - tr.charge[i]));
    }
    // trapezoid error bound (h^2/12) * max|I''| * t
    const double bound = cfg.dt * cfg.dt / 12 * w.amplitude * w.angular_frequency * w.angular_frequency * cfg.t_end;
    CHECK(worst <= bound);
    CHECK(tr.final.t == Approx(cfg.t_end));
}

TEST_CASE("record stride thins the trace but keeps the final state", "[simulator]") {
    const DeviceModel dev = PhiTanhModel({1e-4, 0.0, 1e-4, 1.0});
    const auto w = tenthirds_drive();
    SimConfig cfg = periods(w, 1, 2000);
    cfg.record_stride = 7;
    const SimulationTrace tr = simulate_current_driven(dev, w, cfg);
    CHECK(tr.size() == 1 + 2000 / 7);
    CHECK(tr.steps == 2000);
    CHECK(tr.final.t == Approx(w.period()));
    CHECK(tr.final.charge == Approx(0.0).margin(1e-15));
}

TEST_CASE("zero drive leaves every column constant", "[simulator]") {
    const SinusoidCurrent off{0.0, 100.0, 0.0};
    SimConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 1e-1;
    for (const DeviceModel& dev : {DeviceModel{PhiTanhModel({1e-4, 0.2, 1e-4, 1.0})},
                                   DeviceModel{IdealMemristorModel({100.0, 50.0, 1e-6})},
                                   DeviceModel{ThresholdHysteronModel({10.0, 1e-2, 1000.0, 1e-4, 1.0, 0.3})}}) {
        const SimulationTrace tr = simulate_current_driven(dev, off, cfg);
        for (std::size_t i = 0; i < tr.size(); ++i) {
            CHECK(tr.current[i] == 0.0);
            CHECK(tr.voltage[i] == 0.0);
            CHECK(tr.charge[i] == tr.charge[0]);
            CHECK(tr.magnetization[i] == tr.magnetization[0]);
            CHECK(tr.flux[i] == tr.flux[0]);
        }
    }
}

TEST_CASE("step guards", "[simulator][errors]") {
    const DeviceModel dev = PhiTanhModel({1e-4, 0.0, 1e-4, 1.0});
    const auto w = tenthirds_drive();
    SimConfig cfg = periods(w, 1, 500);
    CHECK_THROWS_AS(simulate_current_driven(dev, w, cfg), StepSizeError);
    cfg.allow_coarse_step = true;
    CHECK_NOTHROW(simulate_current_driven(dev, w, cfg));

    const DeviceModel core = ThresholdHysteronModel(kCore);
    SimConfig hc;
    hc.dt = 2e-7;  // tau/50
    hc.t_end = 1e-4;
    CHECK_THROWS_AS(simulate_current_driven(core, SinusoidCurrent{0.02, 1000.0, 0.0}, hc), StepSizeError);
    const TestCircuit tc{1e-6, core, TriangularVoltagePulse{1.0, 0.0, 1e-5, 1e-5, 0.0}, 0.0};
    CHECK_THROWS_AS(simulate_test_circuit(tc, hc), StepSizeError);

    SimConfig bad;
    bad.dt = 1.0;
    bad.t_end = 0.5;
    CHECK_THROWS_AS(simulate_current_driven(dev, w, bad), ParameterError);
}

TEST_CASE("hysteron integration keeps |m| <= 1", "[simulator][hysteron][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int run = 0; run < 40; ++run) {
        ThresholdHysteronParams p = kCore;
        p.tau = std::pow(10.0, -6.0 + 2.0 * u(rng));
        p.m_init = 2.0 * u(rng) - 1.0;
        const SinusoidCurrent w{0.2 * u(rng), 2 * std::numbers::pi * std::pow(10.0, 2.0 + 2.0 * u(rng)), 0.0};
        SimConfig cfg;
        cfg.dt = std::min(p.tau / 100.0, w.period() / 1000.0);
        cfg.t_end = std::min(3.0 * w.period(), 4000 * cfg.dt);
        const SimulationTrace tr = simulate_current_driven(ThresholdHysteronModel(p), w, cfg);
        for (double m : tr.magnetization) REQUIRE(std::abs(m) <= 1.0 + 1e-9);
    }
}

TEST_CASE("hysteron loop: fixed point agrees with the direct solve", "[simulator][hysteron]") {
    const ThresholdHysteronModel core(kCore);
    const auto& p = core.params();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int clamped = 0;
    for (int i = 0; i < 20000; ++i) {
        const double drive = 30.0 * u(rng) * std::abs(u(rng) * u(rng));
        const double m = u(rng);
        const LoopSolution fp = solve_hysteron_loop(core, drive, m, 1e-10, 50);
        const LoopSolution ex = solve_hysteron_loop_exact(core, drive, m);
        REQUIRE_FALSE(fp.fallback);
        CHECK(fp.current == Approx(ex.current).margin(1e-9));
        CHECK(fp.rate == Approx(ex.rate).margin(1e-9 / p.tau));
        // the loop equation holds on every branch
        CHECK(drive == Approx(p.wire_resistance * ex.current + p.flux_scale * ex.rate).margin(1e-9));
        if (ex.clamped) {
            ++clamped;
            CHECK(fp.clamped);
            CHECK(std::abs(ex.current) == Approx(core.threshold_current()));
            // rate lies between the below- and above-threshold values
            const double target = ex.current > 0 ? 1.0 : -1.0;
            CHECK(ex.rate * target >= 0.0);
            CHECK(std::abs(ex.rate) <= std::abs((target - m) / p.tau) * (1 + 1e-12));
        }
    }
    CHECK(clamped > 100);
}

TEST_CASE("hysteron loop converges immediately away from the threshold", "[simulator][hysteron]") {
    const ThresholdHysteronModel core(kCore);
    const LoopSolution below = solve_hysteron_loop(core, 0.005, -1.0, 1e-10, 50);
    CHECK(below.current == Approx(0.005));
    CHECK(below.rate == 0.0);
    CHECK(below.iterations == 1);
    const LoopSolution above = solve_hysteron_loop(core, 25.0, -1.0, 1e-10, 50);
    CHECK(above.current == Approx(5.0));
    CHECK(above.rate == Approx(2e5));
    CHECK_FALSE(above.clamped);
    const LoopSolution pinned = solve_hysteron_loop(core, 5.0, -1.0, 1e-10, 50);
    CHECK(pinned.clamped);
    CHECK(pinned.current == Approx(0.01));
    CHECK(pinned.rate == Approx((5.0 - 0.01) / 1e-4));
}

TEST_CASE("test circuit with no source and no initial charge stays at zero", "[simulator][circuit]") {
    SimConfig cfg;
    cfg.dt = 1e-7;
    cfg.t_end = 1e-4;
    for (const DeviceModel& dev : {DeviceModel{PhiTanhModel({1e-6, 0.0, 1e-4, 1.0})},
                                   DeviceModel{IdealMemristorModel({100.0, 50.0, 1e-6})},
                                   DeviceModel{ThresholdHysteronModel(kCore)}}) {
        const TestCircuit tc{1e-6, dev, TriangularVoltagePulse{0.0, 0.0, 1e-5, 1e-5, 1e-5}, 0.0};
        const SimulationTrace tr = simulate_test_circuit(tc, cfg);
        for (std::size_t i = 0; i < tr.size(); ++i) {
            REQUIRE(tr.current[i] == 0.0);
            REQUIRE(tr.voltage[i] == 0.0);
            REQUIRE(tr.charge[i] == 0.0);
            REQUIRE(tr.capacitor_voltage[i] == 0.0);
        }
    }
}

TEST_CASE("circuit charge bookkeeping and passivity", "[simulator][circuit][property]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int run = 0; run < 30; ++run) {
        const double cap = std::pow(10.0, -7.0 + u(rng));
        const double vpk = (u(rng) < 0.5 ? -1.0 : 1.0) * (0.1 + 5.0 * u(rng));
        const double qscale = cap * std::abs(vpk);
        DeviceModel dev = run % 2 ? DeviceModel{IdealMemristorModel({100 + 900 * u(rng), 0, qscale * (0.3 + 2 * u(rng))})}
                                  : DeviceModel{PhiTanhModel({qscale * (1 + 2 * u(rng)), 0.8 * u(rng) - 0.4,
                                                              qscale * (100 + 900 * u(rng)), 1.0})};
        if (run % 2) {
            auto p = std::get<IdealMemristorModel>(dev).params();
            p.r_swing = 0.9 * p.r_mid * (2 * u(rng) - 1);
            dev = IdealMemristorModel(p);
        }
        const double tau = max_resistance(dev) * cap;
        const TestCircuit tc{cap, dev, TriangularVoltagePulse{vpk, 0.0, tau * (1 + 5 * u(rng)), tau * (1 + 5 * u(rng)), 25 * tau}, 0.0};
        SimConfig cfg;
        cfg.dt = tau / 400;
        cfg.t_end = total_duration(tc.source);
        const SimulationTrace tr = simulate_test_circuit(tc, cfg);

        double energy = 0.0;
        double q_scale = 0.0;
        for (double q : tr.charge) q_scale = std::max(q_scale, std::abs(q));
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const double lhs = tr.charge[i] - tr.charge[0];
            const double rhs = cap * (tr.capacitor_voltage[i] - tr.capacitor_voltage[0]);
            REQUIRE(std::abs(lhs - rhs) <= 1e-8 * q_scale);
            REQUIRE(tr.voltage[i] * tr.current[i] >= 0.0);
            if (i > 0)
                energy += 0.5 * (tr.voltage[i] * tr.current[i] + tr.voltage[i - 1] * tr.current[i - 1]) *
                          (tr.t[i] - tr.t[i - 1]);
        }
        CHECK(energy >= 0.0);
    }
}

TEST_CASE("tanh device in deep saturation raises a positivity error", "[simulator][circuit][errors]") {
    // C*V/S_W = 200: the resistance collapses long before the capacitor charges.
    const DeviceModel dev = PhiTanhModel({1e-8, 0.0, 1e-6, 1.0});
    const TestCircuit tc{1e-6, dev, TriangularVoltagePulse{2.0, 0.0, 1e-3, 1e-3, 1e-3}, 0.0};
    SimConfig cfg;
    cfg.dt = 1e-6;
    cfg.t_end = 3e-3;
    CHECK_THROWS_AS(simulate_test_circuit(tc, cfg), PositivityError);
}

TEST_CASE("gedanken pulse flips the core; tiny-step reference agrees", "[simulator][circuit][hysteron]") {
    const DeviceModel core = ThresholdHysteronModel(kCore);
    // Only the switching window: 5 us rise plus 200 us of the slow fall.
    const TestCircuit tc{1e-6, core, TriangularVoltagePulse{20.0, 0.0, 5e-6, 5e-3, 0.0}, 0.0};
    SimConfig cfg;
    cfg.dt = 1e-7;
    cfg.t_end = 205e-6;
    const SimulationTrace tr = simulate_test_circuit(tc, cfg);
    SimConfig fine = cfg;
    fine.dt = cfg.dt / 100;
    const SimulationTrace ref = simulate_test_circuit(tc, fine);

    CHECK(tr.final.magnetization == Approx(1.0).margin(0.01));
    CHECK(tr.final.magnetization == Approx(ref.final.magnetization).margin(1e-3));
    CHECK_FALSE(tr.loop.nonconverged);
    CHECK(tr.loop.threshold_clamped > 0);
    // After switching the fall current stays below threshold.
    CHECK(std::abs(tr.final.current) < 0.01);
    for (double m : tr.magnetization) REQUIRE(std::abs(m) <= 1.0 + 1e-9);
}
