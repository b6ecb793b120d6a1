#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "memsim/scenario.hpp"
#include "memsim/simulator.hpp"
#include "random_circuits.hpp"

using namespace memsim;
using Catch::Approx;

namespace {

Scenario bundled(const char* name) { return load_scenario(std::string(MEMSIM_SCENARIO_DIR) + "/" + name); }

TestCircuit circuit_of(const Scenario& s) {
    return {s.circuit->capacitance, s.make_device(), std::get<TriangularVoltagePulse>(s.drive),
            s.circuit->initial_capacitor_voltage};
}

TestVerdict run_bundled(const Scenario& s) { return run_memristor_test(circuit_of(s), s.sim, s.circuit->tolerances); }

// Gedanken circuit at a given pulse amplitude.
TestVerdict gedanken_at(double v_peak) {
    Scenario s = bundled("gedanken.scn");
    std::get<TriangularVoltagePulse>(s.drive).peak = v_peak;
    return run_bundled(s);
}

// Linear RC charging during the rise: I(t_rise) = C V/t_rise (1 - exp(-t_rise/(R_w C))).
constexpr double kThresholdAmplitude = 0.01 * 5e-6 / (1e-6 * (1.0 - 0.006737946999085467));

}  // namespace

TEST_CASE("ideal memristor passes the capacitor test", "[memtest]") {
    const TestVerdict v = run_bundled(bundled("ideal_memtest.scn"));
    CHECK(v.outcome == VerdictOutcome::pass);
    CHECK(v.charge_returned);
    CHECK(v.state_returned);
    REQUIRE(v.is_ideal_memristor_behavior.has_value());
    CHECK(*v.is_ideal_memristor_behavior);
    CHECK(std::abs(v.delta_capacitor_charge) < v.charge_tolerance);
    CHECK(v.charge_tolerance == Approx(1e-9 * 1e-6 * 1.0));
    CHECK(std::abs(v.delta_q) < 1e-14);
    CHECK(v.tail_ok);
}

TEST_CASE("tanh device read as V = R(q) I passes the capacitor test", "[memtest]") {
    const TestVerdict v = run_bundled(bundled("phi_memtest.scn"));
    CHECK(v.outcome == VerdictOutcome::pass);
    CHECK(std::abs(v.delta_m) < 1e-6);
    CHECK(v.delta_r_rel < 1e-6);
    CHECK(v.initial_state.m == Approx(0.2));
}

TEST_CASE("random resistive-form circuits always pass", "[memtest][property]") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 20; ++i) {
        const auto rc = testing::random_resistive_circuit(rng, i % 2 == 0);
        INFO(rc.label);
        const TestVerdict v = run_memristor_test(rc.circuit, rc.sim);
        CHECK(v.outcome == VerdictOutcome::pass);
        CHECK(v.tail_ok);
    }
}

TEST_CASE("threshold core fails: the fast rise flips it, the slow fall cannot", "[memtest][hysteron]") {
    const Scenario s = bundled("gedanken.scn");
    const TestCircuit tc = circuit_of(s);
    const SimulationTrace trace = simulate_test_circuit(tc, s.sim);
    const TestVerdict v = judge_memristor_test(tc, trace, s.circuit->tolerances);

    CHECK(v.outcome == VerdictOutcome::fail);
    CHECK(v.charge_returned);
    REQUIRE(v.is_ideal_memristor_behavior.has_value());
    CHECK_FALSE(*v.is_ideal_memristor_behavior);
    CHECK(std::abs(v.delta_capacitor_charge) <= v.charge_tolerance);
    CHECK(std::abs(v.delta_m) == Approx(2.0).margin(0.01));
    CHECK_FALSE(v.loop.nonconverged);

    // Rise-phase current well above threshold; fall-phase current below it.
    const double i_th = 0.01;
    double rise_peak = 0.0;
    double fall_peak = 0.0;
    const double t_rise_end = 5e-6;
    SimConfig fine_rise = s.sim;
    fine_rise.t_end = t_rise_end;
    fine_rise.record_stride = 1;
    for (double i : simulate_test_circuit(tc, fine_rise).current) rise_peak = std::max(rise_peak, std::abs(i));
    for (std::size_t k = 0; k < trace.size(); ++k)
        if (trace.t[k] > 50e-6) fall_peak = std::max(fall_peak, std::abs(trace.current[k]));
    CHECK(rise_peak >= 3 * i_th);
    CHECK(fall_peak < i_th);

    // dt/100 over the switching window.
    SimConfig window = s.sim;
    window.t_end = 205e-6;
    SimConfig fine = window;
    fine.dt /= 100;
    const double m_coarse = simulate_test_circuit(tc, window).final.magnetization;
    const double m_fine = simulate_test_circuit(tc, fine).final.magnetization;
    CHECK(m_coarse == Approx(m_fine).margin(1e-3));
    CHECK(v.final_state.m == Approx(m_fine).margin(1e-3));
}

TEST_CASE("below-threshold pulse leaves the core alone", "[memtest][hysteron]") {
    const TestVerdict v = gedanken_at(0.5 * kThresholdAmplitude);
    CHECK(v.outcome == VerdictOutcome::pass);
    CHECK(v.delta_m == 0.0);
    CHECK(v.loop.threshold_clamped == 0);
}

TEST_CASE("verdict flips at the switching amplitude", "[memtest][hysteron]") {
    CHECK(kThresholdAmplitude == Approx(0.050339).margin(1e-6));
    CHECK(gedanken_at(0.99 * kThresholdAmplitude).outcome == VerdictOutcome::pass);
    const TestVerdict above = gedanken_at(1.05 * kThresholdAmplitude);
    CHECK(above.outcome == VerdictOutcome::fail);
    CHECK(above.delta_m > 1e-6);
}

TEST_CASE("short tail is inconclusive", "[memtest]") {
    const Scenario s = bundled("short_tail.scn");
    const TestVerdict v = run_bundled(s);
    CHECK(v.outcome == VerdictOutcome::inconclusive);
    CHECK_FALSE(v.charge_returned);
    CHECK_FALSE(v.is_ideal_memristor_behavior.has_value());
    CHECK_FALSE(v.tail_ok);
    CHECK(v.tail_duration == Approx(1e-4));
    CHECK(v.tail_required == Approx(20 * 150.0 * 1e-6));
}

TEST_CASE("initial capacitor voltage sets the charge scale", "[memtest]") {
    // Pre-charged capacitor, no source: it discharges and does not return.
    const TestCircuit tc{1e-6, IdealMemristorModel({100.0, 0.0, 1e-6}), TriangularVoltagePulse{0.0, 0.0, 1e-4, 1e-4, 1e-3},
                         2.0};
    SimConfig cfg;
    cfg.dt = 1e-6;
    cfg.t_end = 1.2e-3;
    const TestVerdict v = run_memristor_test(tc, cfg);
    CHECK(v.charge_tolerance == Approx(1e-9 * 1e-6 * 2.0));
    CHECK(v.delta_capacitor_charge == Approx(-2e-6).epsilon(1e-4));
    CHECK(v.outcome == VerdictOutcome::inconclusive);
}
