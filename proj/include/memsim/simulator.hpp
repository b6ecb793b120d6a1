#pragma once

// Transient drivers: current-driven devices and the series capacitor-device
// loop used by the memristor ideality test.

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "memsim/models.hpp"
#include "memsim/waveforms.hpp"

namespace memsim {

struct SimConfig {
    double dt = 1e-6;
    double t_end = 1e-3;
    std::size_t record_stride = 1;
    double algebraic_tol = 1e-10;
    int max_fp_iters = 50;
    /// Disables the accuracy guards (dt <= T/1000 for sinusoids, dt <= tau/100
    /// for hysteron devices).
    bool allow_coarse_step = false;

    void validate() const;
    std::size_t step_count() const;
    bool operator==(const SimConfig&) const = default;
};

enum class Column { time, current, field, voltage, charge, magnetization, flux, capacitor_voltage };

std::string_view column_name(Column c);
std::optional<Column> column_from_name(std::string_view name);

struct Sample {
    double t = 0.0;
    double current = 0.0;
    double voltage = 0.0;
    double charge = 0.0;
    double magnetization = 0.0;
    double flux = 0.0;
    double capacitor_voltage = 0.0;
};

/// Counters from the hysteron algebraic-loop solve.
struct LoopDiagnostics {
    std::size_t evaluations = 0;
    std::size_t fixed_point_iterations = 0;
    std::size_t threshold_clamped = 0;  ///< resolved onto the threshold (sliding) branch
    std::size_t fallback = 0;           ///< iteration cap hit
    bool nonconverged = false;          ///< fallback on more than 1% of evaluations
};

/// Uniformly sampled time series. Columns have equal length; `final` holds
/// the last integrated state even when it is not on the record stride.
struct SimulationTrace {
    std::vector<double> t;
    std::vector<double> current;
    std::vector<double> voltage;
    std::vector<double> charge;
    std::vector<double> magnetization;
    std::vector<double> flux;
    std::vector<double> capacitor_voltage;

    double field_per_current = 1.0;
    Sample initial;
    Sample final;
    std::size_t steps = 0;
    LoopDiagnostics loop;

    std::size_t size() const noexcept { return t.size(); }
    void push_back(const Sample& s);
    Sample at(std::size_t i) const;
    double value(Column c, std::size_t i) const;
    std::vector<double> column(Column c) const;
};

struct TestCircuit {
    double capacitance = 1e-6;
    DeviceModel device;
    VoltageWaveform source;
    double initial_capacitor_voltage = 0.0;
};

struct TestTolerances {
    double charge_rel = 1e-9;      ///< scaled by C * max(|V_peak|, |V_C_init|)
    double magnetization = 1e-6;   ///< |dm|
    double resistance_rel = 1e-6;  ///< |dR|/R

    bool operator==(const TestTolerances&) const = default;
};

enum class VerdictOutcome { pass, fail, inconclusive };
std::string_view outcome_name(VerdictOutcome v);

struct TestVerdict {
    bool charge_returned = false;
    double delta_capacitor_charge = 0.0;
    double charge_tolerance = 0.0;

    bool state_returned = false;
    double delta_q = 0.0;
    double delta_m = 0.0;
    double delta_r_rel = 0.0;

    /// Only set when charge_returned holds.
    std::optional<bool> is_ideal_memristor_behavior;
    VerdictOutcome outcome = VerdictOutcome::inconclusive;

    double tail_duration = 0.0;
    double tail_required = 0.0;
    bool tail_ok = false;

    TestTolerances tolerances;
    DeviceState initial_state;
    DeviceState final_state;
    LoopDiagnostics loop;
};

/// Integrates dq/dt = I(t) (and dm/dt for the hysteron) with fixed-step RK4.
SimulationTrace simulate_current_driven(const DeviceModel& device, const SinusoidCurrent& drive,
                                        const SimConfig& cfg);

/// Integrates the series loop source -> device -> capacitor.
SimulationTrace simulate_test_circuit(const TestCircuit& tc, const SimConfig& cfg);

/// Simulates the circuit and compares the final device state with the
/// initial one, provided the capacitor charge has returned.
TestVerdict run_memristor_test(const TestCircuit& tc, const SimConfig& cfg, const TestTolerances& tol = {});

/// Verdict from an already simulated trace of `tc`.
TestVerdict judge_memristor_test(const TestCircuit& tc, const SimulationTrace& trace, const TestTolerances& tol = {});

/// Solution of the hysteron loop equation drive = R_w I + K_phi dm/dt.
struct LoopSolution {
    double current = 0.0;
    double rate = 0.0;
    bool clamped = false;
    bool fallback = false;
    int iterations = 0;
};

/// Fixed-point resolution of the algebraic loop for net drive voltage
/// `drive` = V_s - V_C at magnetization m.
LoopSolution solve_hysteron_loop(const ThresholdHysteronModel& model, double drive, double m, double tol,
                                 int max_iters);

/// Direct piecewise solution of the same equation (residual is monotone in I
/// with jumps at the threshold).
LoopSolution solve_hysteron_loop_exact(const ThresholdHysteronModel& model, double drive, double m);

}  // namespace memsim
