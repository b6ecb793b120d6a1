#include "memsim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <type_traits>

#include <fmt/format.h>

#include "memsim/error.hpp"
#include "memsim/overloaded.hpp"
#include "memsim/rk4.hpp"

namespace memsim {

namespace {

// Below this the tanh device has left any physically meaningful regime and
// the explicit loop integration is no longer trustworthy.
constexpr double kMinResistance = 1e-15;

void require_finite_state(std::span<const double> y, double t) {
    for (double v : y) {
        if (!std::isfinite(v)) throw SimulationError(fmt::format("non-finite state at t = {:.17g}", t));
    }
}

double checked_resistance(const PhiTanhModel& m, double q) {
    const double r = m.resistance(q);
    if (!(r >= kMinResistance))
        throw PositivityError(fmt::format("tanh device resistance {:.3e} Ohm fell below {:.0e} Ohm at q = {:.17g} C",
                                          r, kMinResistance, q));
    return r;
}

double device_resistance(const DeviceModel& model, double q) {
    return std::visit(overloaded{
                          [q](const PhiTanhModel& m) { return m.resistance(q); },
                          [q](const IdealMemristorModel& m) { return m.resistance(q); },
                          [](const ThresholdHysteronModel& m) { return m.params().wire_resistance; },
                      },
                      model);
}

void check_hysteron_step(const ThresholdHysteronModel& m, const SimConfig& cfg) {
    if (cfg.allow_coarse_step) return;
    if (cfg.dt > m.params().tau / 100.0)
        throw StepSizeError(fmt::format("dt = {:.6g} s exceeds tau/100 = {:.6g} s for the hysteron device", cfg.dt,
                                        m.params().tau / 100.0));
}

void finish_diagnostics(LoopDiagnostics& d) {
    d.nonconverged = d.evaluations > 0 && static_cast<double>(d.fallback) > 0.01 * static_cast<double>(d.evaluations);
}

}  // namespace

// ---------------------------------------------------------------------------

void SimConfig::validate() const {
    if (!std::isfinite(dt) || !(dt > 0.0)) throw ParameterError("dt", "must be finite and > 0");
    if (!std::isfinite(t_end) || !(t_end > dt)) throw ParameterError("t_end", "must be finite and > dt");
    if (record_stride < 1) throw ParameterError("record_stride", "must be >= 1");
    if (!std::isfinite(algebraic_tol) || !(algebraic_tol > 0.0))
        throw ParameterError("algebraic_tol", "must be finite and > 0");
    if (max_fp_iters < 1) throw ParameterError("max_fp_iters", "must be >= 1");
}

std::size_t SimConfig::step_count() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }

std::string_view column_name(Column c) {
    switch (c) {
        case Column::time: return "t";
        case Column::current: return "I";
        case Column::field: return "H";
        case Column::voltage: return "V_device";
        case Column::charge: return "q";
        case Column::magnetization: return "m";
        case Column::flux: return "phi";
        case Column::capacitor_voltage: return "V_C";
    }
    return "?";
}

std::optional<Column> column_from_name(std::string_view name) {
    for (Column c : {Column::time, Column::current, Column::field, Column::voltage, Column::charge,
                     Column::magnetization, Column::flux, Column::capacitor_voltage}) {
        if (column_name(c) == name) return c;
    }
    return std::nullopt;
}

void SimulationTrace::push_back(const Sample& s) {
    t.push_back(s.t);
    current.push_back(s.current);
    voltage.push_back(s.voltage);
    charge.push_back(s.charge);
    magnetization.push_back(s.magnetization);
    flux.push_back(s.flux);
    capacitor_voltage.push_back(s.capacitor_voltage);
}

Sample SimulationTrace::at(std::size_t i) const {
    return {t.at(i), current.at(i), voltage.at(i), charge.at(i), magnetization.at(i), flux.at(i),
            capacitor_voltage.at(i)};
}

double SimulationTrace::value(Column c, std::size_t i) const {
    switch (c) {
        case Column::time: return t.at(i);
        case Column::current: return current.at(i);
        case Column::field: return field_per_current * current.at(i);
        case Column::voltage: return voltage.at(i);
        case Column::charge: return charge.at(i);
        case Column::magnetization: return magnetization.at(i);
        case Column::flux: return flux.at(i);
        case Column::capacitor_voltage: return capacitor_voltage.at(i);
    }
    return 0.0;
}

std::vector<double> SimulationTrace::column(Column c) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = value(c, i);
    return out;
}

std::string_view outcome_name(VerdictOutcome v) {
    switch (v) {
        case VerdictOutcome::pass: return "pass";
        case VerdictOutcome::fail: return "fail";
        case VerdictOutcome::inconclusive: return "inconclusive";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Hysteron loop equation: drive = R_w I + K_phi rate(m, k_H I).

LoopSolution solve_hysteron_loop_exact(const ThresholdHysteronModel& model, double drive, double m) {
    const auto& p = model.params();
    const double free_current = drive / p.wire_resistance;
    if (std::abs(model.field(free_current)) < p.coercive_field) return {free_current, 0.0, false, false, 0};

    const double sign = free_current > 0.0 ? 1.0 : -1.0;
    const double switching_rate = (sign - m) / p.tau;
    const double on_current = (drive - p.flux_scale * switching_rate) / p.wire_resistance;
    if (sign * model.field(on_current) >= p.coercive_field) return {on_current, switching_rate, false, false, 0};

    // The residual jumps across zero at the threshold: the current sits on
    // the threshold and the EMF absorbs the remaining drive.
    const double pinned = sign * model.threshold_current();
    return {pinned, (drive - p.wire_resistance * pinned) / p.flux_scale, true, false, 0};
}

LoopSolution solve_hysteron_loop(const ThresholdHysteronModel& model, double drive, double m, double tol,
                                 int max_iters) {
    const auto& p = model.params();
    double current = drive / p.wire_resistance;
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int it = 1; it <= max_iters; ++it) {
        const double rate = model.rate(m, model.field(current));
        const double next = (drive - p.flux_scale * rate) / p.wire_resistance;
        if (std::abs(next - current) <= tol * std::max(1.0, std::abs(current))) return {current, rate, false, false, it};
        if (std::abs(next - previous) <= tol * std::max(1.0, std::abs(next))) {
            LoopSolution s = solve_hysteron_loop_exact(model, drive, m);
            s.clamped = true;
            s.iterations = it;
            return s;
        }
        previous = current;
        current = next;
    }
    LoopSolution s = solve_hysteron_loop_exact(model, drive, m);
    s.fallback = true;
    s.iterations = max_iters;
    return s;
}

// ---------------------------------------------------------------------------

SimulationTrace simulate_current_driven(const DeviceModel& device, const SinusoidCurrent& drive,
                                        const SimConfig& cfg) {
    cfg.validate();
    validate(drive);
    if (!cfg.allow_coarse_step && drive.amplitude > 0.0 && cfg.dt > drive.period() / 1000.0)
        throw StepSizeError(fmt::format("dt = {:.6g} s exceeds period/1000 = {:.6g} s", cfg.dt,
                                        drive.period() / 1000.0));

    SimulationTrace trace;
    trace.field_per_current = field_per_current(device);

    std::visit(
        [&](const auto& model) {
            using Model = std::decay_t<decltype(model)>;
            constexpr bool hysteron = std::is_same_v<Model, ThresholdHysteronModel>;
            if constexpr (hysteron) check_hysteron_step(model, cfg);

            // y = {q, m}; m is only integrated for the hysteron.
            auto rhs = [&](double t, const StateVector<2>& y) -> StateVector<2> {
                const double current = eval_current(drive, t);
                if constexpr (hysteron) return {current, model.rate(y[1], model.field(current))};
                else return {current, 0.0};
            };
            auto sample = [&](double t, const StateVector<2>& y) {
                const double current = eval_current(drive, t);
                Sample s{.t = t, .current = current, .charge = y[0]};
                if constexpr (hysteron) {
                    const double rate = model.rate(y[1], model.field(current));
                    s.magnetization = y[1];
                    s.flux = flux_of(y[1], model.params().flux_scale);
                    s.voltage = model.voltage(rate, current);
                } else {
                    const DeviceState st = model.state_at(y[0]);
                    s.magnetization = st.m;
                    s.flux = st.phi;
                    s.voltage = model.voltage(y[0], current);
                }
                return s;
            };

            const DeviceState init = model.initial_state();
            StateVector<2> y{init.q, init.m};
            const std::size_t n = cfg.step_count();
            trace.initial = sample(0.0, y);
            trace.push_back(trace.initial);
            for (std::size_t i = 0; i < n; ++i) {
                const double t = static_cast<double>(i) * cfg.dt;
                y = rk4_step(y, t, cfg.dt, rhs);
                const double t_next = static_cast<double>(i + 1) * cfg.dt;
                require_finite_state(y, t_next);
                if ((i + 1) % cfg.record_stride == 0) trace.push_back(sample(t_next, y));
                if (i + 1 == n) trace.final = sample(t_next, y);
            }
            trace.steps = n;
        },
        device);
    return trace;
}

// ---------------------------------------------------------------------------

SimulationTrace simulate_test_circuit(const TestCircuit& tc, const SimConfig& cfg) {
    cfg.validate();
    if (!std::isfinite(tc.capacitance) || !(tc.capacitance > 0.0)) throw ParameterError("C", "must be finite and > 0");
    if (!std::isfinite(tc.initial_capacitor_voltage)) throw ParameterError("V_C_init", "must be finite");
    if (const auto* pulse = std::get_if<TriangularVoltagePulse>(&tc.source)) validate(*pulse);

    const double cap = tc.capacitance;
    SimulationTrace trace;
    trace.field_per_current = field_per_current(tc.device);

    std::visit(
        [&](const auto& model) {
            using Model = std::decay_t<decltype(model)>;
            constexpr bool hysteron = std::is_same_v<Model, ThresholdHysteronModel>;
            if constexpr (hysteron) check_hysteron_step(model, cfg);

            LoopDiagnostics& diag = trace.loop;
            auto solve = [&](double t, const StateVector<3>& y) {
                const double drive = eval_voltage(tc.source, t) - y[1];
                if constexpr (hysteron) {
                    const LoopSolution s =
                        solve_hysteron_loop(model, drive, y[2], cfg.algebraic_tol, cfg.max_fp_iters);
                    ++diag.evaluations;
                    diag.fixed_point_iterations += static_cast<std::size_t>(s.iterations);
                    if (s.clamped) ++diag.threshold_clamped;
                    if (s.fallback) ++diag.fallback;
                    return s;
                } else {
                    double r = 0.0;
                    if constexpr (std::is_same_v<Model, PhiTanhModel>) r = checked_resistance(model, y[0]);
                    else r = model.resistance(y[0]);
                    return LoopSolution{drive / r, 0.0, false, false, 0};
                }
            };

            // y = {q, V_C, m}; m is only integrated for the hysteron.
            auto rhs = [&](double t, const StateVector<3>& y) -> StateVector<3> {
                const LoopSolution s = solve(t, y);
                return {s.current, s.current / cap, s.rate};
            };
            auto sample = [&](double t, const StateVector<3>& y) {
                const LoopSolution sol = solve(t, y);
                Sample s{.t = t, .current = sol.current, .charge = y[0], .capacitor_voltage = y[1]};
                if constexpr (hysteron) {
                    s.magnetization = y[2];
                    s.flux = flux_of(y[2], model.params().flux_scale);
                    s.voltage = model.voltage(sol.rate, sol.current);
                } else {
                    const DeviceState st = model.state_at(y[0]);
                    s.magnetization = st.m;
                    s.flux = st.phi;
                    s.voltage = model.voltage(y[0], sol.current);
                }
                return s;
            };

            const DeviceState init = model.initial_state();
            StateVector<3> y{init.q, tc.initial_capacitor_voltage, init.m};
            const std::size_t n = cfg.step_count();
            trace.initial = sample(0.0, y);
            trace.push_back(trace.initial);
            for (std::size_t i = 0; i < n; ++i) {
                const double t = static_cast<double>(i) * cfg.dt;
                y = rk4_step(y, t, cfg.dt, rhs);
                const double t_next = static_cast<double>(i + 1) * cfg.dt;
                require_finite_state(y, t_next);
                if ((i + 1) % cfg.record_stride == 0) trace.push_back(sample(t_next, y));
                if (i + 1 == n) trace.final = sample(t_next, y);
            }
            trace.steps = n;
            finish_diagnostics(diag);
        },
        tc.device);
    return trace;
}

// ---------------------------------------------------------------------------

TestVerdict run_memristor_test(const TestCircuit& tc, const SimConfig& cfg, const TestTolerances& tol) {
    return judge_memristor_test(tc, simulate_test_circuit(tc, cfg), tol);
}

TestVerdict judge_memristor_test(const TestCircuit& tc, const SimulationTrace& trace, const TestTolerances& tol) {
    TestVerdict v;
    v.tolerances = tol;
    v.loop = trace.loop;
    v.initial_state = {trace.initial.charge, trace.initial.magnetization, trace.initial.flux};
    v.final_state = {trace.final.charge, trace.final.magnetization, trace.final.flux};

    double voltage_scale = std::max(peak_magnitude(tc.source), std::abs(tc.initial_capacitor_voltage));
    if (voltage_scale == 0.0) voltage_scale = 1.0;
    v.charge_tolerance = tol.charge_rel * tc.capacitance * voltage_scale;
    v.delta_capacitor_charge = tc.capacitance * (trace.final.capacitor_voltage - trace.initial.capacitor_voltage);
    v.charge_returned = std::abs(v.delta_capacitor_charge) < v.charge_tolerance;

    v.delta_q = v.final_state.q - v.initial_state.q;
    v.delta_m = v.final_state.m - v.initial_state.m;
    const double r0 = device_resistance(tc.device, v.initial_state.q);
    const double r1 = device_resistance(tc.device, v.final_state.q);
    v.delta_r_rel = std::abs(r1 - r0) / r0;
    v.state_returned = std::abs(v.delta_m) < tol.magnetization && v.delta_r_rel < tol.resistance_rel;

    v.tail_duration = trace.final.t - active_end(tc.source);
    v.tail_required = 20.0 * max_resistance(tc.device) * tc.capacitance;
    v.tail_ok = v.tail_duration >= v.tail_required;

    if (v.charge_returned) {
        v.is_ideal_memristor_behavior = v.state_returned;
        v.outcome = v.state_returned ? VerdictOutcome::pass : VerdictOutcome::fail;
    } else {
        v.outcome = VerdictOutcome::inconclusive;
    }
    return v;
}

}  // namespace memsim
