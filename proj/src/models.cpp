#include "memsim/models.hpp"

#include <cmath>

#include "memsim/error.hpp"
#include "memsim/overloaded.hpp"

namespace memsim {

namespace {

void require_positive(double value, const char* field) {
    if (!std::isfinite(value) || !(value > 0.0)) throw ParameterError(field, "must be finite and > 0");
}

void require_finite(double value, const char* field) {
    if (!std::isfinite(value)) throw ParameterError(field, "must be finite");
}

// ln cosh(x) for any finite x.
double log_cosh(double x) {
    const double a = std::abs(x);
    return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace

double sech_squared(double x) {
    const double e = std::exp(-2.0 * std::abs(x));
    const double d = 1.0 + e;
    return 4.0 * e / (d * d);
}

// ---------------------------------------------------------------------------

PhiTanhModel::PhiTanhModel(const PhiTanhParams& params) : params_(params) {
    require_positive(params_.switching_charge, "S_W");
    require_positive(params_.flux_scale, "K_phi");
    require_positive(params_.field_per_current, "k_H");
    require_finite(params_.m0, "m0");
    // atanh(m0) must stay finite and well conditioned.
    if (!(std::abs(params_.m0) < 1.0 - 1e-9)) throw ParameterError("m0", "must satisfy |m0| < 1 - 1e-9");
    offset_ = std::atanh(params_.m0);
}

double PhiTanhModel::magnetization(double q) const {
    return std::tanh(q / params_.switching_charge + offset_);
}

double PhiTanhModel::resistance(double q) const {
    return params_.flux_scale / params_.switching_charge * sech_squared(q / params_.switching_charge + offset_);
}

bool PhiTanhModel::is_consistent(const DeviceState& s, double tol) const {
    const double m = magnetization(s.q);
    return std::abs(s.m - m) <= tol && std::abs(s.phi - flux_of(m, params_.flux_scale)) <= tol * params_.flux_scale;
}

// ---------------------------------------------------------------------------

IdealMemristorModel::IdealMemristorModel(const IdealMemristorParams& params) : params_(params) {
    require_finite(params_.r_mid, "R_mid");
    require_finite(params_.r_swing, "dR");
    require_positive(params_.charge_scale, "q0");
    if (!(params_.r_mid - std::abs(params_.r_swing) > 0.0))
        throw ParameterError("dR", "R_mid - |dR| must be > 0");
}

double IdealMemristorModel::resistance(double q) const {
    return params_.r_mid + params_.r_swing * normalized_state(q);
}

double IdealMemristorModel::normalized_state(double q) const {
    return std::tanh(q / params_.charge_scale);
}

double IdealMemristorModel::flux(double q) const {
    return params_.r_mid * q + params_.r_swing * params_.charge_scale * log_cosh(q / params_.charge_scale);
}

// ---------------------------------------------------------------------------

ThresholdHysteronModel::ThresholdHysteronModel(const ThresholdHysteronParams& params) : params_(params) {
    require_positive(params_.coercive_field, "H_c");
    require_positive(params_.tau, "tau");
    require_positive(params_.field_per_current, "k_H");
    require_positive(params_.flux_scale, "K_phi");
    require_positive(params_.wire_resistance, "R_w");
    require_finite(params_.m_init, "m_init");
    if (std::abs(params_.m_init) > 1.0) throw ParameterError("m_init", "must lie in [-1, 1]");
}

double ThresholdHysteronModel::rate(double m, double field) const {
    if (std::abs(field) < params_.coercive_field) return 0.0;
    const double target = field > 0.0 ? 1.0 : -1.0;
    return (target - m) / params_.tau;
}

double ThresholdHysteronModel::voltage(double dm_dt, double current) const {
    return params_.flux_scale * dm_dt + params_.wire_resistance * current;
}

// ---------------------------------------------------------------------------

std::string_view kind_name(const DeviceModel& model) {
    return std::visit(overloaded{
                          [](const PhiTanhModel&) { return std::string_view{"phi_tanh"}; },
                          [](const IdealMemristorModel&) { return std::string_view{"ideal"}; },
                          [](const ThresholdHysteronModel&) { return std::string_view{"hysteron"}; },
                      },
                      model);
}

DeviceState initial_state(const DeviceModel& model) {
    return std::visit([](const auto& m) { return m.initial_state(); }, model);
}

bool is_resistive_form(const DeviceModel& model) {
    return !std::holds_alternative<ThresholdHysteronModel>(model);
}

double max_resistance(const DeviceModel& model) {
    return std::visit(overloaded{
                          [](const PhiTanhModel& m) { return m.params().flux_scale / m.params().switching_charge; },
                          [](const IdealMemristorModel& m) { return m.max_resistance(); },
                          [](const ThresholdHysteronModel& m) { return m.params().wire_resistance; },
                      },
                      model);
}

double field_per_current(const DeviceModel& model) {
    return std::visit(overloaded{
                          [](const PhiTanhModel& m) { return m.params().field_per_current; },
                          [](const IdealMemristorModel&) { return 1.0; },
                          [](const ThresholdHysteronModel& m) { return m.params().field_per_current; },
                      },
                      model);
}

}  // namespace memsim
