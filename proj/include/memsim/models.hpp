#pragma once

// Device physics for the memristor ideality study.
//
// Three two-terminal devices share one state layout (charge, normalized
// magnetization, flux linkage):
//   PhiTanhModel           m = tanh(q/S_W + atanh(m0)), V = (K_phi/S_W) sech^2(...) I
//   IdealMemristorModel    V = (R_mid + dR tanh(q/q0)) I
//   ThresholdHysteronModel dm/dt = 0 below the coercive field, first-order
//                          relaxation towards sign(H) above it; V = K_phi dm/dt + R_w I
//
// Models are validated on construction and immutable afterwards.

#include <string_view>
#include <variant>

namespace memsim {

struct PhiTanhParams {
    double switching_charge = 1.0;  ///< S_W [C]
    double m0 = 0.0;                ///< initial normalized magnetization
    double flux_scale = 1.0;        ///< K_phi = mu0*S*M_S [Wb]
    double field_per_current = 1.0; ///< H/I [1/m]; only scales the H axis

    bool operator==(const PhiTanhParams&) const = default;
};

struct IdealMemristorParams {
    double r_mid = 100.0;       ///< [Ohm]
    double r_swing = 0.0;       ///< dR [Ohm]
    double charge_scale = 1.0;  ///< q0 [C]

    bool operator==(const IdealMemristorParams&) const = default;
};

struct ThresholdHysteronParams {
    double coercive_field = 1.0;     ///< H_c [A/m]
    double tau = 1e-6;               ///< switching time constant [s]
    double field_per_current = 1.0;  ///< k_H [1/m], H = k_H*I
    double flux_scale = 1e-4;        ///< K_phi [Wb]
    double wire_resistance = 1.0;    ///< R_w [Ohm]
    double m_init = -1.0;

    bool operator==(const ThresholdHysteronParams&) const = default;
};

struct DeviceState {
    double q = 0.0;    ///< net charge through the device [C]
    double m = 0.0;    ///< normalized magnetization (or normalized memristor state)
    double phi = 0.0;  ///< flux linkage [Wb]
};

/// Flux linkage of a core at normalized magnetization m.
inline double flux_of(double m, double flux_scale) { return flux_scale * m; }

/// sech^2 evaluated without overflowing cosh for large |x|.
double sech_squared(double x);

class PhiTanhModel {
public:
    /// Rejects |m0| >= 1 - 1e-9 as well as non-positive S_W or K_phi.
    explicit PhiTanhModel(const PhiTanhParams& params);

    const PhiTanhParams& params() const noexcept { return params_; }

    double magnetization(double q) const;
    double resistance(double q) const;
    double voltage(double q, double current) const { return resistance(q) * current; }
    double flux(double q) const { return flux_of(magnetization(q), params_.flux_scale); }

    DeviceState state_at(double q) const { return {q, magnetization(q), flux(q)}; }
    DeviceState initial_state() const { return state_at(0.0); }

    /// Checks the redundant state fields (m and phi are functions of q).
    bool is_consistent(const DeviceState& s, double tol = 1e-12) const;

private:
    PhiTanhParams params_;
    double offset_;  // atanh(m0)
};

class IdealMemristorModel {
public:
    explicit IdealMemristorModel(const IdealMemristorParams& params);

    const IdealMemristorParams& params() const noexcept { return params_; }

    double resistance(double q) const;
    double voltage(double q, double current) const { return resistance(q) * current; }
    /// tanh(q/q0); resistance is r_mid + r_swing * normalized_state.
    double normalized_state(double q) const;
    /// Integral of R dq from 0 to q.
    double flux(double q) const;
    double max_resistance() const { return params_.r_mid + (params_.r_swing < 0 ? -params_.r_swing : params_.r_swing); }

    DeviceState state_at(double q) const { return {q, normalized_state(q), flux(q)}; }
    DeviceState initial_state() const { return state_at(0.0); }

private:
    IdealMemristorParams params_;
};

class ThresholdHysteronModel {
public:
    explicit ThresholdHysteronModel(const ThresholdHysteronParams& params);

    const ThresholdHysteronParams& params() const noexcept { return params_; }

    /// dm/dt for magnetization m under field H.
    double rate(double m, double field) const;
    /// Inductive EMF plus ohmic drop of the wire.
    double voltage(double dm_dt, double current) const;
    double field(double current) const { return params_.field_per_current * current; }
    /// Current magnitude at which |H| reaches H_c.
    double threshold_current() const { return params_.coercive_field / params_.field_per_current; }

    DeviceState initial_state() const {
        return {0.0, params_.m_init, flux_of(params_.m_init, params_.flux_scale)};
    }

private:
    ThresholdHysteronParams params_;
};

using DeviceModel = std::variant<PhiTanhModel, IdealMemristorModel, ThresholdHysteronModel>;

std::string_view kind_name(const DeviceModel& model);
DeviceState initial_state(const DeviceModel& model);

/// True for devices whose voltage has the form R(q)*I.
bool is_resistive_form(const DeviceModel& model);

/// Largest resistance the device can present; used to size discharge tails.
double max_resistance(const DeviceModel& model);

/// Field-per-current used to derive the H column of traces.
double field_per_current(const DeviceModel& model);

}  // namespace memsim
