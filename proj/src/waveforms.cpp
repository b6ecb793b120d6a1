#include "memsim/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "memsim/error.hpp"
#include "memsim/overloaded.hpp"

namespace memsim {

double SinusoidCurrent::period() const { return 2.0 * std::numbers::pi / angular_frequency; }

void validate(const SinusoidCurrent& w) {
    if (!std::isfinite(w.amplitude) || w.amplitude < 0.0) throw ParameterError("I0", "must be finite and >= 0");
    if (!std::isfinite(w.angular_frequency) || !(w.angular_frequency > 0.0))
        throw ParameterError("omega", "must be finite and > 0");
    if (!std::isfinite(w.phase)) throw ParameterError("phase", "must be finite");
}

void validate(const TriangularVoltagePulse& w) {
    if (!std::isfinite(w.peak)) throw ParameterError("V_peak", "must be finite");
    if (!std::isfinite(w.t_start) || w.t_start < 0.0) throw ParameterError("t_start", "must be finite and >= 0");
    if (!std::isfinite(w.t_rise) || !(w.t_rise > 0.0)) throw ParameterError("t_rise", "must be finite and > 0");
    if (!std::isfinite(w.t_fall) || !(w.t_fall > 0.0)) throw ParameterError("t_fall", "must be finite and > 0");
    if (!std::isfinite(w.t_hold) || w.t_hold < 0.0) throw ParameterError("t_hold", "must be finite and >= 0");
}

double eval_current(const SinusoidCurrent& w, double t) {
    return w.amplitude * std::sin(w.angular_frequency * t + w.phase);
}

double charge_integral(const SinusoidCurrent& w, double t) {
    if (w.phase != 0.0) throw UnsupportedPhaseError("closed-form charge requires phase == 0");
    // 1 - cos x = 2 sin^2(x/2), exact zero at full periods and never negative.
    const double s = std::sin(0.5 * w.angular_frequency * t);
    return w.amplitude / w.angular_frequency * 2.0 * s * s;
}

double eval_voltage(const TriangularVoltagePulse& w, double t) {
    const double local = t - w.t_start;
    if (local <= 0.0) return 0.0;
    if (local <= w.t_rise) return w.peak * (local / w.t_rise);
    const double falling = local - w.t_rise;
    if (falling < w.t_fall) return w.peak * (1.0 - falling / w.t_fall);
    return 0.0;
}

// ---------------------------------------------------------------------------

SegmentList& SegmentList::ramp(double duration, double from, double to) {
    if (!std::isfinite(duration) || !(duration > 0.0)) throw ParameterError("duration", "must be finite and > 0");
    if (!std::isfinite(from) || !std::isfinite(to)) throw ParameterError("level", "must be finite");
    segments_.push_back({duration, from, to});
    total_ += duration;
    return *this;
}

SegmentList& SegmentList::hold(double duration, double level) { return ramp(duration, level, level); }

double SegmentList::eval(double t) const {
    if (segments_.empty()) return 0.0;
    if (t <= 0.0) return segments_.front().from;
    double start = 0.0;
    for (const auto& seg : segments_) {
        const double end = start + seg.duration;
        if (t < end) return seg.from + (seg.to - seg.from) * ((t - start) / seg.duration);
        start = end;
    }
    return segments_.back().to;
}

double SegmentList::peak_magnitude() const {
    double peak = 0.0;
    for (const auto& seg : segments_) peak = std::max({peak, std::abs(seg.from), std::abs(seg.to)});
    return peak;
}

SegmentList SegmentList::from_pulse(const TriangularVoltagePulse& pulse) {
    validate(pulse);
    SegmentList list;
    if (pulse.t_start > 0.0) list.zero_hold(pulse.t_start);
    list.ramp(pulse.t_rise, 0.0, pulse.peak).ramp(pulse.t_fall, pulse.peak, 0.0);
    if (pulse.t_hold > 0.0) list.zero_hold(pulse.t_hold);
    return list;
}

// ---------------------------------------------------------------------------

double eval_voltage(const VoltageWaveform& w, double t) {
    return std::visit(overloaded{
                          [t](const TriangularVoltagePulse& p) { return eval_voltage(p, t); },
                          [t](const SegmentList& s) { return s.eval(t); },
                      },
                      w);
}

double peak_magnitude(const VoltageWaveform& w) {
    return std::visit(overloaded{
                          [](const TriangularVoltagePulse& p) { return std::abs(p.peak); },
                          [](const SegmentList& s) { return s.peak_magnitude(); },
                      },
                      w);
}

double active_end(const VoltageWaveform& w) {
    return std::visit(overloaded{
                          [](const TriangularVoltagePulse& p) { return p.pulse_end(); },
                          [](const SegmentList& s) {
                              double start = 0.0;
                              double last_nonzero_end = 0.0;
                              for (const auto& seg : s.segments()) {
                                  start += seg.duration;
                                  if (seg.from != 0.0 || seg.to != 0.0) last_nonzero_end = start;
                              }
                              return last_nonzero_end;
                          },
                      },
                      w);
}

double total_duration(const VoltageWaveform& w) {
    return std::visit([](const auto& v) { return v.total_duration(); }, w);
}

}  // namespace memsim
