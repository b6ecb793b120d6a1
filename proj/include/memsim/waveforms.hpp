#pragma once

// Drive signals. All waveforms are evaluated analytically at arbitrary t.

#include <variant>
#include <vector>

namespace memsim {

/// I(t) = I0 sin(omega t + phase)
struct SinusoidCurrent {
    double amplitude = 0.0;          ///< I0 [A]
    double angular_frequency = 1.0;  ///< omega [rad/s]
    double phase = 0.0;              ///< [rad]

    double period() const;
    bool operator==(const SinusoidCurrent&) const = default;
};

/// Zero until t_start, linear ramp to `peak` over t_rise, linear fall to zero
/// over t_fall, then zero for t_hold.
struct TriangularVoltagePulse {
    double peak = 0.0;    ///< V_peak [V]
    double t_start = 0.0;
    double t_rise = 1.0;
    double t_fall = 1.0;
    double t_hold = 0.0;  ///< zero-hold tail

    double pulse_end() const { return t_start + t_rise + t_fall; }
    double total_duration() const { return pulse_end() + t_hold; }
    bool operator==(const TriangularVoltagePulse&) const = default;
};

/// Piecewise-linear signal built from consecutive segments. Each segment ramps
/// linearly from `from` to `to` over `duration`; a hold is a segment with
/// from == to. The signal keeps the final value after the last segment.
class SegmentList {
public:
    struct Segment {
        double duration;
        double from;
        double to;
    };

    SegmentList() = default;

    SegmentList& ramp(double duration, double from, double to);
    SegmentList& hold(double duration, double level);
    SegmentList& zero_hold(double duration) { return hold(duration, 0.0); }

    double eval(double t) const;
    double total_duration() const { return total_; }
    double peak_magnitude() const;
    const std::vector<Segment>& segments() const noexcept { return segments_; }

    static SegmentList from_pulse(const TriangularVoltagePulse& pulse);

private:
    std::vector<Segment> segments_;
    double total_ = 0.0;
};

using VoltageWaveform = std::variant<TriangularVoltagePulse, SegmentList>;

void validate(const SinusoidCurrent& w);
void validate(const TriangularVoltagePulse& w);

double eval_current(const SinusoidCurrent& w, double t);

/// Closed-form charge (I0/omega)(1 - cos omega t), valid for phase == 0 and
/// q(0) = 0. Throws UnsupportedPhaseError otherwise.
double charge_integral(const SinusoidCurrent& w, double t);

double eval_voltage(const TriangularVoltagePulse& w, double t);
double eval_voltage(const VoltageWaveform& w, double t);

double peak_magnitude(const VoltageWaveform& w);
/// Time after which the source is identically zero.
double active_end(const VoltageWaveform& w);
double total_duration(const VoltageWaveform& w);

}  // namespace memsim
