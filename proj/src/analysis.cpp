#include "memsim/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "memsim/error.hpp"

namespace memsim {

namespace {

int sign_with_deadband(double v, double eps) {
    if (v > eps) return 1;
    if (v < -eps) return -1;
    return 0;
}

// Sample indices closest to each upward zero crossing of `current`.
std::vector<std::size_t> upward_crossings(const std::vector<double>& t, const std::vector<double>& current) {
    const std::size_t n = current.size();
    double peak = 0.0;
    for (double v : current) peak = std::max(peak, std::abs(v));
    const double eps = 1e-9 * peak;

    std::vector<std::size_t> out;
    int last_sign = 0;
    std::size_t last_index = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int s = sign_with_deadband(current[i], eps);
        if (s == 0) continue;
        if (s > 0 && last_sign == 0 && i > 0) {
            // Trace starts on the axis and moves up.
            out.push_back(0);
        } else if (s > 0 && last_sign < 0) {
            const double t0 = t[last_index];
            const double t1 = t[i];
            const double tc = t0 + (0.0 - current[last_index]) * (t1 - t0) / (current[i] - current[last_index]);
            const double frac = (tc - t0) / (t1 - t0);
            out.push_back(last_index + static_cast<std::size_t>(std::llround(frac * static_cast<double>(i - last_index))));
        }
        last_sign = s;
        last_index = i;
    }
    // Trace ends on the axis coming up from below.
    if (last_sign < 0 && last_index + 1 < n) out.push_back(n - 1);
    return out;
}

}  // namespace

LoopExtraction extract_loops(const SimulationTrace& trace, Column x, Column y) {
    LoopExtraction result;
    result.x_column = x;
    result.y_column = y;
    const std::size_t n = trace.size();
    if (n == 0) throw InsufficientDataError("empty trace");

    const auto [lo, hi] = std::minmax_element(trace.current.begin(), trace.current.end());
    if (*lo == *hi) {
        Loop single;
        single.x.push_back(trace.value(x, 0));
        single.y.push_back(trace.value(y, 0));
        result.loops.push_back(std::move(single));
        result.degenerate = true;
        return result;
    }

    const std::vector<std::size_t> bounds = upward_crossings(trace.t, trace.current);
    if (bounds.size() < 2) throw InsufficientDataError("trace does not contain a full drive period");

    for (std::size_t k = 0; k + 1 < bounds.size(); ++k) {
        Loop loop;
        loop.begin = bounds[k];
        loop.end = bounds[k + 1];
        if (loop.end - loop.begin + 1 < kMinLoopPoints)
            throw InsufficientDataError(fmt::format("period {} has {} points, need at least {}", k,
                                                    loop.end - loop.begin + 1, kMinLoopPoints));
        loop.x.reserve(loop.end - loop.begin + 1);
        loop.y.reserve(loop.end - loop.begin + 1);
        for (std::size_t i = loop.begin; i <= loop.end; ++i) {
            loop.x.push_back(trace.value(x, i));
            loop.y.push_back(trace.value(y, i));
        }
        result.loops.push_back(std::move(loop));
    }
    return result;
}

PinchResult pinch_check(const SimulationTrace& trace, double tol_current, double tol_voltage) {
    PinchResult r;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        if (std::abs(trace.current[i]) >= tol_current) continue;
        const double v = std::abs(trace.voltage[i]);
        if (!r.worst_index || v > r.worst_voltage) {
            r.worst_index = i;
            r.worst_voltage = v;
        }
    }
    r.pinched = !r.worst_index || r.worst_voltage < tol_voltage;
    return r;
}

FloorReport magnetization_floor(const SimulationTrace& trace) {
    FloorReport r;
    if (trace.size() == 0) return r;
    r.m_initial = trace.magnetization.front();
    r.m_min = r.m_max = r.m_initial;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double m = trace.magnetization[i];
        r.m_min = std::min(r.m_min, m);
        r.m_max = std::max(r.m_max, m);
        if (!r.first_violation && m < r.m_initial - kFloorTolerance) r.first_violation = i;
    }
    return r;
}

// ---------------------------------------------------------------------------

PeakReport peak_timing(const std::vector<double>& t, const std::vector<double>& v) {
    const std::size_t n = v.size();
    double amplitude = 0.0;
    for (double x : v) amplitude = std::max(amplitude, std::abs(x));
    if (n < 3 || amplitude == 0.0) throw NoPeaksError("trace is flat; no voltage peaks");
    const double floor = kPeakProminence * amplitude;

    PeakReport report;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double a = v[i - 1], b = v[i], c = v[i + 1];
        int sign = 0;
        if (b > a && b >= c && b > floor) sign = 1;
        else if (b < a && b <= c && b < -floor) sign = -1;
        if (sign == 0) continue;

        // Vertex of the parabola through the three samples.
        double offset = 0.0;
        const double curvature = a - 2.0 * b + c;
        if (curvature != 0.0) offset = std::clamp(0.5 * (a - c) / curvature, -0.5, 0.5);
        const double spacing = 0.5 * (t[i + 1] - t[i - 1]);
        report.peaks.push_back({t[i] + offset * spacing, b - 0.25 * (a - c) * offset, sign});
    }
    if (report.peaks.empty()) throw NoPeaksError("no voltage peaks above the prominence floor");

    double gap_sum = 0.0;
    std::size_t gaps = 0;
    for (int sign : {1, -1}) {
        const Peak* prev = nullptr;
        for (const Peak& p : report.peaks) {
            if (p.sign != sign) continue;
            if (prev) {
                gap_sum += p.t - prev->t;
                ++gaps;
            }
            prev = &p;
        }
    }
    if (gaps == 0) throw InsufficientDataError("need two peaks of the same sign to estimate the period");
    report.period = gap_sum / static_cast<double>(gaps);

    double delay_sum = 0.0;
    std::size_t delays = 0;
    for (std::size_t k = 0; k + 1 < report.peaks.size(); ++k) {
        if (report.peaks[k].sign > 0 && report.peaks[k + 1].sign < 0) {
            delay_sum += report.peaks[k + 1].t - report.peaks[k].t;
            ++delays;
        }
    }
    if (delays == 0) throw InsufficientDataError("no positive peak is followed by a negative peak");
    report.dt_over_T = delay_sum / static_cast<double>(delays) / report.period;
    return report;
}

PeakReport peak_timing(const SimulationTrace& trace, Column column) {
    return peak_timing(trace.t, trace.column(column));
}

// ---------------------------------------------------------------------------

TraceComparison compare_traces(const SimulationTrace& a, const SimulationTrace& b, const std::vector<Column>& cols,
                               double tol) {
    if (a.size() != b.size())
        throw GridMismatchError(fmt::format("traces have {} and {} samples", a.size(), b.size()));
    const double spacing = a.size() > 1 ? a.t[1] - a.t[0] : 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a.t[i] - b.t[i]) > 1e-9 * std::abs(spacing))
            throw GridMismatchError(fmt::format("time grids differ at sample {}", i));
    }

    TraceComparison out;
    for (Column c : cols) {
        ColumnDeviation d{c, 0.0, 0.0};
        double sum_sq = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double diff = std::abs(a.value(c, i) - b.value(c, i));
            d.max_abs = std::max(d.max_abs, diff);
            sum_sq += diff * diff;
        }
        d.rms = a.size() ? std::sqrt(sum_sq / static_cast<double>(a.size())) : 0.0;
        out.max_abs = std::max(out.max_abs, d.max_abs);
        out.columns.push_back(d);
    }
    out.within_tolerance = out.max_abs <= tol;
    return out;
}

SimulationTrace decimate(const SimulationTrace& trace, std::size_t factor) {
    if (factor == 0) throw ParameterError("factor", "must be >= 1");
    SimulationTrace out;
    out.field_per_current = trace.field_per_current;
    out.initial = trace.initial;
    out.final = trace.final;
    out.steps = trace.steps;
    out.loop = trace.loop;
    for (std::size_t i = 0; i < trace.size(); i += factor) out.push_back(trace.at(i));
    return out;
}

}  // namespace memsim
