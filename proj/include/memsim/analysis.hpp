#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "memsim/simulator.hpp"

namespace memsim {

/// One drive period of a parametric (x, y) curve. Samples [begin, end] of
/// the source trace, both inclusive.
struct Loop {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::vector<double> x;
    std::vector<double> y;
};

struct LoopExtraction {
    Column x_column = Column::field;
    Column y_column = Column::magnetization;
    std::vector<Loop> loops;
    /// Set for a constant drive: a single one-point loop is returned.
    bool degenerate = false;
};

/// Minimum number of points a period must be sampled with.
inline constexpr std::size_t kMinLoopPoints = 100;

/// Splits the trace at upward zero crossings of the current.
LoopExtraction extract_loops(const SimulationTrace& trace, Column x, Column y);

struct PinchResult {
    bool pinched = true;
    std::optional<std::size_t> worst_index;  ///< sample with |I| < tol_I and the largest |V|
    double worst_voltage = 0.0;
};

PinchResult pinch_check(const SimulationTrace& trace, double tol_current, double tol_voltage);

struct FloorReport {
    double m_initial = 0.0;
    double m_min = 0.0;
    double m_max = 0.0;
    std::optional<std::size_t> first_violation;
    bool holds() const { return !first_violation.has_value(); }
};

inline constexpr double kFloorTolerance = 1e-9;

/// Checks m(t) >= m(0) - 1e-9 along the trace.
FloorReport magnetization_floor(const SimulationTrace& trace);

struct Peak {
    double t = 0.0;
    double value = 0.0;
    int sign = 0;
};

struct PeakReport {
    std::vector<Peak> peaks;
    double period = 0.0;
    /// Mean delay from a positive peak to the following negative peak, in
    /// units of the period.
    double dt_over_T = 0.0;
};

/// Extrema smaller than this fraction of max|v| are ignored.
inline constexpr double kPeakProminence = 1e-3;

PeakReport peak_timing(const SimulationTrace& trace, Column column = Column::voltage);
PeakReport peak_timing(const std::vector<double>& t, const std::vector<double>& v);

struct ColumnDeviation {
    Column column = Column::time;
    double max_abs = 0.0;
    double rms = 0.0;
};

struct TraceComparison {
    std::vector<ColumnDeviation> columns;
    double max_abs = 0.0;
    bool within_tolerance = true;
};

/// Throws GridMismatchError unless both traces share the same time grid.
TraceComparison compare_traces(const SimulationTrace& a, const SimulationTrace& b, const std::vector<Column>& cols,
                               double tol);

/// Keeps every `factor`-th sample.
SimulationTrace decimate(const SimulationTrace& trace, std::size_t factor);

}  // namespace memsim
