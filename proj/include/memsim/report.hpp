#pragma once

// CSV and JSON serialization. CSV numbers use 17 significant digits, '.' as
// decimal separator and '\n' line ends so that output is byte-stable.

#include <string>
#include <string_view>

#include <json.hpp>

#include "memsim/analysis.hpp"
#include "memsim/simulator.hpp"

namespace memsim {

/// Columns t,I,V_device,q,m,phi,V_C.
std::string trace_csv(const SimulationTrace& trace);

/// Columns loop,t,I,H,q,m,V_device; one block of rows per extracted loop.
std::string loops_csv(const SimulationTrace& trace, const LoopExtraction& loops);

/// Reads a trace written by trace_csv (used for golden comparisons).
SimulationTrace read_trace_csv(std::string_view text);

nlohmann::json to_json(const PeakReport& r);
nlohmann::json to_json(const FloorReport& r);
nlohmann::json to_json(const TestVerdict& v);
nlohmann::json to_json(const LoopDiagnostics& d);

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace memsim
