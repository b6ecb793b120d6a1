#pragma once

// Scenario files: one `section.key = value` assignment per line, `#` starts a
// comment. Sections are device, drive, sim, circuit and output. All values
// are SI units. See README.md for the full key list.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "memsim/models.hpp"
#include "memsim/simulator.hpp"
#include "memsim/waveforms.hpp"

namespace memsim {

using DeviceSpec = std::variant<PhiTanhParams, IdealMemristorParams, ThresholdHysteronParams>;
using DriveSpec = std::variant<SinusoidCurrent, TriangularVoltagePulse>;

struct CircuitSpec {
    double capacitance = 1e-6;
    double initial_capacitor_voltage = 0.0;
    TestTolerances tolerances;

    bool operator==(const CircuitSpec&) const = default;
};

struct OutputSpec {
    std::string basename = "run";

    bool operator==(const OutputSpec&) const = default;
};

struct Scenario {
    DeviceSpec device;
    DriveSpec drive;
    SimConfig sim;  ///< record_stride is set from output.stride
    std::optional<CircuitSpec> circuit;
    OutputSpec output;

    DeviceModel make_device() const;
    bool operator==(const Scenario&) const = default;
};

/// One assignment as it appeared in the source text.
struct ScenarioEntry {
    std::string section;
    std::string key;
    std::string value;
    std::size_t line = 0;
    std::size_t value_column = 0;

    std::string full_key() const { return section + "." + key; }
};

struct ScenarioDocument {
    std::vector<ScenarioEntry> entries;

    const ScenarioEntry* find(std::string_view full_key) const;
    /// Replaces the value of `full_key`, appending the entry when absent.
    void set(std::string_view full_key, std::string value);
};

/// Syntax pass only: splits lines and rejects malformed or duplicate keys.
ScenarioDocument parse_document(std::string_view text);

/// Semantic pass: key tables, number parsing, parameter invariants.
Scenario build_scenario(const ScenarioDocument& doc);

Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Canonical text form; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& s);

/// True when `full_key` names a numeric key valid for the kinds selected in
/// `doc`.
bool is_numeric_key(const ScenarioDocument& doc, std::string_view full_key);

}  // namespace memsim
