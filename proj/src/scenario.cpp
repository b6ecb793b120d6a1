#include "memsim/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <span>
#include <sstream>

#include <fmt/format.h>

#include "memsim/error.hpp"
#include "memsim/overloaded.hpp"

namespace memsim {

namespace {

enum class ValueType { number, integer, boolean, text };

struct KeyDef {
    std::string_view key;
    ValueType type;
    bool required;
};

constexpr std::array kSections{std::string_view{"device"}, std::string_view{"drive"}, std::string_view{"sim"},
                               std::string_view{"circuit"}, std::string_view{"output"}};

constexpr std::array<KeyDef, 4> kPhiTanhKeys{{
    {"S_W", ValueType::number, true},
    {"m0", ValueType::number, true},
    {"K_phi", ValueType::number, true},
    {"k_H", ValueType::number, false},
}};
constexpr std::array<KeyDef, 3> kIdealKeys{{
    {"R_mid", ValueType::number, true},
    {"dR", ValueType::number, true},
    {"q0", ValueType::number, true},
}};
constexpr std::array<KeyDef, 6> kHysteronKeys{{
    {"H_c", ValueType::number, true},
    {"tau", ValueType::number, true},
    {"k_H", ValueType::number, true},
    {"K_phi", ValueType::number, true},
    {"R_w", ValueType::number, false},
    {"m_init", ValueType::number, false},
}};
constexpr std::array<KeyDef, 3> kSineKeys{{
    {"I0", ValueType::number, true},
    {"omega", ValueType::number, true},
    {"phase", ValueType::number, false},
}};
constexpr std::array<KeyDef, 5> kTriangleKeys{{
    {"V_peak", ValueType::number, true},
    {"t_rise", ValueType::number, true},
    {"t_fall", ValueType::number, true},
    {"t_start", ValueType::number, false},
    {"t_hold", ValueType::number, false},
}};
constexpr std::array<KeyDef, 5> kSimKeys{{
    {"dt", ValueType::number, true},
    {"t_end", ValueType::number, true},
    {"algebraic_tol", ValueType::number, false},
    {"max_fp_iters", ValueType::integer, false},
    {"allow_coarse_step", ValueType::boolean, false},
}};
constexpr std::array<KeyDef, 5> kCircuitKeys{{
    {"C", ValueType::number, true},
    {"V_C_init", ValueType::number, false},
    {"tol_charge", ValueType::number, false},
    {"tol_m", ValueType::number, false},
    {"tol_R", ValueType::number, false},
}};
constexpr std::array<KeyDef, 2> kOutputKeys{{
    {"basename", ValueType::text, false},
    {"stride", ValueType::integer, false},
}};

std::span<const KeyDef> device_keys(std::string_view kind) {
    if (kind == "phi_tanh") return kPhiTanhKeys;
    if (kind == "ideal") return kIdealKeys;
    if (kind == "hysteron") return kHysteronKeys;
    return {};
}

std::span<const KeyDef> drive_keys(std::string_view kind) {
    if (kind == "sine") return kSineKeys;
    if (kind == "triangle") return kTriangleKeys;
    return {};
}

std::span<const KeyDef> fixed_keys(std::string_view section) {
    if (section == "sim") return kSimKeys;
    if (section == "circuit") return kCircuitKeys;
    if (section == "output") return kOutputKeys;
    return {};
}

bool is_identifier(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

bool is_basename(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-' ||
               c == '.';
    });
}

std::size_t skip_space(std::string_view s, std::size_t pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    return pos;
}

std::size_t trim_end(std::string_view s, std::size_t end) {
    while (end > 0 && (s[end - 1] == ' ' || s[end - 1] == '\t' || s[end - 1] == '\r')) --end;
    return end;
}

const ScenarioEntry* find_entry(const ScenarioDocument& doc, std::string_view section, std::string_view key) {
    for (const auto& e : doc.entries) {
        if (e.section == section && e.key == key) return &e;
    }
    return nullptr;
}

bool has_section(const ScenarioDocument& doc, std::string_view section) {
    return std::any_of(doc.entries.begin(), doc.entries.end(), [&](const auto& e) { return e.section == section; });
}

// Reads the keys of one section against its key table.
class SectionReader {
public:
    SectionReader(const ScenarioDocument& doc, std::string_view section, std::span<const KeyDef> keys,
                  std::string_view kind = {})
        : doc_(doc), section_(section), keys_(keys) {
        for (const auto& e : doc.entries) {
            if (e.section != section) continue;
            if (!kind.empty() && e.key == "kind") continue;
            const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeyDef& d) { return d.key == e.key; });
            if (it == keys.end()) {
                const std::string suffix = kind.empty() ? "" : fmt::format(" for kind '{}'", kind);
                throw ParseError(fmt::format("unknown key '{}'{}", e.full_key(), suffix), e.line);
            }
        }
        for (const auto& d : keys) {
            if (d.required && !find_entry(doc, section, d.key))
                throw ParseError(fmt::format("missing required key '{}.{}'", section, d.key));
        }
    }

    double number(std::string_view key, double fallback = 0.0) const {
        const ScenarioEntry* e = find_entry(doc_, section_, key);
        if (!e) return fallback;
        double v = 0.0;
        const char* first = e->value.data();
        const char* last = first + e->value.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last)
            throw ParseError(fmt::format("{}: expected a number, got '{}'", e->full_key(), e->value), e->line,
                             e->value_column);
        if (!std::isfinite(v)) throw ParseError(fmt::format("{}: must be finite", e->full_key()), e->line, e->value_column);
        return v;
    }

    long long integer(std::string_view key, long long fallback) const {
        const ScenarioEntry* e = find_entry(doc_, section_, key);
        if (!e) return fallback;
        long long v = 0;
        const char* first = e->value.data();
        const char* last = first + e->value.size();
        const auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last)
            throw ParseError(fmt::format("{}: expected an integer, got '{}'", e->full_key(), e->value), e->line,
                             e->value_column);
        return v;
    }

    bool boolean(std::string_view key, bool fallback) const {
        const ScenarioEntry* e = find_entry(doc_, section_, key);
        if (!e) return fallback;
        if (e->value == "true") return true;
        if (e->value == "false") return false;
        throw ParseError(fmt::format("{}: expected true or false, got '{}'", e->full_key(), e->value), e->line,
                         e->value_column);
    }

    std::string text(std::string_view key, std::string fallback) const {
        const ScenarioEntry* e = find_entry(doc_, section_, key);
        return e ? e->value : fallback;
    }

private:
    const ScenarioDocument& doc_;
    std::string_view section_;
    std::span<const KeyDef> keys_;
};

std::string_view require_kind(const ScenarioDocument& doc, std::string_view section) {
    if (!has_section(doc, section)) throw ParseError(fmt::format("missing {} section", section));
    const ScenarioEntry* kind = find_entry(doc, section, "kind");
    if (!kind) throw ParseError(fmt::format("missing required key '{}.kind'", section));
    return kind->value;
}

// Maps a parameter-domain failure back to the scenario line that set it.
[[noreturn]] void rethrow_in_scenario(const ScenarioDocument& doc, std::string_view section, const ParameterError& e) {
    std::string key = e.field();
    std::string_view sec = section;
    if (key == "record_stride") {
        sec = "output";
        key = "stride";
    }
    const ScenarioEntry* entry = find_entry(doc, sec, key);
    throw ParseError(fmt::format("{}.{}: {}", sec, key, e.reason()), entry ? entry->line : 0,
                     entry ? entry->value_column : 0);
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

}  // namespace

// ---------------------------------------------------------------------------

const ScenarioEntry* ScenarioDocument::find(std::string_view full_key) const {
    for (const auto& e : entries) {
        if (e.full_key() == full_key) return &e;
    }
    return nullptr;
}

void ScenarioDocument::set(std::string_view full_key, std::string value) {
    for (auto& e : entries) {
        if (e.full_key() == full_key) {
            e.value = std::move(value);
            return;
        }
    }
    const auto dot = full_key.find('.');
    if (dot == std::string_view::npos) throw ParseError(fmt::format("'{}' is not a section.key name", full_key));
    entries.push_back({std::string(full_key.substr(0, dot)), std::string(full_key.substr(dot + 1)), std::move(value),
                       0, 0});
}

ScenarioDocument parse_document(std::string_view text) {
    ScenarioDocument doc;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        const std::size_t hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        const std::size_t begin = skip_space(line, 0);
        const std::size_t end = trim_end(line, line.size());
        if (begin >= end) {
            if (eol == text.size()) break;
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected 'section.key = value'", line_no, begin + 1);
        const std::size_t lhs_end = trim_end(line, eq);
        const std::string_view lhs = line.substr(begin, lhs_end > begin ? lhs_end - begin : 0);
        const std::size_t dot = lhs.find('.');
        if (dot == std::string_view::npos) throw ParseError("key must have the form section.key", line_no, begin + 1);
        const std::string_view section = lhs.substr(0, dot);
        const std::string_view key = lhs.substr(dot + 1);
        if (!is_identifier(section)) throw ParseError("invalid section name", line_no, begin + 1);
        if (!is_identifier(key)) throw ParseError("invalid key name", line_no, begin + dot + 2);

        const std::size_t value_begin = skip_space(line, eq + 1);
        if (value_begin >= end) throw ParseError("missing value", line_no, eq + 2);
        const std::string_view value = line.substr(value_begin, end - value_begin);

        if (std::find(kSections.begin(), kSections.end(), section) == kSections.end())
            throw ParseError(fmt::format("unknown section '{}'", section), line_no, begin + 1);
        if (const ScenarioEntry* first = find_entry(doc, section, key))
            throw ParseError(fmt::format("duplicate key '{}.{}' (first set on line {}, again on line {})", section, key,
                                         first->line, line_no),
                             line_no, begin + 1);

        doc.entries.push_back({std::string(section), std::string(key), std::string(value), line_no, value_begin + 1});
        if (eol == text.size()) break;
    }
    return doc;
}

Scenario build_scenario(const ScenarioDocument& doc) {
    Scenario s{};

    const std::string_view device_kind = require_kind(doc, "device");
    if (device_keys(device_kind).empty()) {
        const ScenarioEntry* e = find_entry(doc, "device", "kind");
        throw ParseError(fmt::format("device.kind: unknown kind '{}' (phi_tanh, ideal, hysteron)", device_kind),
                         e->line, e->value_column);
    }
    const std::string_view drive_kind = require_kind(doc, "drive");
    if (drive_keys(drive_kind).empty()) {
        const ScenarioEntry* e = find_entry(doc, "drive", "kind");
        throw ParseError(fmt::format("drive.kind: unknown kind '{}' (sine, triangle)", drive_kind), e->line,
                         e->value_column);
    }
    if (!has_section(doc, "sim")) throw ParseError("missing sim section");

    {
        const SectionReader r(doc, "device", device_keys(device_kind), device_kind);
        if (device_kind == "phi_tanh") {
            s.device = PhiTanhParams{r.number("S_W"), r.number("m0"), r.number("K_phi"), r.number("k_H", 1.0)};
        } else if (device_kind == "ideal") {
            s.device = IdealMemristorParams{r.number("R_mid"), r.number("dR"), r.number("q0")};
        } else {
            s.device = ThresholdHysteronParams{r.number("H_c"),   r.number("tau"),      r.number("k_H"),
                                               r.number("K_phi"), r.number("R_w", 1.0), r.number("m_init", -1.0)};
        }
        try {
            (void)s.make_device();
        } catch (const ParameterError& e) {
            rethrow_in_scenario(doc, "device", e);
        }
    }

    {
        const SectionReader r(doc, "drive", drive_keys(drive_kind), drive_kind);
        try {
            if (drive_kind == "sine") {
                SinusoidCurrent w{r.number("I0"), r.number("omega"), r.number("phase", 0.0)};
                validate(w);
                s.drive = w;
            } else {
                TriangularVoltagePulse w{r.number("V_peak"), r.number("t_start", 0.0), r.number("t_rise"),
                                         r.number("t_fall"), r.number("t_hold", 0.0)};
                validate(w);
                s.drive = w;
            }
        } catch (const ParameterError& e) {
            rethrow_in_scenario(doc, "drive", e);
        }
    }

    {
        const SectionReader r(doc, "sim", kSimKeys);
        s.sim.dt = r.number("dt");
        s.sim.t_end = r.number("t_end");
        s.sim.algebraic_tol = r.number("algebraic_tol", 1e-10);
        const long long iters = r.integer("max_fp_iters", 50);
        if (iters < 1 || iters > 1'000'000) {
            const ScenarioEntry* e = find_entry(doc, "sim", "max_fp_iters");
            throw ParseError("sim.max_fp_iters: must be in [1, 1000000]", e->line, e->value_column);
        }
        s.sim.max_fp_iters = static_cast<int>(iters);
        s.sim.allow_coarse_step = r.boolean("allow_coarse_step", false);
    }

    {
        const SectionReader r(doc, "output", kOutputKeys);
        s.output.basename = r.text("basename", "run");
        if (!is_basename(s.output.basename)) {
            const ScenarioEntry* e = find_entry(doc, "output", "basename");
            throw ParseError("output.basename: only letters, digits, '_', '-' and '.' are allowed", e->line,
                             e->value_column);
        }
        const long long stride = r.integer("stride", 1);
        if (stride < 1) {
            const ScenarioEntry* e = find_entry(doc, "output", "stride");
            throw ParseError("output.stride: must be >= 1", e->line, e->value_column);
        }
        s.sim.record_stride = static_cast<std::size_t>(stride);
    }
    try {
        s.sim.validate();
    } catch (const ParameterError& e) {
        rethrow_in_scenario(doc, "sim", e);
    }

    if (has_section(doc, "circuit")) {
        const SectionReader r(doc, "circuit", kCircuitKeys);
        CircuitSpec c;
        c.capacitance = r.number("C");
        c.initial_capacitor_voltage = r.number("V_C_init", 0.0);
        c.tolerances.charge_rel = r.number("tol_charge", 1e-9);
        c.tolerances.magnetization = r.number("tol_m", 1e-6);
        c.tolerances.resistance_rel = r.number("tol_R", 1e-6);
        for (std::string_view key : {"C", "tol_charge", "tol_m", "tol_R"}) {
            if (r.number(key, 1.0) > 0.0) continue;
            const ScenarioEntry* e = find_entry(doc, "circuit", key);
            throw ParseError(fmt::format("circuit.{}: must be > 0", key), e->line, e->value_column);
        }
        s.circuit = c;
    }
    return s;
}

Scenario parse_scenario(std::string_view text) { return build_scenario(parse_document(text)); }

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open scenario file '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

DeviceModel Scenario::make_device() const {
    return std::visit(overloaded{
                          [](const PhiTanhParams& p) -> DeviceModel { return PhiTanhModel(p); },
                          [](const IdealMemristorParams& p) -> DeviceModel { return IdealMemristorModel(p); },
                          [](const ThresholdHysteronParams& p) -> DeviceModel { return ThresholdHysteronModel(p); },
                      },
                      device);
}

std::string emit_scenario(const Scenario& s) {
    std::string out;
    auto line = [&out](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };

    std::visit(overloaded{
                   [&](const PhiTanhParams& p) {
                       line("device.kind", "phi_tanh");
                       line("device.S_W", num(p.switching_charge));
                       line("device.m0", num(p.m0));
                       line("device.K_phi", num(p.flux_scale));
                       line("device.k_H", num(p.field_per_current));
                   },
                   [&](const IdealMemristorParams& p) {
                       line("device.kind", "ideal");
                       line("device.R_mid", num(p.r_mid));
                       line("device.dR", num(p.r_swing));
                       line("device.q0", num(p.charge_scale));
                   },
                   [&](const ThresholdHysteronParams& p) {
                       line("device.kind", "hysteron");
                       line("device.H_c", num(p.coercive_field));
                       line("device.tau", num(p.tau));
                       line("device.k_H", num(p.field_per_current));
                       line("device.K_phi", num(p.flux_scale));
                       line("device.R_w", num(p.wire_resistance));
                       line("device.m_init", num(p.m_init));
                   },
               },
               s.device);

    std::visit(overloaded{
                   [&](const SinusoidCurrent& w) {
                       line("drive.kind", "sine");
                       line("drive.I0", num(w.amplitude));
                       line("drive.omega", num(w.angular_frequency));
                       line("drive.phase", num(w.phase));
                   },
                   [&](const TriangularVoltagePulse& w) {
                       line("drive.kind", "triangle");
                       line("drive.V_peak", num(w.peak));
                       line("drive.t_start", num(w.t_start));
                       line("drive.t_rise", num(w.t_rise));
                       line("drive.t_fall", num(w.t_fall));
                       line("drive.t_hold", num(w.t_hold));
                   },
               },
               s.drive);

    line("sim.dt", num(s.sim.dt));
    line("sim.t_end", num(s.sim.t_end));
    line("sim.algebraic_tol", num(s.sim.algebraic_tol));
    line("sim.max_fp_iters", std::to_string(s.sim.max_fp_iters));
    line("sim.allow_coarse_step", s.sim.allow_coarse_step ? "true" : "false");

    if (s.circuit) {
        line("circuit.C", num(s.circuit->capacitance));
        line("circuit.V_C_init", num(s.circuit->initial_capacitor_voltage));
        line("circuit.tol_charge", num(s.circuit->tolerances.charge_rel));
        line("circuit.tol_m", num(s.circuit->tolerances.magnetization));
        line("circuit.tol_R", num(s.circuit->tolerances.resistance_rel));
    }

    line("output.basename", s.output.basename);
    line("output.stride", std::to_string(s.sim.record_stride));
    return out;
}

bool is_numeric_key(const ScenarioDocument& doc, std::string_view full_key) {
    const auto dot = full_key.find('.');
    if (dot == std::string_view::npos) return false;
    const std::string_view section = full_key.substr(0, dot);
    const std::string_view key = full_key.substr(dot + 1);

    std::span<const KeyDef> keys;
    if (section == "device" || section == "drive") {
        const ScenarioEntry* kind = find_entry(doc, section, "kind");
        if (!kind) return false;
        keys = section == "device" ? device_keys(kind->value) : drive_keys(kind->value);
    } else {
        keys = fixed_keys(section);
    }
    return std::any_of(keys.begin(), keys.end(), [&](const KeyDef& d) {
        return d.key == key && (d.type == ValueType::number || d.type == ValueType::integer);
    });
}

}  // namespace memsim
