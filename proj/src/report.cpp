#include "memsim/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "memsim/error.hpp"

namespace memsim {

namespace {

constexpr std::string_view kTraceHeader = "t,I,V_device,q,m,phi,V_C";

void append_row(std::string& out, std::initializer_list<double> values) {
    bool first = true;
    for (double v : values) {
        if (!first) out += ',';
        fmt::format_to(std::back_inserter(out), "{:.17g}", v);
        first = false;
    }
    out += '\n';
}

nlohmann::json state_json(const DeviceState& s) { return {{"q", s.q}, {"m", s.m}, {"phi", s.phi}}; }

}  // namespace

std::string trace_csv(const SimulationTrace& trace) {
    std::string out(kTraceHeader);
    out += '\n';
    for (std::size_t i = 0; i < trace.size(); ++i) {
        append_row(out, {trace.t[i], trace.current[i], trace.voltage[i], trace.charge[i], trace.magnetization[i],
                         trace.flux[i], trace.capacitor_voltage[i]});
    }
    return out;
}

std::string loops_csv(const SimulationTrace& trace, const LoopExtraction& loops) {
    std::string out = "loop,t,I,H,q,m,V_device\n";
    if (loops.degenerate) {
        fmt::format_to(std::back_inserter(out), "0,");
        append_row(out, {trace.t[0], trace.current[0], trace.value(Column::field, 0), trace.charge[0],
                         trace.magnetization[0], trace.voltage[0]});
        return out;
    }
    for (std::size_t k = 0; k < loops.loops.size(); ++k) {
        const Loop& loop = loops.loops[k];
        for (std::size_t i = loop.begin; i <= loop.end; ++i) {
            fmt::format_to(std::back_inserter(out), "{},", k);
            append_row(out, {trace.t[i], trace.current[i], trace.value(Column::field, i), trace.charge[i],
                             trace.magnetization[i], trace.voltage[i]});
        }
    }
    return out;
}

SimulationTrace read_trace_csv(std::string_view text) {
    SimulationTrace trace;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kTraceHeader) throw ParseError("unexpected trace CSV header", 1);
            continue;
        }
        if (line.empty()) continue;

        std::vector<double> row;
        std::size_t field_start = 0;
        while (field_start <= line.size()) {
            std::size_t comma = line.find(',', field_start);
            if (comma == std::string_view::npos) comma = line.size();
            double v = 0.0;
            const char* first = line.data() + field_start;
            const char* last = line.data() + comma;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last) throw ParseError("malformed number in trace CSV", line_no, field_start + 1);
            row.push_back(v);
            field_start = comma + 1;
        }
        if (row.size() != 7) throw ParseError("trace CSV rows need 7 columns", line_no);
        trace.push_back({row[0], row[1], row[2], row[3], row[4], row[5], row[6]});
    }
    if (trace.size() > 0) {
        trace.initial = trace.at(0);
        trace.final = trace.at(trace.size() - 1);
    }
    return trace;
}

nlohmann::json to_json(const PeakReport& r) {
    nlohmann::json peaks = nlohmann::json::array();
    for (const Peak& p : r.peaks) peaks.push_back({{"t", p.t}, {"V", p.value}, {"sign", p.sign}});
    return {{"peaks", peaks}, {"period", r.period}, {"dt_over_T", r.dt_over_T}};
}

nlohmann::json to_json(const FloorReport& r) {
    return {{"m_initial", r.m_initial},
            {"m_min", r.m_min},
            {"m_max", r.m_max},
            {"floor_holds", r.holds()},
            {"first_violation", r.first_violation ? nlohmann::json(*r.first_violation) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const LoopDiagnostics& d) {
    return {{"evaluations", d.evaluations},
            {"fixed_point_iterations", d.fixed_point_iterations},
            {"threshold_clamped", d.threshold_clamped},
            {"fallback", d.fallback},
            {"nonconverged", d.nonconverged}};
}

nlohmann::json to_json(const TestVerdict& v) {
    nlohmann::json j;
    j["verdict"] = outcome_name(v.outcome);
    j["charge_returned"] = v.charge_returned;
    j["delta_Q_C"] = v.delta_capacitor_charge;
    j["charge_tolerance"] = v.charge_tolerance;
    j["state_returned"] = v.state_returned;
    j["delta_q"] = v.delta_q;
    j["delta_m"] = v.delta_m;
    j["delta_R_rel"] = v.delta_r_rel;
    j["is_ideal_memristor_behavior"] =
        v.is_ideal_memristor_behavior ? nlohmann::json(*v.is_ideal_memristor_behavior) : nlohmann::json(nullptr);
    j["tail"] = {{"duration", v.tail_duration}, {"required", v.tail_required}, {"ok", v.tail_ok}};
    j["tolerances"] = {{"charge_rel", v.tolerances.charge_rel},
                       {"m", v.tolerances.magnetization},
                       {"R_rel", v.tolerances.resistance_rel}};
    j["initial_state"] = state_json(v.initial_state);
    j["final_state"] = state_json(v.final_state);
    j["algebraic_loop"] = to_json(v.loop);
    return j;
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(fmt::format("cannot open '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace memsim
