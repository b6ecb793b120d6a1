#include "memsim/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <future>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "memsim/analysis.hpp"
#include "memsim/error.hpp"
#include "memsim/report.hpp"

namespace memsim::cli {

namespace {

const SinusoidCurrent& require_sine(const Scenario& s, std::string_view command) {
    const auto* w = std::get_if<SinusoidCurrent>(&s.drive);
    if (!w) throw ParseError(fmt::format("{} needs drive.kind = sine", command));
    return *w;
}

nlohmann::json base_summary(std::string_view command, const Scenario& s, const DeviceModel& device) {
    return {{"command", command}, {"device", kind_name(device)}, {"name", s.output.basename}};
}

std::vector<std::string> split_values(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(start, comma - start);
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        item = b == std::string::npos ? std::string{} : item.substr(b, e - b + 1);
        if (!item.empty()) out.push_back(item);
        start = comma + 1;
    }
    return out;
}

double parse_number(const std::string& text, std::string_view what) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ParseError(fmt::format("{}: '{}' is not a finite number", what, text));
    return v;
}

CommandOutput dispatch(const Scenario& s, const std::string& command) {
    if (command == "loop") return cmd_loop(s);
    if (command == "timeseries") return cmd_timeseries(s);
    if (command == "memtest") return cmd_memtest(s);
    throw ParseError(fmt::format("unknown command '{}'", command));
}

void emit_error(std::ostream& err, const nlohmann::json& error) { err << nlohmann::json{{"error", error}}.dump() << '\n'; }

}  // namespace

// ---------------------------------------------------------------------------

CommandOutput cmd_loop(const Scenario& s) {
    const SinusoidCurrent& drive = require_sine(s, "loop");
    const DeviceModel device = s.make_device();
    const SimulationTrace trace = simulate_current_driven(device, drive, s.sim);
    const LoopExtraction loops = extract_loops(trace, Column::field, Column::magnetization);
    const FloorReport floor = magnetization_floor(trace);

    CommandOutput out;
    out.summary = base_summary("loop", s, device);
    out.summary["samples"] = trace.size();
    out.summary["loops"] = loops.loops.size();
    out.summary["degenerate"] = loops.degenerate;
    out.summary.update(to_json(floor));
    out.files.emplace_back("loops.csv", loops_csv(trace, loops));
    return out;
}

CommandOutput cmd_timeseries(const Scenario& s) {
    const SinusoidCurrent& drive = require_sine(s, "timeseries");
    const DeviceModel device = s.make_device();
    const SimulationTrace trace = simulate_current_driven(device, drive, s.sim);
    const PeakReport peaks = peak_timing(trace);

    CommandOutput out;
    out.summary = base_summary("timeseries", s, device);
    out.summary["samples"] = trace.size();
    out.summary.update(to_json(peaks));
    out.files.emplace_back("trace.csv", trace_csv(trace));
    return out;
}

CommandOutput cmd_memtest(const Scenario& s) {
    if (!s.circuit) throw ParseError("memtest needs a circuit section");
    const auto* pulse = std::get_if<TriangularVoltagePulse>(&s.drive);
    if (!pulse) throw ParseError("memtest needs drive.kind = triangle");

    const TestCircuit tc{s.circuit->capacitance, s.make_device(), *pulse, s.circuit->initial_capacitor_voltage};
    const SimulationTrace trace = simulate_test_circuit(tc, s.sim);
    const TestVerdict verdict = judge_memristor_test(tc, trace, s.circuit->tolerances);

    CommandOutput out;
    out.summary = base_summary("memtest", s, tc.device);
    out.summary["samples"] = trace.size();
    out.summary.update(to_json(verdict));
    out.files.emplace_back("trace.csv", trace_csv(trace));
    switch (verdict.outcome) {
        case VerdictOutcome::pass: out.exit_code = kOk; break;
        case VerdictOutcome::fail: out.exit_code = kTestFailed; break;
        case VerdictOutcome::inconclusive: out.exit_code = kInconclusive; break;
    }
    return out;
}

nlohmann::json cmd_sweep(const ScenarioDocument& doc, const std::string& key, const std::vector<std::string>& values,
                         const std::string& command) {
    if (values.empty()) throw ParseError("sweep needs at least one value");
    if (!is_numeric_key(doc, key)) throw ParseError(fmt::format("sweep key '{}' is not a numeric scenario key", key));
    std::vector<double> numbers;
    numbers.reserve(values.size());
    for (const auto& v : values) numbers.push_back(parse_number(v, "sweep value"));

    std::vector<std::future<nlohmann::json>> runs;
    runs.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        runs.push_back(std::async(std::launch::async, [&doc, &key, &command, &values, &numbers, i] {
            nlohmann::json item{{"key", key}, {"value", numbers[i]}};
            try {
                ScenarioDocument local = doc;
                local.set(key, values[i]);
                const CommandOutput r = dispatch(build_scenario(local), command);
                item["exit_code"] = r.exit_code;
                item["summary"] = r.summary;
            } catch (const std::exception& e) {
                auto [code, error] = describe_error(e);
                item["exit_code"] = code;
                item["error"] = error;
            }
            return item;
        }));
    }
    nlohmann::json out = nlohmann::json::array();
    for (auto& r : runs) out.push_back(r.get());
    return out;
}

std::pair<int, nlohmann::json> describe_error(const std::exception& e) {
    nlohmann::json j{{"message", e.what()}};
    int code = kAnalysisError;
    if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
        code = kParseError;
        j["kind"] = "parse_error";
        j["message"] = p->message();
        if (p->line() != 0) j["line"] = p->line();
        if (p->column() != 0) j["column"] = p->column();
    } else if (dynamic_cast<const ParameterError*>(&e)) {
        code = kParseError;
        j["kind"] = "parameter_error";
    } else if (dynamic_cast<const IoError*>(&e)) {
        code = kIoError;
        j["kind"] = "io_error";
    } else if (dynamic_cast<const SimulationError*>(&e)) {
        j["kind"] = "simulation_error";
    } else if (dynamic_cast<const AnalysisError*>(&e)) {
        j["kind"] = "analysis_error";
    } else {
        j["kind"] = "internal_error";
    }
    j["exit_code"] = code;
    return {code, j};
}

// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Memristor ideality test simulator", "memtest-sim"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = ".";
    std::optional<double> dt_override;
    std::string sweep_key;
    std::string sweep_values;
    std::string sweep_run = "";

    std::vector<CLI::App*> subs;
    for (const char* name : {"loop", "timeseries", "memtest", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--scenario", scenario_path, "scenario file")->required();
        sub->add_option("--out-dir", out_dir, "directory for CSV/JSON outputs");
        sub->add_option("--dt", dt_override, "override sim.dt [s]");
        subs.push_back(sub);
    }
    subs[0]->description("m-H loops and magnetization floor of a current-driven device");
    subs[1]->description("voltage/current time series and peak timing");
    subs[2]->description("capacitor-device memristor ideality test");
    subs[3]->description("repeat a command over values of one numeric key");
    subs[3]->add_option("--key", sweep_key, "scenario key, e.g. device.m0")->required();
    subs[3]->add_option("--values", sweep_values, "comma-separated values")->required();
    subs[3]->add_option("--run", sweep_run, "loop, timeseries or memtest (default: memtest with a circuit section, else loop)")
        ->check(CLI::IsMember({"loop", "timeseries", "memtest"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kOk;
        }
        emit_error(err, {{"kind", "usage_error"}, {"message", e.what()}, {"exit_code", kParseError}});
        return kParseError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        ScenarioDocument doc = parse_document(read_text_file(scenario_path));
        if (dt_override) doc.set("sim.dt", fmt::format("{:.17g}", *dt_override));
        std::filesystem::create_directories(out_dir);

        if (command == "sweep") {
            if (sweep_run.empty()) sweep_run = doc.find("circuit.C") ? "memtest" : "loop";
            (void)build_scenario(doc);
            const nlohmann::json result = cmd_sweep(doc, sweep_key, split_values(sweep_values), sweep_run);
            const std::string basename = build_scenario(doc).output.basename;
            write_text_file((std::filesystem::path(out_dir) / (basename + "_sweep.json")).string(), result.dump(2) + "\n");
            out << result.dump(2) << '\n';
            return kOk;
        }

        const Scenario scenario = build_scenario(doc);
        const CommandOutput result = dispatch(scenario, command);
        const std::filesystem::path dir(out_dir);
        for (const auto& [suffix, content] : result.files)
            write_text_file((dir / (scenario.output.basename + "_" + suffix)).string(), content);
        write_text_file((dir / (scenario.output.basename + "_summary.json")).string(), result.summary.dump(2) + "\n");
        out << result.summary.dump(2) << '\n';
        return result.exit_code;
    } catch (const std::filesystem::filesystem_error& e) {
        emit_error(err, {{"kind", "io_error"}, {"message", e.what()}, {"exit_code", kIoError}});
        return kIoError;
    } catch (const std::exception& e) {
        auto [code, error] = describe_error(e);
        emit_error(err, error);
        return code;
    }
}

}  // namespace memsim::cli
