#pragma once

// Command implementations behind the memtest-sim executable. Commands are
// pure: they return the summary and the files to write, and `run` does the
// I/O so that tests can drive everything in-process.

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "memsim/scenario.hpp"

namespace memsim::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kParseError = 2,
    kAnalysisError = 3,
    kInconclusive = 4,
    kTestFailed = 5,
};

struct CommandOutput {
    int exit_code = kOk;
    nlohmann::json summary;
    /// (file name suffix, content), e.g. ("trace.csv", ...).
    std::vector<std::pair<std::string, std::string>> files;
};

CommandOutput cmd_loop(const Scenario& s);
CommandOutput cmd_timeseries(const Scenario& s);
CommandOutput cmd_memtest(const Scenario& s);

/// Runs `command` once per value of `key`. Output order follows `values`.
nlohmann::json cmd_sweep(const ScenarioDocument& doc, const std::string& key, const std::vector<std::string>& values,
                         const std::string& command);

/// Exit code and machine-readable error object for an exception thrown by a
/// command.
std::pair<int, nlohmann::json> describe_error(const std::exception& e);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace memsim::cli
