#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace memsim {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model or waveform parameter is outside its admissible domain.
class ParameterError : public Error {
public:
    ParameterError(std::string field, std::string reason)
        : Error(field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}

    const std::string& field() const noexcept { return field_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    std::string reason_;
};

class UnsupportedPhaseError : public Error {
public:
    using Error::Error;
};

/// Raised by the integrator drivers (step guard, positivity, non-finite state).
class SimulationError : public Error {
public:
    using Error::Error;
};

class StepSizeError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class PositivityError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// Post-processing could not produce a result from the given trace.
class AnalysisError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class NoPeaksError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class GridMismatchError : public AnalysisError {
public:
    using AnalysisError::AnalysisError;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Scenario text could not be turned into a Scenario. Line and column are
/// 1-based; zero means "not tied to a location".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(format(what, line, column)), message_(what), line_(line), column_(column) {}

    const std::string& message() const noexcept { return message_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        std::string loc = "line " + std::to_string(line);
        if (column != 0) loc += ", column " + std::to_string(column);
        return loc + ": " + what;
    }

    std::string message_;
    std::size_t line_;
    std::size_t column_;
};

}  // namespace memsim
