#pragma once

#include <stdexcept>
#include <string>

namespace fixsynth {

enum class ErrorCode {
    InvalidFormat,
    InvalidArgument,
    DomainError,
    DivisionByZero,
    FixedDivisionByZero,
    NonFinite,
    ParseError,
    UseBeforeDef,
    DuplicateDefinition,
    UnknownIdentifier,
    EmptyOutputs,
    DomainViolation,
    DimensionMismatch,
    RelativeZeroReference,
    UnknownBench,
    InstanceTooLarge,
    SimulationDiverged,
    ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Raised by the DSL parser; carries a 1-based source position.
class ParseError : public Error {
public:
    ParseError(ErrorCode code, const std::string& msg, int line, int column);
    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

// Raised by program evaluation; names the variable being computed.
class EvalError : public Error {
public:
    EvalError(ErrorCode code, const std::string& var, const std::string& msg)
        : Error(code, var.empty() ? msg : var + ": " + msg), var_(var) {}
    const std::string& variable() const noexcept { return var_; }

private:
    std::string var_;
};

}  // namespace fixsynth
