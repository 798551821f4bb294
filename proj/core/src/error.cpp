#include "fixsynth/error.hpp"

namespace fixsynth {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidFormat: return "invalid-format";
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::DomainError: return "domain-error";
        case ErrorCode::DivisionByZero: return "division-by-zero";
        case ErrorCode::FixedDivisionByZero: return "fixed-division-by-zero";
        case ErrorCode::NonFinite: return "non-finite";
        case ErrorCode::ParseError: return "parse-error";
        case ErrorCode::UseBeforeDef: return "use-before-definition";
        case ErrorCode::DuplicateDefinition: return "duplicate-definition";
        case ErrorCode::UnknownIdentifier: return "unknown-identifier";
        case ErrorCode::EmptyOutputs: return "empty-outputs";
        case ErrorCode::DomainViolation: return "domain-violation";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::RelativeZeroReference: return "relative-zero-reference";
        case ErrorCode::UnknownBench: return "unknown-bench";
        case ErrorCode::InstanceTooLarge: return "instance-too-large";
        case ErrorCode::SimulationDiverged: return "simulation-diverged";
        case ErrorCode::ConfigError: return "config-error";
    }
    return "unknown";
}

ParseError::ParseError(ErrorCode code, const std::string& msg, int line, int column)
    : Error(code, std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

}  // namespace fixsynth
