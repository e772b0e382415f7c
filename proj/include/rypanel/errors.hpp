#pragma once

#include <stdexcept>
#include <string>

namespace rypanel {

enum class ErrorCode {
    DuplicateObservation,
    ParseError,
    SchemaError,
    NonPositiveValue,
    UnknownVariable,
    EmptySubset,
    InsufficientObservations,
    DegenerateColumn,
    RankDeficient,
    DegenerateVariance,
    DegenerateResiduals,
    NotComputable,
    DomainError,
    SpecMismatch,
    PrereqEntities,
    SingularSystem,
    ConfigError,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception. `code()` identifies the failure class so callers
/// (CLI, study runner, bindings) can map it without parsing the message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace rypanel
