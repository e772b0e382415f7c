#include "rypanel/errors.hpp"

namespace rypanel {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateObservation: return "DuplicateObservation";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::NonPositiveValue: return "NonPositiveValue";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::EmptySubset: return "EmptySubset";
        case ErrorCode::InsufficientObservations: return "InsufficientObservations";
        case ErrorCode::DegenerateColumn: return "DegenerateColumn";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::DegenerateVariance: return "DegenerateVariance";
        case ErrorCode::DegenerateResiduals: return "DegenerateResiduals";
        case ErrorCode::NotComputable: return "NotComputable";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::SpecMismatch: return "SpecMismatch";
        case ErrorCode::PrereqEntities: return "PrereqEntities";
        case ErrorCode::SingularSystem: return "SingularSystem";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

} // namespace rypanel
