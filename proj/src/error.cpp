#include "chronoscale/error.hpp"

namespace chronoscale {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::NotInTimeScale: return "NotInTimeScale";
        case ErrorCode::NotTranslationInvariant: return "NotTranslationInvariant";
        case ErrorCode::NotANode: return "NotANode";
        case ErrorCode::NonRegressive: return "NonRegressive";
        case ErrorCode::AtRightEdge: return "AtRightEdge";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::NotStable: return "NotStable";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnknownVariable: return "UnknownVariable";
        case ErrorCode::UnknownFunction: return "UnknownFunction";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::PremiseViolated: return "PremiseViolated";
        case ErrorCode::NotNondecreasing: return "NotNondecreasing";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

}  // namespace chronoscale
