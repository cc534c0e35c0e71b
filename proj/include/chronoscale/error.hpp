#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chronoscale {

enum class ErrorCode {
    EmptyWindow,
    BadParams,
    NotInTimeScale,
    NotTranslationInvariant,
    NotANode,
    NonRegressive,
    AtRightEdge,
    Overflow,
    NotStable,
    SyntaxError,
    UnknownVariable,
    UnknownFunction,
    IndexOutOfRange,
    DomainError,
    NoConvergence,
    PremiseViolated,
    NotNondecreasing,
    WindowTooShort,
    GridMismatch,
    ConfigError,
};

const char* to_string(ErrorCode code) noexcept;

/// Base exception for every failure reported by the library. The code is the
/// stable machine-readable part; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, const std::string& what)
        : Error(ErrorCode::SyntaxError, what + " at offset " + std::to_string(offset)),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class NoConvergence : public Error {
public:
    NoConvergence(std::vector<double> step_norms, const std::string& what)
        : Error(ErrorCode::NoConvergence, what), step_norms_(std::move(step_norms)) {}

    const std::vector<double>& step_norms() const noexcept { return step_norms_; }

private:
    std::vector<double> step_norms_;
};

class PremiseViolated : public Error {
public:
    PremiseViolated(std::vector<double> nodes, const std::string& what)
        : Error(ErrorCode::PremiseViolated, what), nodes_(std::move(nodes)) {}

    const std::vector<double>& nodes() const noexcept { return nodes_; }

private:
    std::vector<double> nodes_;
};

/// Evaluation failure (log of a non-positive value, division by zero, ...)
/// tagged with the source offset of the offending node.
class DomainError : public Error {
public:
    DomainError(std::size_t offset, const std::string& what)
        : Error(ErrorCode::DomainError, what + " at offset " + std::to_string(offset)),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Configuration failure located by a JSON pointer ("/initial/y0").
class ConfigError : public Error {
public:
    ConfigError(std::string pointer, const std::string& what)
        : Error(ErrorCode::ConfigError, pointer + ": " + what), pointer_(std::move(pointer)) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

}  // namespace chronoscale
