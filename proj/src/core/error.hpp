#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bpn {

// Closed set of failure kinds raised by the library. Append only.
enum class ErrorCode {
    UnknownProcess,
    UnknownPort,
    NoNet,
    CycleDetected,
    ParseError,
    DuplicateDefinition,
    UnknownSortName,
    UnknownRuleName,
    AlreadyDecomposed,
    InterfaceMismatch,
    FreshnessViolation,
    WouldBeIllFormed,
    WouldCreateCycle,
    SortMismatch,
    CrossNetEndpoints,
    SortConflict,
    PartitionMismatch,
    TooFewParts,
    NoSuchChild,
    ChildNotDecomposed,
    NotConvex,
    GroupNotSubset,
    EmptyGroup,
    StepFailed,
    SearchBudgetExceeded,
    InvalidEnvFragment,
    NonDeterministicRules,
    InvalidRule,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct SourceSpan {
    std::string file;
    int line = 1;
    int column = 1;
};

class ParseError : public Error {
public:
    ParseError(ErrorCode code, SourceSpan span, const std::string& message);

    const SourceSpan& span() const noexcept { return span_; }
    // Message without the location prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    SourceSpan span_;
    std::string detail_;
};

// Carries the witness cycle as process display names, in path order.
class CycleError : public Error {
public:
    CycleError(ErrorCode code, std::vector<std::string> witness, const std::string& message)
        : Error(code, message), witness_(std::move(witness)) {}

    const std::vector<std::string>& witness() const noexcept { return witness_; }

private:
    std::vector<std::string> witness_;
};

}  // namespace bpn
