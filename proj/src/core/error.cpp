#include "core/error.hpp"

namespace bpn {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::UnknownProcess: return "UnknownProcess";
    case ErrorCode::UnknownPort: return "UnknownPort";
    case ErrorCode::NoNet: return "NoNet";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateDefinition: return "DuplicateDefinition";
    case ErrorCode::UnknownSortName: return "UnknownSortName";
    case ErrorCode::UnknownRuleName: return "UnknownRuleName";
    case ErrorCode::AlreadyDecomposed: return "AlreadyDecomposed";
    case ErrorCode::InterfaceMismatch: return "InterfaceMismatch";
    case ErrorCode::FreshnessViolation: return "FreshnessViolation";
    case ErrorCode::WouldBeIllFormed: return "WouldBeIllFormed";
    case ErrorCode::WouldCreateCycle: return "WouldCreateCycle";
    case ErrorCode::SortMismatch: return "SortMismatch";
    case ErrorCode::CrossNetEndpoints: return "CrossNetEndpoints";
    case ErrorCode::SortConflict: return "SortConflict";
    case ErrorCode::PartitionMismatch: return "PartitionMismatch";
    case ErrorCode::TooFewParts: return "TooFewParts";
    case ErrorCode::NoSuchChild: return "NoSuchChild";
    case ErrorCode::ChildNotDecomposed: return "ChildNotDecomposed";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::GroupNotSubset: return "GroupNotSubset";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::StepFailed: return "StepFailed";
    case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::InvalidEnvFragment: return "InvalidEnvFragment";
    case ErrorCode::NonDeterministicRules: return "NonDeterministicRules";
    case ErrorCode::InvalidRule: return "InvalidRule";
    }
    return "Unknown";
}

namespace {

std::string located(const SourceSpan& span, const std::string& message)
{
    std::string out = span.file.empty() ? std::string("<input>") : span.file;
    out += ':' + std::to_string(span.line) + ':' + std::to_string(span.column) + ": " + message;
    return out;
}

}  // namespace

ParseError::ParseError(ErrorCode code, SourceSpan span, const std::string& message)
    : Error(code, located(span, message)), span_(std::move(span)), detail_(message)
{
}

}  // namespace bpn
