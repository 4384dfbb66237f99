#pragma once

#include <string>
#include <utility>
#include <vector>

#include "refine/rules.hpp"
#include "refine/script.hpp"

namespace bpn::refine {

struct TraceStep {
    std::string rule;
    std::string parameters;  // the step as script text
    // Accumulated since the start of the script; keys are ports/processes
    // of the input model.
    PortRefinementMap ports;
    ProcessRefinementMap processes;
};

struct Trace {
    std::vector<TraceStep> steps;
    FragmentMap fragments;  // accumulated (port, label) correspondence
};

/// A script step failed; the input model is untouched.
class StepError : public Error {
public:
    StepError(std::size_t index, ErrorCode cause, const std::string& cause_message);

    std::size_t index() const noexcept { return index_; }  // 1-based
    ErrorCode cause() const noexcept { return cause_; }
    const std::string& cause_message() const noexcept { return cause_message_; }

private:
    std::size_t index_;
    ErrorCode cause_;
    std::string cause_message_;
};

/// Resolves the step's names against `model` and runs the rule.
RuleResult apply_step(const Model& model, const Step& step);

/// Runs every step in order, all-or-nothing. Throws StepError.
std::pair<Model, Trace> apply_script(const Model& model, const RefinementScript& script);

/// Script text for one step (single line except for decompose blocks).
std::string format_step(const Step& step);

/// `old ~> {new, ...}` lines for every input-model port replaced by the
/// script, images taken at leaf level, sorted.
std::vector<std::string> format_refinements(const Model& original, const Model& refined, const Trace& trace);

/// Image of an original fragment under the accumulated map (identity when
/// untouched).
std::set<PortLabel> map_fragment(const Trace& trace, const PortLabel& fragment);

}  // namespace bpn::refine
