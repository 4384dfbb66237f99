#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "core/decl.hpp"

namespace bpn::refine {

// Name-level rule invocations as they appear in `.bps` files. Names are
// resolved against the model current at the time the step runs.

struct DecomposeStep {
    NetDecl net;  // net.owner is the process being decomposed
};

/// `[new] proc.port [: Sort] [via q1/q2]`
struct EndpointDecl {
    PortRef port;
    bool fresh = false;
    std::optional<SortExpr> sort;
    std::vector<std::string> via;  // subnet process per decomposed level
};

struct AddChannelStep {
    EndpointDecl source;
    EndpointDecl dest;
};

struct AssignSortStep {
    PortRef port;
    SortExpr sort;
};

struct PartDecl {
    std::string name;
    std::optional<SortExpr> sort;
};

struct SplitPortStep {
    PortRef port;
    std::vector<PartDecl> parts;
};

struct UnfoldStep {
    std::string child;
    std::string parent;  // empty: the net that contains child
};

struct FoldStep {
    std::vector<std::string> group;
    std::string owner;
    std::string new_name;
    // Optional names for the fresh ports of the folded process, keyed by
    // the group port they are bound to.
    std::vector<std::pair<PortRef, std::string>> port_names;
};

using Step = std::variant<DecomposeStep, AddChannelStep, AssignSortStep, SplitPortStep, UnfoldStep, FoldStep>;

struct ScriptStep {
    Step step;
    SourceSpan span;
};

struct RefinementScript {
    std::vector<ScriptStep> steps;
    std::string source_file;  // empty unless parsed from a file
};

/// Script keyword of the step: decompose, add-channel, assign-sort,
/// split-port, unfold, fold.
std::string_view rule_name(const Step& step);

}  // namespace bpn::refine
