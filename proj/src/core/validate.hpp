#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace bpn {

enum class ViolationCode {
    PortClash,
    DanglingRef,
    InputBothInternalAndEnv,
    InputMultiplyDriven,
    InputUnconnected,
    SortMismatch,
    CycleDetected,
    BindingIncomplete,
    BindingSortMismatch,
    HierarchyNotTree,
    SelfLoop,
};

std::string_view to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::vector<std::string> location;  // never empty
    std::string message;
    bool operator==(const Violation&) const = default;
};

/// `CODE loc1,loc2: message`
std::string format_violation(const Violation& v);

/// Well-formedness of one net: channel/boundary constraints, totality of
/// input connection, acyclicity, port references and binding consistency.
/// Throws UnknownProcess / NoNet.
std::vector<Violation> validate_net(const Model& model, ProcessId owner);

/// Every net, plus port ownership, global references and the tree shape
/// of the hierarchy. Never throws.
std::vector<Violation> validate_model(const Model& model);

/// Injective ranking 1..n of the net's processes increasing along every
/// channel. Kahn's algorithm; ready processes are taken in name order.
/// Throws CycleError(CycleDetected) carrying a witness cycle.
std::map<ProcessId, unsigned> serialize_order(const Model& model, ProcessId owner);

/// Boundary of the subnet: (env_inputs, env_outputs).
std::pair<std::set<PortId>, std::set<PortId>> abstract_net(const Model& model, ProcessId owner);

/// Process-level successor sets of a net; channels whose endpoints are not
/// owned by members are skipped.
std::map<ProcessId, std::set<ProcessId>> dependency_graph(const Model& model, const ProcessNet& net);

/// Some directed cycle (first vertex not repeated), or nullopt when acyclic.
std::optional<std::vector<ProcessId>> find_cycle(const std::map<ProcessId, std::set<ProcessId>>& graph);

/// True when `to` is reachable from `from` (a vertex reaches itself).
bool reachable(const std::map<ProcessId, std::set<ProcessId>>& graph, ProcessId from, ProcessId to);

}  // namespace bpn
