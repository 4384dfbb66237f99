#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/decl.hpp"
#include "core/error.hpp"
#include "core/model.hpp"
#include "core/validate.hpp"

namespace bpn::refine {

/// Original port -> ports that replace it (the `~>` relation).
using PortRefinementMap = std::map<PortId, std::set<PortId>>;
/// Original process -> processes that realize it.
using ProcessRefinementMap = std::map<ProcessId, std::set<ProcessId>>;
/// Original (port, label) -> fragments that carry the same data afterwards.
using FragmentMap = std::map<PortLabel, std::set<PortLabel>>;

/// Raised when the transformed model would fail validation.
class IllFormedError : public Error {
public:
    IllFormedError(std::vector<Violation> violations, const std::string& context);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// New model plus what the step replaced. Only removed or decomposed
/// entities appear as keys of the maps.
struct RuleResult {
    Model model;
    PortRefinementMap ports;
    ProcessRefinementMap processes;
    FragmentMap fragments;
};

/// Subnet given with explicit ids; every id and name must be fresh.
struct SubnetDraft {
    std::vector<Process> processes;
    std::vector<Port> ports;
    ProcessNet net;
    InterfaceBinding binding;
};

/// Black-box to glass-box: attaches `draft` as the net of `pid`. Errors:
/// AlreadyDecomposed, InterfaceMismatch, FreshnessViolation,
/// WouldBeIllFormed.
RuleResult decompose_process(const Model& model, ProcessId pid, const SubnetDraft& draft);
/// Same, with the subnet declared by name (ids allocated here).
RuleResult decompose_process(const Model& model, const NetDecl& decl);

struct EndpointSpec {
    ProcessId process;
    std::optional<PortId> existing;
    std::string fresh_name;           // used when `existing` is empty
    std::optional<Sort> sort;         // for a fresh port
    std::vector<ProcessId> via;       // subnet process per decomposed level
};

/// Adds a channel inside the net holding both endpoint processes; fresh
/// ports on decomposed processes are pushed down as new boundary ports.
/// Errors: WouldCreateCycle, SortMismatch, CrossNetEndpoints,
/// FreshnessViolation, WouldBeIllFormed.
RuleResult add_channel(const Model& model, const EndpointSpec& source, const EndpointSpec& dest);

/// Sets the sort on `port` and on everything reachable through channel
/// peers and interface bindings. Error: SortConflict.
RuleResult assign_sort(const Model& model, PortId port, const Sort& sort);

struct PartSpec {
    std::string name;
    std::optional<Sort> sort;
};

/// Replaces the port (and its peer/binding closure) by one port per part.
/// Errors: TooFewParts, PartitionMismatch, SortConflict,
/// FreshnessViolation, WouldBeIllFormed.
RuleResult split_port(const Model& model, PortId port, const std::vector<PartSpec>& parts);

/// Copies the net of `child` into the net of `parent`, removing `child`.
/// Errors: NoSuchChild, ChildNotDecomposed.
RuleResult unfold(const Model& model, ProcessId parent, ProcessId child);

/// Extracts the convex `group` of `owner`'s net into a fresh process named
/// `new_name` whose net is the group. `port_names` optionally names the
/// fresh port bound to a given group port. Errors: EmptyGroup,
/// GroupNotSubset, NotConvex, FreshnessViolation.
RuleResult fold(const Model& model, ProcessId owner, const std::set<ProcessId>& group,
                const std::string& new_name, const std::map<PortId, std::string>& port_names = {});

/// Ports reachable from `port` through channel peers and interface
/// bindings (the port itself included).
std::set<PortId> sort_closure(const Model& model, PortId port);

/// Follows interface bindings downward until a port of a leaf process.
PortId leaf_image(const Model& model, PortId port);

/// Throws IllFormedError when validate_model reports anything.
void require_well_formed(const Model& model, const std::string& context);

}  // namespace bpn::refine
