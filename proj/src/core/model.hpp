#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "core/sort.hpp"

namespace bpn {

enum class Direction { input, output };

std::string_view to_string(Direction d);

struct ProcessId {
    std::uint32_t value = 0;
    auto operator<=>(const ProcessId&) const = default;
};

struct PortId {
    std::uint32_t value = 0;
    auto operator<=>(const PortId&) const = default;
};

inline constexpr std::string_view whole_label = "whole";

struct PortLabel {
    PortId port;
    std::string label{whole_label};
    auto operator<=>(const PortLabel&) const = default;
};

/// Executable stand-in for a process's behavior relation: once every needed
/// fragment is present the rule fires once and emits its produced fragments.
struct FiringRule {
    std::vector<PortLabel> needs;
    std::vector<PortLabel> produces;
    std::string compute = "tag";
    bool operator==(const FiringRule&) const = default;
};

struct Port {
    PortId id;
    std::string name;
    Direction direction = Direction::input;
    ProcessId owner;
    std::optional<Sort> sort;
};

struct Process {
    ProcessId id;
    std::string name;
    std::vector<PortId> inputs;
    std::vector<PortId> outputs;
    std::string behavior_note;
    std::vector<FiringRule> firing_rules;
};

struct Channel {
    PortId source;  // output port
    PortId dest;    // input port
    auto operator<=>(const Channel&) const = default;
};

struct ProcessNet {
    std::set<ProcessId> processes;
    std::set<Channel> channels;
    std::set<PortId> env_inputs;
    std::set<PortId> env_outputs;
    bool operator==(const ProcessNet&) const = default;
};

/// Parent port -> subnet boundary port.
struct InterfaceBinding {
    std::map<PortId, PortId> mapping;
    bool operator==(const InterfaceBinding&) const = default;
};

struct Subnet {
    ProcessNet net;
    InterfaceBinding binding;
};

/// A root process plus a partial assignment of nets to processes. Plain
/// value type; the refinement rules copy and return new models.
struct Model {
    SortTable sorts;
    std::map<ProcessId, Process> processes;
    std::map<PortId, Port> ports;
    ProcessId root;
    std::map<ProcessId, Subnet> nets;

    // Lookups throw Error(UnknownProcess / UnknownPort).
    const Process& process(ProcessId id) const;
    Process& process(ProcessId id);
    const Port& port(PortId id) const;
    Port& port(PortId id);

    std::optional<ProcessId> find_process(std::string_view name) const;
    std::optional<PortId> find_port(ProcessId owner, std::string_view name) const;
    // Throwing variants used by name-based rule parameters.
    ProcessId require_process(std::string_view name) const;
    PortId require_port(std::string_view process_name, std::string_view port_name) const;

    bool has_net(ProcessId id) const { return nets.count(id) != 0; }
    const Subnet& subnet(ProcessId owner) const;  // throws NoNet
    Subnet& subnet(ProcessId owner);

    /// Owner of the net that lists `id` as a member, if any.
    std::optional<ProcessId> container_of(ProcessId id) const;

    ProcessId fresh_process_id() const;
    PortId fresh_port_id() const;

    ProcessId add_process(std::string name);
    PortId add_port(ProcessId owner, std::string name, Direction direction,
                    std::optional<Sort> sort = std::nullopt);
    // Removes the port from its owner's lists and the port table only.
    void erase_port(PortId id);

    /// `name^{process}` rendering.
    std::string port_label(PortId id) const;
    /// `process.name` rendering.
    std::string port_path(PortId id) const;
    std::string process_name(ProcessId id) const;

    std::vector<PortId> ports_of(ProcessId id) const;
};

/// Model holding only `root_name` with no ports.
Model make_model(std::string root_name);

}  // namespace bpn
