#include <algorithm>
#include <set>

#include "refine/rules.hpp"

namespace bpn::refine {

RuleResult decompose_process(const Model& model, ProcessId pid, const SubnetDraft& draft)
{
    const Process& target = model.process(pid);
    if (model.has_net(pid))
        throw Error(ErrorCode::AlreadyDecomposed, "process '" + target.name + "' already has a net");

    std::set<std::string> names;
    std::set<ProcessId> draft_ids;
    for (const Process& p : draft.processes) {
        if (model.processes.count(p.id) || p.id == model.root || !draft_ids.insert(p.id).second)
            throw Error(ErrorCode::FreshnessViolation, "process id #" + std::to_string(p.id.value) + " is not fresh");
        if (model.find_process(p.name) || !names.insert(p.name).second)
            throw Error(ErrorCode::FreshnessViolation, "process name '" + p.name + "' is already in use");
    }
    std::set<PortId> draft_ports;
    for (const Port& pt : draft.ports) {
        if (model.ports.count(pt.id) || !draft_ports.insert(pt.id).second)
            throw Error(ErrorCode::FreshnessViolation, "port id #" + std::to_string(pt.id.value) + " is not fresh");
        if (!draft_ids.count(pt.owner))
            throw Error(ErrorCode::FreshnessViolation, "port '" + pt.name + "' is not owned by a subnet process");
    }
    if (draft.net.processes != draft_ids)
        throw Error(ErrorCode::FreshnessViolation, "subnet members must be exactly the drafted processes");

    // Interface: exact, direction-preserving bijection.
    const auto& mapping = draft.binding.mapping;
    auto mismatch = [&](const std::string& why) {
        return Error(ErrorCode::InterfaceMismatch, "cannot decompose '" + target.name + "': " + why);
    };
    if (target.inputs.size() != draft.net.env_inputs.size())
        throw mismatch(std::to_string(target.inputs.size()) + " parent inputs vs " +
                       std::to_string(draft.net.env_inputs.size()) + " subnet environment inputs");
    if (target.outputs.size() != draft.net.env_outputs.size())
        throw mismatch(std::to_string(target.outputs.size()) + " parent outputs vs " +
                       std::to_string(draft.net.env_outputs.size()) + " subnet environment outputs");
    if (mapping.size() != target.inputs.size() + target.outputs.size())
        throw mismatch("binding does not cover every parent port exactly once");
    std::set<PortId> images;
    for (const auto* list : {&target.inputs, &target.outputs}) {
        bool input = list == &target.inputs;
        for (PortId p : *list) {
            auto it = mapping.find(p);
            if (it == mapping.end())
                throw mismatch("port '" + model.port(p).name + "' is not bound");
            const auto& side = input ? draft.net.env_inputs : draft.net.env_outputs;
            if (!side.count(it->second))
                throw mismatch("port '" + model.port(p).name + "' is bound outside the matching boundary set");
            if (!images.insert(it->second).second)
                throw mismatch("two parent ports are bound to the same subnet port");
        }
    }

    RuleResult out{model, {}, {}, {}};
    Model& m = out.model;
    for (const Process& p : draft.processes)
        m.processes.emplace(p.id, p);
    for (const Port& pt : draft.ports)
        m.ports.emplace(pt.id, pt);
    m.nets.emplace(pid, Subnet{draft.net, draft.binding});
    require_well_formed(m, "decompose '" + target.name + "'");
    out.processes[pid] = draft_ids;
    return out;
}

RuleResult decompose_process(const Model& model, const NetDecl& decl)
{
    ProcessId pid = model.require_process(decl.owner);
    if (model.has_net(pid))
        throw Error(ErrorCode::AlreadyDecomposed, "process '" + decl.owner + "' already has a net");
    for (const auto& pd : decl.processes)
        if (model.find_process(pd.name))
            throw Error(ErrorCode::FreshnessViolation, "process name '" + pd.name + "' is already in use");
    if (!decl.members.empty())
        throw Error(ErrorCode::FreshnessViolation, "decompose declares its subnet processes inline");

    // Allocate ids in a scratch copy, then lift the new entities out.
    Model scratch = model;
    std::set<ProcessId> fresh;
    for (const auto& pd : decl.processes)
        fresh.insert(declare_process(scratch, pd));
    for (const auto& r : decl.rules) {
        auto p = scratch.find_process(r.process);
        if (!p || !fresh.count(*p))
            throw ParseError(ErrorCode::InvalidRule, r.span, "rule must target a process of the new subnet");
    }
    declare_net(scratch, decl);

    SubnetDraft draft;
    for (ProcessId p : fresh)
        draft.processes.push_back(scratch.process(p));
    for (const auto& [id, pt] : scratch.ports)
        if (fresh.count(pt.owner))
            draft.ports.push_back(pt);
    draft.net = scratch.subnet(pid).net;
    draft.binding = scratch.subnet(pid).binding;
    return decompose_process(model, pid, draft);
}

namespace {

std::string unique_port_name(const Model& m, ProcessId owner, const std::string& base)
{
    if (!m.find_port(owner, base))
        return base;
    for (int i = 2;; ++i) {
        std::string candidate = base + "_" + std::to_string(i);
        if (!m.find_port(owner, candidate))
            return candidate;
    }
}

PortId resolve_endpoint(Model& m, const EndpointSpec& spec, Direction dir)
{
    const Process& proc = m.process(spec.process);
    if (spec.existing) {
        const Port& pt = m.port(*spec.existing);
        if (pt.owner != spec.process || pt.direction != dir)
            throw Error(ErrorCode::UnknownPort, "'" + m.port_path(pt.id) + "' is not an " +
                                                    std::string(to_string(dir)) + " of '" + proc.name + "'");
        return pt.id;
    }
    if (spec.fresh_name.empty())
        throw Error(ErrorCode::FreshnessViolation, "fresh port on '" + proc.name + "' needs a name");
    if (m.find_port(spec.process, spec.fresh_name))
        throw Error(ErrorCode::FreshnessViolation,
                    "port '" + spec.fresh_name + "' already exists on '" + proc.name + "'");
    if (spec.sort && !sort_well_formed(*spec.sort))
        throw Error(ErrorCode::SortConflict, "malformed sort for '" + spec.fresh_name + "'");
    return m.add_port(spec.process, spec.fresh_name, dir, spec.sort);
}

// A fresh port on a decomposed process needs a matching boundary port in
// its subnet, and so on down the hierarchy.
void push_down(Model& m, PortId port, std::vector<ProcessId> via)
{
    const Port pt = m.port(port);
    if (!m.has_net(pt.owner))
        return;
    Subnet& sub = m.subnet(pt.owner);
    std::optional<ProcessId> target;
    if (!via.empty()) {
        if (!sub.net.processes.count(via.front()))
            throw Error(ErrorCode::NoSuchChild, "'" + m.process_name(via.front()) + "' is not in the net of '" +
                                                    m.process_name(pt.owner) + "'");
        target = via.front();
        via.erase(via.begin());
    } else {
        for (ProcessId p : sub.net.processes)
            if (!target || m.process_name(p) < m.process_name(*target))
                target = p;
    }
    if (!target)
        throw Error(ErrorCode::InterfaceMismatch,
                    "cannot extend the interface of '" + m.process_name(pt.owner) + "': its net is empty");
    PortId inner = m.add_port(*target, unique_port_name(m, *target, pt.name), pt.direction, pt.sort);
    (pt.direction == Direction::input ? sub.net.env_inputs : sub.net.env_outputs).insert(inner);
    sub.binding.mapping[port] = inner;
    push_down(m, inner, std::move(via));
}

}  // namespace

RuleResult add_channel(const Model& model, const EndpointSpec& source, const EndpointSpec& dest)
{
    const Process& sp = model.process(source.process);
    const Process& dp = model.process(dest.process);
    auto sc = model.container_of(source.process);
    auto dc = model.container_of(dest.process);
    if (!sc || !dc || *sc != *dc)
        throw Error(ErrorCode::CrossNetEndpoints,
                    "'" + sp.name + "' and '" + dp.name + "' are not members of the same net");
    if (source.process == dest.process)
        throw Error(ErrorCode::WouldCreateCycle, "channel from '" + sp.name + "' to itself");
    auto graph = dependency_graph(model, model.subnet(*sc).net);
    if (reachable(graph, dest.process, source.process))
        throw Error(ErrorCode::WouldCreateCycle,
                    "'" + dp.name + "' already reaches '" + sp.name + "'; the channel would close a cycle");

    RuleResult out{model, {}, {}, {}};
    Model& m = out.model;
    PortId s = resolve_endpoint(m, source, Direction::output);
    PortId d = resolve_endpoint(m, dest, Direction::input);
    const auto& ss = m.port(s).sort;
    const auto& ds = m.port(d).sort;
    if (!sorts_compatible(ss, ds))
        throw Error(ErrorCode::SortMismatch, "channel " + m.port_path(s) + " -> " + m.port_path(d) +
                                                 " joins " + to_string(*ss) + " and " + to_string(*ds));
    m.subnet(*sc).net.channels.insert(Channel{s, d});
    if (!source.existing)
        push_down(m, s, source.via);
    if (!dest.existing)
        push_down(m, d, dest.via);
    require_well_formed(m, "add-channel " + m.port_path(s) + " -> " + m.port_path(d));
    return out;
}

}  // namespace bpn::refine
