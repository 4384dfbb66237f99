#include <algorithm>
#include <deque>

#include "refine/rules.hpp"

namespace bpn::refine {

namespace {

std::vector<std::string> labels_of(const Port& pt)
{
    std::vector<std::string> labels{std::string(whole_label)};
    if (pt.sort && pt.sort->is_record())
        for (const auto& f : pt.sort->fields)
            labels.push_back(f.name);
    return labels;
}

}  // namespace

RuleResult unfold(const Model& model, ProcessId parent, ProcessId child)
{
    const Process& pp = model.process(parent);
    const Process& cp = model.process(child);
    auto pnet = model.nets.find(parent);
    if (pnet == model.nets.end() || !pnet->second.net.processes.count(child))
        throw Error(ErrorCode::NoSuchChild, "'" + cp.name + "' is not in the net of '" + pp.name + "'");
    if (!model.has_net(child))
        throw Error(ErrorCode::ChildNotDecomposed, "'" + cp.name + "' has no net to unfold");

    const Subnet inner = model.subnet(child);
    auto bound = [&](PortId p) {
        auto it = inner.binding.mapping.find(p);
        if (it == inner.binding.mapping.end())
            throw Error(ErrorCode::WouldBeIllFormed, "'" + model.port_path(p) + "' is not bound into its net");
        return it->second;
    };
    auto rebind = [&](PortId p) { return model.port(p).owner == child ? bound(p) : p; };

    RuleResult out{model, {}, {}, {}};
    Model& m = out.model;
    Subnet& outer = m.subnet(parent);

    std::set<Channel> channels;
    for (const Channel& c : outer.net.channels)
        channels.insert(Channel{rebind(c.source), rebind(c.dest)});
    channels.insert(inner.net.channels.begin(), inner.net.channels.end());
    outer.net.channels = std::move(channels);

    auto rebind_set = [&](std::set<PortId>& s) {
        std::set<PortId> next;
        for (PortId p : s)
            next.insert(rebind(p));
        s = std::move(next);
    };
    rebind_set(outer.net.env_inputs);
    rebind_set(outer.net.env_outputs);
    for (auto& [key, value] : outer.binding.mapping)
        value = rebind(value);

    outer.net.processes.erase(child);
    outer.net.processes.insert(inner.net.processes.begin(), inner.net.processes.end());

    for (PortId p : model.ports_of(child)) {
        PortId img = bound(p);
        out.ports[p] = {img};
        for (const auto& label : labels_of(model.port(p)))
            out.fragments[PortLabel{p, label}] = {PortLabel{img, label}};
        m.ports.erase(p);
    }
    m.nets.erase(child);
    m.processes.erase(child);
    out.processes[child] = inner.net.processes;
    require_well_formed(m, "unfold '" + cp.name + "'");
    return out;
}

namespace {

// Path group -> outside -> group through the dependency graph, if any.
std::optional<std::vector<ProcessId>> escape_path(const std::map<ProcessId, std::set<ProcessId>>& graph,
                                                  const std::set<ProcessId>& group)
{
    std::map<ProcessId, ProcessId> parent;
    std::deque<ProcessId> queue;
    for (ProcessId g : group) {
        auto it = graph.find(g);
        if (it == graph.end())
            continue;
        for (ProcessId w : it->second)
            if (!group.count(w) && !parent.count(w)) {
                parent[w] = g;
                queue.push_back(w);
            }
    }
    while (!queue.empty()) {
        ProcessId v = queue.front();
        queue.pop_front();
        auto it = graph.find(v);
        if (it == graph.end())
            continue;
        for (ProcessId w : it->second) {
            if (group.count(w)) {
                std::vector<ProcessId> path{w, v};
                for (ProcessId x = v; !group.count(x);) {
                    x = parent.at(x);
                    path.push_back(x);
                }
                std::reverse(path.begin(), path.end());
                return path;
            }
            if (!parent.count(w)) {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    return std::nullopt;
}

}  // namespace

RuleResult fold(const Model& model, ProcessId owner, const std::set<ProcessId>& group, const std::string& new_name,
                const std::map<PortId, std::string>& port_names)
{
    const Process& op = model.process(owner);
    if (group.empty())
        throw Error(ErrorCode::EmptyGroup, "fold needs at least one process");
    const ProcessNet& net = model.subnet(owner).net;
    for (ProcessId g : group)
        if (!net.processes.count(g))
            throw Error(ErrorCode::GroupNotSubset,
                        "'" + model.process_name(g) + "' is not in the net of '" + op.name + "'");
    if (group == net.processes)
        throw Error(ErrorCode::GroupNotSubset, "fold group must be a proper subset of the net of '" + op.name + "'");
    if (new_name.empty() || model.find_process(new_name))
        throw Error(ErrorCode::FreshnessViolation, "process name '" + new_name + "' is already in use");
    if (auto path = escape_path(dependency_graph(model, net), group)) {
        std::string msg = "group is not convex:";
        for (ProcessId p : *path)
            msg += " " + model.process_name(p);
        throw CycleError(ErrorCode::NotConvex,
                         [&] {
                             std::vector<std::string> names;
                             for (ProcessId p : *path)
                                 names.push_back(model.process_name(p));
                             return names;
                         }(),
                         msg);
    }

    RuleResult out{model, {}, {}, {}};
    Model& m = out.model;
    ProcessId q = m.add_process(new_name);
    auto in_group = [&](PortId p) { return group.count(model.port(p).owner) != 0; };

    std::set<std::string> used;
    auto name_for = [&](PortId inner) {
        auto it = port_names.find(inner);
        if (it != port_names.end()) {
            if (!used.insert(it->second).second)
                throw Error(ErrorCode::FreshnessViolation, "port name '" + it->second + "' requested twice");
            return it->second;
        }
        std::string base = model.process_name(model.port(inner).owner) + "_" + model.port(inner).name;
        std::string name = base;
        for (int i = 2; used.count(name) || std::any_of(port_names.begin(), port_names.end(),
                                                         [&](const auto& kv) { return kv.second == name; });
             ++i)
            name = base + "_" + std::to_string(i);
        used.insert(name);
        return name;
    };
    // Deterministic port creation order: by inner port path.
    auto by_path = [&](PortId a, PortId b) { return model.port_path(a) < model.port_path(b); };

    Subnet sub;
    sub.net.processes = group;
    std::set<PortId, decltype(by_path)> crossing_in(by_path), crossing_out(by_path);
    for (const Channel& c : net.channels) {
        bool s = in_group(c.source), d = in_group(c.dest);
        if (s && d)
            sub.net.channels.insert(c);
        else if (d)
            crossing_in.insert(c.dest);
        else if (s)
            crossing_out.insert(c.source);
    }
    for (PortId p : net.env_inputs)
        if (in_group(p))
            crossing_in.insert(p);
    for (PortId p : net.env_outputs)
        if (in_group(p))
            crossing_out.insert(p);

    std::map<PortId, PortId> outer_of;  // group boundary port -> fresh port of q
    for (PortId inner : crossing_in) {
        const Port& ip = model.port(inner);
        outer_of[inner] = m.add_port(q, name_for(inner), Direction::input, ip.sort);
        sub.net.env_inputs.insert(inner);
        sub.binding.mapping[outer_of[inner]] = inner;
    }
    for (PortId inner : crossing_out) {
        const Port& ip = model.port(inner);
        outer_of[inner] = m.add_port(q, name_for(inner), Direction::output, ip.sort);
        sub.net.env_outputs.insert(inner);
        sub.binding.mapping[outer_of[inner]] = inner;
    }
    auto lift = [&](PortId p) {
        auto it = outer_of.find(p);
        return it == outer_of.end() ? p : it->second;
    };

    Subnet& parent = m.subnet(owner);
    std::set<Channel> channels;
    for (const Channel& c : net.channels) {
        if (in_group(c.source) && in_group(c.dest))
            continue;
        channels.insert(Channel{lift(c.source), lift(c.dest)});
    }
    parent.net.channels = std::move(channels);
    for (auto* side : {&parent.net.env_inputs, &parent.net.env_outputs}) {
        std::set<PortId> next;
        for (PortId p : *side)
            next.insert(lift(p));
        *side = std::move(next);
    }
    for (auto& [key, value] : parent.binding.mapping)
        value = lift(value);
    for (ProcessId g : group)
        parent.net.processes.erase(g);
    parent.net.processes.insert(q);
    m.nets.emplace(q, std::move(sub));

    require_well_formed(m, "fold into '" + new_name + "'");
    return out;
}

}  // namespace bpn::refine
