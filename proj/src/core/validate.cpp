#include "core/validate.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "core/error.hpp"

namespace bpn {

std::string_view to_string(ViolationCode code)
{
    switch (code) {
    case ViolationCode::PortClash: return "PortClash";
    case ViolationCode::DanglingRef: return "DanglingRef";
    case ViolationCode::InputBothInternalAndEnv: return "InputBothInternalAndEnv";
    case ViolationCode::InputMultiplyDriven: return "InputMultiplyDriven";
    case ViolationCode::InputUnconnected: return "InputUnconnected";
    case ViolationCode::SortMismatch: return "SortMismatch";
    case ViolationCode::CycleDetected: return "CycleDetected";
    case ViolationCode::BindingIncomplete: return "BindingIncomplete";
    case ViolationCode::BindingSortMismatch: return "BindingSortMismatch";
    case ViolationCode::HierarchyNotTree: return "HierarchyNotTree";
    case ViolationCode::SelfLoop: return "SelfLoop";
    }
    return "Unknown";
}

std::string format_violation(const Violation& v)
{
    std::string out(to_string(v.code));
    out += ' ';
    for (std::size_t i = 0; i < v.location.size(); ++i) {
        if (i)
            out += ',';
        out += v.location[i];
    }
    out += ": " + v.message;
    return out;
}

namespace {

class Collector {
public:
    explicit Collector(const Model& m) : model_(m) {}

    void add(ViolationCode code, std::vector<std::string> location, std::string message)
    {
        out.push_back(Violation{code, std::move(location), std::move(message)});
    }

    std::string port(PortId id) const { return model_.port_label(id); }
    std::string proc(ProcessId id) const { return model_.process_name(id); }

    std::vector<Violation> out;

private:
    const Model& model_;
};

bool has_port(const Model& m, PortId id) { return m.ports.count(id) != 0; }

}  // namespace

std::map<ProcessId, std::set<ProcessId>> dependency_graph(const Model& model, const ProcessNet& net)
{
    std::map<ProcessId, std::set<ProcessId>> graph;
    for (ProcessId p : net.processes)
        graph[p];
    for (const Channel& c : net.channels) {
        auto s = model.ports.find(c.source);
        auto d = model.ports.find(c.dest);
        if (s == model.ports.end() || d == model.ports.end())
            continue;
        ProcessId from = s->second.owner;
        ProcessId to = d->second.owner;
        if (!net.processes.count(from) || !net.processes.count(to))
            continue;
        graph[from].insert(to);
    }
    return graph;
}

std::optional<std::vector<ProcessId>> find_cycle(const std::map<ProcessId, std::set<ProcessId>>& graph)
{
    enum class Mark { fresh, active, done };
    std::map<ProcessId, Mark> mark;
    std::vector<ProcessId> stack;
    std::optional<std::vector<ProcessId>> found;

    std::function<bool(ProcessId)> visit = [&](ProcessId v) {
        mark[v] = Mark::active;
        stack.push_back(v);
        auto it = graph.find(v);
        if (it != graph.end()) {
            for (ProcessId w : it->second) {
                Mark mw = mark.count(w) ? mark[w] : Mark::fresh;
                if (mw == Mark::active) {
                    auto start = std::find(stack.begin(), stack.end(), w);
                    found = std::vector<ProcessId>(start, stack.end());
                    return true;
                }
                if (mw == Mark::fresh && visit(w))
                    return true;
            }
        }
        stack.pop_back();
        mark[v] = Mark::done;
        return false;
    };

    for (const auto& [v, succ] : graph) {
        if (!mark.count(v) && visit(v))
            return found;
    }
    return std::nullopt;
}

bool reachable(const std::map<ProcessId, std::set<ProcessId>>& graph, ProcessId from, ProcessId to)
{
    std::set<ProcessId> seen{from};
    std::deque<ProcessId> queue{from};
    while (!queue.empty()) {
        ProcessId v = queue.front();
        queue.pop_front();
        if (v == to)
            return true;
        auto it = graph.find(v);
        if (it == graph.end())
            continue;
        for (ProcessId w : it->second)
            if (seen.insert(w).second)
                queue.push_back(w);
    }
    return false;
}

std::vector<Violation> validate_net(const Model& model, ProcessId owner)
{
    model.process(owner);
    const Subnet& sub = model.subnet(owner);
    const ProcessNet& net = sub.net;
    Collector col(model);

    std::set<ProcessId> members;
    for (ProcessId p : net.processes) {
        if (model.processes.count(p))
            members.insert(p);
        else
            col.add(ViolationCode::DanglingRef, {col.proc(p)},
                    "net of '" + col.proc(owner) + "' lists an undefined process");
    }

    // Endpoint checks shared by channels and the boundary sets. Returns true
    // when the port exists, has the expected direction and a member owner.
    auto endpoint_ok = [&](PortId id, Direction expected, const std::string& role) {
        if (!has_port(model, id)) {
            col.add(ViolationCode::DanglingRef, {col.port(id)}, role + " references an undefined port");
            return false;
        }
        const Port& pt = model.port(id);
        bool ok = true;
        if (pt.direction != expected) {
            col.add(ViolationCode::PortClash, {col.port(id)},
                    role + " must be an " + std::string(to_string(expected)) + " port");
            ok = false;
        }
        if (!members.count(pt.owner)) {
            col.add(ViolationCode::DanglingRef, {col.port(id)},
                    role + " is owned by a process outside the net of '" + col.proc(owner) + "'");
            ok = false;
        }
        return ok;
    };

    std::map<PortId, std::vector<const Channel*>> drivers;
    for (const Channel& c : net.channels) {
        bool src_ok = endpoint_ok(c.source, Direction::output, "channel source");
        bool dst_ok = endpoint_ok(c.dest, Direction::input, "channel destination");
        if (has_port(model, c.dest))
            drivers[c.dest].push_back(&c);
        if (!src_ok || !dst_ok)
            continue;
        const Port& s = model.port(c.source);
        const Port& d = model.port(c.dest);
        if (s.owner == d.owner)
            col.add(ViolationCode::SelfLoop, {col.port(c.source), col.port(c.dest)},
                    "channel connects process '" + col.proc(s.owner) + "' to itself");
        if (!sorts_compatible(s.sort, d.sort))
            col.add(ViolationCode::SortMismatch, {col.port(c.source), col.port(c.dest)},
                    "channel sorts differ: " + to_string(*s.sort) + " vs " + to_string(*d.sort));
    }

    for (const auto& [dest, list] : drivers) {
        if (list.size() > 1) {
            std::vector<std::string> loc{col.port(dest)};
            for (const Channel* c : list)
                loc.push_back(col.port(c->source));
            col.add(ViolationCode::InputMultiplyDriven, std::move(loc),
                    "input is the destination of " + std::to_string(list.size()) + " channels");
        }
    }

    for (PortId p : net.env_inputs) {
        endpoint_ok(p, Direction::input, "environment input");
        if (drivers.count(p))
            col.add(ViolationCode::InputBothInternalAndEnv, {col.port(p)},
                    "input is both a channel destination and an environment input");
    }
    for (PortId p : net.env_outputs)
        endpoint_ok(p, Direction::output, "environment output");

    for (ProcessId m : members) {
        for (PortId in : model.process(m).inputs) {
            if (!has_port(model, in))
                continue;
            if (!drivers.count(in) && !net.env_inputs.count(in))
                col.add(ViolationCode::InputUnconnected, {col.port(in)},
                        "input is neither a channel destination nor an environment input");
        }
    }

    if (auto cycle = find_cycle(dependency_graph(model, net))) {
        std::vector<std::string> loc;
        for (ProcessId p : *cycle)
            loc.push_back(col.proc(p));
        col.add(ViolationCode::CycleDetected, loc, "net of '" + col.proc(owner) + "' is cyclic");
    }

    // Interface binding: direction-preserving bijection onto I and O.
    const Process& parent = model.process(owner);
    std::set<PortId> parent_ports(parent.inputs.begin(), parent.inputs.end());
    parent_ports.insert(parent.outputs.begin(), parent.outputs.end());
    std::map<PortId, PortId> images;
    for (const auto& [outer, inner] : sub.binding.mapping) {
        if (!parent_ports.count(outer)) {
            col.add(ViolationCode::BindingIncomplete, {col.port(outer)},
                    "binding key is not a port of '" + col.proc(owner) + "'");
            continue;
        }
        auto [it, fresh] = images.emplace(inner, outer);
        if (!fresh) {
            col.add(ViolationCode::BindingIncomplete, {col.port(inner), col.port(it->second), col.port(outer)},
                    "boundary port is bound twice");
            continue;
        }
        if (!has_port(model, outer) || !has_port(model, inner)) {
            col.add(ViolationCode::BindingIncomplete, {col.port(outer), col.port(inner)},
                    "binding references an undefined port");
            continue;
        }
        const Port& op = model.port(outer);
        bool is_input = op.direction == Direction::input;
        const auto& side = is_input ? net.env_inputs : net.env_outputs;
        if (!side.count(inner)) {
            col.add(ViolationCode::BindingIncomplete, {col.port(outer), col.port(inner)},
                    std::string("parent ") + (is_input ? "input" : "output") + " is bound to a port outside the net's " +
                        (is_input ? "environment inputs" : "environment outputs"));
            continue;
        }
        if (!sorts_compatible(op.sort, model.port(inner).sort))
            col.add(ViolationCode::BindingSortMismatch, {col.port(outer), col.port(inner)},
                    "bound ports carry different sorts");
    }
    for (PortId p : parent_ports)
        if (!sub.binding.mapping.count(p))
            col.add(ViolationCode::BindingIncomplete, {col.port(p)}, "parent port is not bound into the net");
    for (const auto* side : {&net.env_inputs, &net.env_outputs})
        for (PortId p : *side)
            if (!images.count(p))
                col.add(ViolationCode::BindingIncomplete, {col.port(p)}, "boundary port has no parent port");

    return std::move(col.out);
}

std::vector<Violation> validate_model(const Model& model)
{
    Collector col(model);

    if (!model.processes.count(model.root))
        col.add(ViolationCode::DanglingRef, {col.proc(model.root)}, "root process is undefined");

    for (const auto& [name, sort] : model.sorts)
        if (!sort_well_formed(sort))
            col.add(ViolationCode::SortMismatch, {"sort " + name}, "malformed sort");

    for (const auto& [id, proc] : model.processes) {
        if (proc.id != id)
            col.add(ViolationCode::DanglingRef, {proc.name}, "process id does not match its table key");
        std::set<PortId> listed;
        std::set<std::string> names;
        auto check_list = [&](const std::vector<PortId>& list, Direction dir) {
            for (PortId p : list) {
                if (!listed.insert(p).second) {
                    col.add(ViolationCode::PortClash, {col.port(p)}, "port listed twice by '" + proc.name + "'");
                    continue;
                }
                if (!has_port(model, p)) {
                    col.add(ViolationCode::DanglingRef, {col.port(p), proc.name}, "process lists an undefined port");
                    continue;
                }
                const Port& pt = model.port(p);
                if (pt.owner != id)
                    col.add(ViolationCode::PortClash, {col.port(p), proc.name},
                            "port is listed by a process that does not own it");
                if (pt.direction != dir)
                    col.add(ViolationCode::PortClash, {col.port(p)}, "port direction disagrees with its list");
                if (!names.insert(pt.name).second)
                    col.add(ViolationCode::PortClash, {col.port(p)}, "port name repeated on '" + proc.name + "'");
                if (pt.sort && !sort_well_formed(*pt.sort))
                    col.add(ViolationCode::SortMismatch, {col.port(p)}, "malformed sort");
            }
        };
        check_list(proc.inputs, Direction::input);
        check_list(proc.outputs, Direction::output);
    }

    for (const auto& [id, pt] : model.ports) {
        auto owner = model.processes.find(pt.owner);
        if (owner == model.processes.end()) {
            col.add(ViolationCode::DanglingRef, {col.port(id)}, "port owner is undefined");
            continue;
        }
        const auto& list = pt.direction == Direction::input ? owner->second.inputs : owner->second.outputs;
        if (std::find(list.begin(), list.end(), id) == list.end())
            col.add(ViolationCode::PortClash, {col.port(id)}, "port is not listed by its owner");
    }

    for (const auto& [owner, sub] : model.nets) {
        if (!model.processes.count(owner)) {
            col.add(ViolationCode::DanglingRef, {col.proc(owner)}, "net assigned to an undefined process");
            continue;
        }
        auto found = validate_net(model, owner);
        col.out.insert(col.out.end(), found.begin(), found.end());
    }

    // Hierarchy: each process in at most one net, root in none, and every
    // process reachable from root through the nets.
    std::map<ProcessId, std::vector<ProcessId>> containers;
    for (const auto& [owner, sub] : model.nets)
        for (ProcessId p : sub.net.processes)
            containers[p].push_back(owner);
    for (const auto& [p, owners] : containers) {
        if (p == model.root) {
            col.add(ViolationCode::HierarchyNotTree, {col.proc(p)}, "root process appears inside a net");
        } else if (owners.size() > 1) {
            std::vector<std::string> loc{col.proc(p)};
            for (ProcessId o : owners)
                loc.push_back(col.proc(o));
            col.add(ViolationCode::HierarchyNotTree, std::move(loc), "process appears in more than one net");
        }
    }
    std::set<ProcessId> seen{model.root};
    std::deque<ProcessId> queue{model.root};
    while (!queue.empty()) {
        ProcessId v = queue.front();
        queue.pop_front();
        auto it = model.nets.find(v);
        if (it == model.nets.end())
            continue;
        for (ProcessId w : it->second.net.processes)
            if (seen.insert(w).second)
                queue.push_back(w);
    }
    for (const auto& [id, proc] : model.processes)
        if (!seen.count(id))
            col.add(ViolationCode::HierarchyNotTree, {proc.name}, "process is not reachable from the root");

    return std::move(col.out);
}

std::map<ProcessId, unsigned> serialize_order(const Model& model, ProcessId owner)
{
    model.process(owner);
    const ProcessNet& net = model.subnet(owner).net;
    auto graph = dependency_graph(model, net);

    std::map<ProcessId, unsigned> indegree;
    for (const auto& [v, succ] : graph) {
        indegree.try_emplace(v, 0);
        for (ProcessId w : succ)
            ++indegree[w];
    }
    auto by_name = [&](ProcessId a, ProcessId b) {
        const std::string& na = model.process_name(a);
        const std::string& nb = model.process_name(b);
        return na != nb ? na < nb : a < b;
    };
    std::set<ProcessId, decltype(by_name)> ready(by_name);
    for (const auto& [v, deg] : indegree)
        if (deg == 0)
            ready.insert(v);

    std::map<ProcessId, unsigned> order;
    unsigned next = 1;
    while (!ready.empty()) {
        ProcessId v = *ready.begin();
        ready.erase(ready.begin());
        order[v] = next++;
        for (ProcessId w : graph[v])
            if (--indegree[w] == 0)
                ready.insert(w);
    }

    if (order.size() != graph.size()) {
        std::map<ProcessId, std::set<ProcessId>> rest;
        for (const auto& [v, succ] : graph) {
            if (order.count(v))
                continue;
            for (ProcessId w : succ)
                if (!order.count(w))
                    rest[v].insert(w);
            rest[v];
        }
        std::vector<std::string> witness;
        if (auto cycle = find_cycle(rest))
            for (ProcessId p : *cycle)
                witness.push_back(model.process_name(p));
        std::string msg = "net of '" + model.process_name(owner) + "' is cyclic:";
        for (const auto& w : witness)
            msg += " " + w;
        throw CycleError(ErrorCode::CycleDetected, std::move(witness), msg);
    }
    return order;
}

std::pair<std::set<PortId>, std::set<PortId>> abstract_net(const Model& model, ProcessId owner)
{
    model.process(owner);
    const ProcessNet& net = model.subnet(owner).net;
    return {net.env_inputs, net.env_outputs};
}

}  // namespace bpn
