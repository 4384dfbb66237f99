#include "core/model.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace bpn {

std::string_view to_string(Direction d) { return d == Direction::input ? "input" : "output"; }

const Process& Model::process(ProcessId id) const
{
    auto it = processes.find(id);
    if (it == processes.end())
        throw Error(ErrorCode::UnknownProcess, "unknown process #" + std::to_string(id.value));
    return it->second;
}

Process& Model::process(ProcessId id)
{
    return const_cast<Process&>(std::as_const(*this).process(id));
}

const Port& Model::port(PortId id) const
{
    auto it = ports.find(id);
    if (it == ports.end())
        throw Error(ErrorCode::UnknownPort, "unknown port #" + std::to_string(id.value));
    return it->second;
}

Port& Model::port(PortId id) { return const_cast<Port&>(std::as_const(*this).port(id)); }

std::optional<ProcessId> Model::find_process(std::string_view name) const
{
    for (const auto& [id, p] : processes)
        if (p.name == name)
            return id;
    return std::nullopt;
}

std::optional<PortId> Model::find_port(ProcessId owner, std::string_view name) const
{
    auto it = processes.find(owner);
    if (it == processes.end())
        return std::nullopt;
    for (const auto* list : {&it->second.inputs, &it->second.outputs})
        for (PortId pid : *list) {
            auto pt = ports.find(pid);
            if (pt != ports.end() && pt->second.name == name)
                return pid;
        }
    return std::nullopt;
}

ProcessId Model::require_process(std::string_view name) const
{
    if (auto id = find_process(name))
        return *id;
    throw Error(ErrorCode::UnknownProcess, "unknown process '" + std::string(name) + "'");
}

PortId Model::require_port(std::string_view process_name, std::string_view port_name) const
{
    ProcessId owner = require_process(process_name);
    if (auto id = find_port(owner, port_name))
        return *id;
    throw Error(ErrorCode::UnknownPort,
                "unknown port '" + std::string(process_name) + "." + std::string(port_name) + "'");
}

const Subnet& Model::subnet(ProcessId owner) const
{
    auto it = nets.find(owner);
    if (it == nets.end()) {
        auto p = processes.find(owner);
        if (p == processes.end())
            throw Error(ErrorCode::UnknownProcess, "unknown process #" + std::to_string(owner.value));
        throw Error(ErrorCode::NoNet, "process '" + p->second.name + "' has no net");
    }
    return it->second;
}

Subnet& Model::subnet(ProcessId owner)
{
    return const_cast<Subnet&>(std::as_const(*this).subnet(owner));
}

std::optional<ProcessId> Model::container_of(ProcessId id) const
{
    for (const auto& [owner, sub] : nets)
        if (sub.net.processes.count(id))
            return owner;
    return std::nullopt;
}

ProcessId Model::fresh_process_id() const
{
    std::uint32_t next = processes.empty() ? 1 : processes.rbegin()->first.value + 1;
    if (root.value >= next)
        next = root.value + 1;
    return ProcessId{next};
}

PortId Model::fresh_port_id() const
{
    return PortId{ports.empty() ? 1u : ports.rbegin()->first.value + 1};
}

ProcessId Model::add_process(std::string name)
{
    Process p;
    p.id = fresh_process_id();
    p.name = std::move(name);
    ProcessId id = p.id;
    processes.emplace(id, std::move(p));
    return id;
}

PortId Model::add_port(ProcessId owner, std::string name, Direction direction,
                       std::optional<Sort> sort)
{
    Process& proc = process(owner);
    Port pt;
    pt.id = fresh_port_id();
    pt.name = std::move(name);
    pt.direction = direction;
    pt.owner = owner;
    pt.sort = std::move(sort);
    PortId id = pt.id;
    ports.emplace(id, std::move(pt));
    (direction == Direction::input ? proc.inputs : proc.outputs).push_back(id);
    return id;
}

void Model::erase_port(PortId id)
{
    auto it = ports.find(id);
    if (it == ports.end())
        return;
    auto owner = processes.find(it->second.owner);
    if (owner != processes.end()) {
        std::erase(owner->second.inputs, id);
        std::erase(owner->second.outputs, id);
    }
    ports.erase(it);
}

std::string Model::process_name(ProcessId id) const
{
    auto it = processes.find(id);
    return it == processes.end() ? "#" + std::to_string(id.value) : it->second.name;
}

std::string Model::port_label(PortId id) const
{
    auto it = ports.find(id);
    if (it == ports.end())
        return "#" + std::to_string(id.value);
    return it->second.name + "^{" + process_name(it->second.owner) + "}";
}

std::string Model::port_path(PortId id) const
{
    auto it = ports.find(id);
    if (it == ports.end())
        return "#" + std::to_string(id.value);
    return process_name(it->second.owner) + "." + it->second.name;
}

std::vector<PortId> Model::ports_of(ProcessId id) const
{
    const Process& p = process(id);
    std::vector<PortId> out = p.inputs;
    out.insert(out.end(), p.outputs.begin(), p.outputs.end());
    return out;
}

Model make_model(std::string root_name)
{
    Model m;
    m.root = ProcessId{1};
    Process p;
    p.id = m.root;
    p.name = std::move(root_name);
    m.processes.emplace(m.root, std::move(p));
    return m;
}

}  // namespace bpn
