#include <algorithm>
#include <functional>
#include <set>

#include "check/check.hpp"

namespace bpn::check {

namespace {

template <typename Id>
std::set<Id> image(const std::map<Id, Id>& map, const std::set<Id>& s)
{
    std::set<Id> out;
    for (const Id& x : s) {
        auto it = map.find(x);
        if (it == map.end())
            return {};
        out.insert(it->second);
    }
    return out;
}

template <typename Id>
std::set<Id> as_set(const std::vector<Id>& v)
{
    return {v.begin(), v.end()};
}

bool bijective(const auto& map, const auto& domain, const auto& codomain)
{
    if (map.size() != domain.size() || domain.size() != codomain.size())
        return false;
    std::set<typename std::decay_t<decltype(map)>::mapped_type> seen;
    for (const auto& [k, v] : map) {
        if (!domain.count(k) || !codomain.count(v) || !seen.insert(v).second)
            return false;
    }
    return true;
}

bool same_shape(const Process& a, const Process& b, const Model& ma, const Model& mb)
{
    return a.name == b.name && a.inputs.size() == b.inputs.size() && a.outputs.size() == b.outputs.size() &&
           a.behavior_note == b.behavior_note && a.firing_rules.size() == b.firing_rules.size() &&
           ma.has_net(a.id) == mb.has_net(b.id);
}

}  // namespace

bool verify_isomorphism(const Model& a, const Model& b, const Isomorphism& iso)
{
    const auto& pm = iso.process_map;
    const auto& qm = iso.port_map;
    if (a.sorts != b.sorts || !bijective(pm, a.processes, b.processes) || !bijective(qm, a.ports, b.ports))
        return false;
    if (!pm.count(a.root) || pm.at(a.root) != b.root)
        return false;

    auto map_port = [&](PortId p) { return qm.at(p); };
    auto map_ports = [&](const std::vector<PortId>& v) {
        std::set<PortId> out;
        for (PortId p : v)
            out.insert(map_port(p));
        return out;
    };
    for (const auto& [id, pa] : a.processes) {
        const Process& pb = b.process(pm.at(id));
        if (!same_shape(pa, pb, a, b) || map_ports(pa.inputs) != as_set(pb.inputs) ||
            map_ports(pa.outputs) != as_set(pb.outputs))
            return false;
        for (std::size_t i = 0; i < pa.firing_rules.size(); ++i) {
            FiringRule r = pa.firing_rules[i];
            for (auto* side : {&r.needs, &r.produces})
                for (auto& l : *side)
                    l.port = map_port(l.port);
            if (!(r == pb.firing_rules[i]))
                return false;
        }
    }
    for (const auto& [id, pa] : a.ports) {
        const Port& pb = b.port(qm.at(id));
        if (pa.name != pb.name || pa.direction != pb.direction || pa.sort != pb.sort || pm.at(pa.owner) != pb.owner)
            return false;
    }
    if (a.nets.size() != b.nets.size())
        return false;
    for (const auto& [owner, sa] : a.nets) {
        auto it = b.nets.find(pm.at(owner));
        if (it == b.nets.end())
            return false;
        const Subnet& sb = it->second;
        if (image(pm, sa.net.processes) != sb.net.processes || image(qm, sa.net.env_inputs) != sb.net.env_inputs ||
            image(qm, sa.net.env_outputs) != sb.net.env_outputs)
            return false;
        std::set<Channel> channels;
        for (const Channel& c : sa.net.channels)
            channels.insert(Channel{map_port(c.source), map_port(c.dest)});
        if (channels != sb.net.channels)
            return false;
        std::map<PortId, PortId> binding;
        for (const auto& [outer, inner] : sa.binding.mapping)
            binding[map_port(outer)] = map_port(inner);
        if (binding != sb.binding.mapping)
            return false;
    }
    return true;
}

std::optional<Isomorphism> model_isomorphic(const Model& a, const Model& b)
{
    if (a.processes.size() != b.processes.size() || a.ports.size() != b.ports.size() ||
        a.nets.size() != b.nets.size() || a.sorts != b.sorts)
        return std::nullopt;

    std::vector<ProcessId> order;
    for (const auto& [id, p] : a.processes)
        order.push_back(id);
    std::sort(order.begin(), order.end(),
              [&](ProcessId x, ProcessId y) { return a.process_name(x) < a.process_name(y); });
    std::vector<PortId> port_order;
    for (ProcessId p : order)
        for (PortId q : a.ports_of(p))
            port_order.push_back(q);

    Isomorphism iso;
    std::set<ProcessId> used_processes;
    std::set<PortId> used_ports;

    std::function<bool(std::size_t)> match_ports = [&](std::size_t i) {
        if (i == port_order.size())
            return verify_isomorphism(a, b, iso);
        const Port& pa = a.port(port_order[i]);
        for (PortId cand : b.ports_of(iso.process_map.at(pa.owner))) {
            const Port& pb = b.port(cand);
            if (used_ports.count(cand) || pb.name != pa.name || pb.direction != pa.direction || pb.sort != pa.sort)
                continue;
            used_ports.insert(cand);
            iso.port_map[pa.id] = cand;
            if (match_ports(i + 1))
                return true;
            iso.port_map.erase(pa.id);
            used_ports.erase(cand);
        }
        return false;
    };

    std::function<bool(std::size_t)> match_processes = [&](std::size_t i) {
        if (i == order.size())
            return match_ports(0);
        const Process& pa = a.process(order[i]);
        for (const auto& [cand, pb] : b.processes) {
            if (used_processes.count(cand) || !same_shape(pa, pb, a, b) || ((pa.id == a.root) != (cand == b.root)))
                continue;
            used_processes.insert(cand);
            iso.process_map[pa.id] = cand;
            if (match_processes(i + 1))
                return true;
            iso.process_map.erase(pa.id);
            used_processes.erase(cand);
        }
        return false;
    };

    if (match_processes(0))
        return iso;
    return std::nullopt;
}

}  // namespace bpn::check
