#include "sim/sim.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "refine/rules.hpp"

namespace bpn::sim {

Model flatten(const Model& model)
{
    Model m = model;
    if (!m.has_net(m.root))
        return m;
    while (true) {
        std::optional<ProcessId> next;
        for (ProcessId p : m.subnet(m.root).net.processes)
            if (m.has_net(p)) {
                next = p;
                break;
            }
        if (!next)
            return m;
        m = refine::unfold(m, m.root, *next).model;
    }
}

std::vector<std::string> valid_labels(const Port& port)
{
    std::vector<std::string> labels{std::string(whole_label)};
    if (port.sort && port.sort->is_record())
        for (const auto& f : port.sort->fields)
            labels.push_back(f.name);
    return labels;
}

namespace {

bool label_ok(const Port& port, const std::string& label)
{
    auto labels = valid_labels(port);
    return std::find(labels.begin(), labels.end(), label) != labels.end();
}

// Per port, either one "whole" or distinct non-whole labels.
template <typename Fail>
void check_exclusive(std::map<PortId, std::set<std::string>>& seen, PortId port, const std::string& label, Fail fail)
{
    auto& labels = seen[port];
    bool clash = labels.count(label) || (label == whole_label && !labels.empty()) || labels.count(std::string(whole_label));
    if (clash)
        fail();
    labels.insert(label);
}

std::string compute(const std::string& fn, const std::vector<std::string>& consumed)
{
    std::string out;
    if (fn == "concat") {
        for (std::size_t i = 0; i < consumed.size(); ++i)
            out += (i ? "+" : "") + consumed[i];
        return out;
    }
    std::set<std::string> tokens;
    for (const auto& c : consumed) {
        std::istringstream in(c);
        std::string t;
        while (std::getline(in, t, '+'))
            if (!t.empty())
                tokens.insert(t);
    }
    for (const auto& t : tokens)
        out += (out.empty() ? "" : "+") + t;
    return out;
}

struct RuleRef {
    ProcessId process;
    std::size_t index;
};

}  // namespace

SimResult simulate_greedy(const Model& model, const std::vector<Fragment>& env, std::mt19937_64* rng)
{
    const Model flat = flatten(model);
    const Process& root = flat.process(flat.root);
    const bool has_net = flat.has_net(flat.root);

    std::vector<ProcessId> leaves;
    std::map<PortId, PortId> entry;                 // root input -> leaf input
    std::map<PortId, std::vector<PortId>> exit_of;  // leaf output -> root outputs
    std::map<PortId, std::vector<PortId>> fanout;
    if (has_net) {
        const Subnet& sub = flat.subnet(flat.root);
        leaves.assign(sub.net.processes.begin(), sub.net.processes.end());
        for (const auto& [outer, inner] : sub.binding.mapping) {
            if (flat.port(outer).direction == Direction::input)
                entry[outer] = inner;
            else
                exit_of[inner].push_back(outer);
        }
        for (const Channel& c : sub.net.channels)
            fanout[c.source].push_back(c.dest);
    } else {
        leaves.push_back(flat.root);
        for (PortId p : root.inputs)
            entry[p] = p;
        for (PortId p : root.outputs)
            exit_of[p].push_back(p);
    }
    std::sort(leaves.begin(), leaves.end(),
              [&](ProcessId a, ProcessId b) { return flat.process_name(a) < flat.process_name(b); });

    std::vector<RuleRef> rules;
    for (ProcessId p : leaves) {
        const Process& proc = flat.process(p);
        std::map<PortId, std::set<std::string>> produced;
        for (std::size_t i = 0; i < proc.firing_rules.size(); ++i) {
            const FiringRule& r = proc.firing_rules[i];
            if (r.compute != "tag" && r.compute != "concat")
                throw Error(ErrorCode::InvalidRule, "process '" + proc.name + "' uses unknown compute '" + r.compute + "'");
            for (const auto* side : {&r.needs, &r.produces})
                for (const PortLabel& l : *side)
                    if (!label_ok(flat.port(l.port), l.label))
                        throw Error(ErrorCode::InvalidRule, "label '" + l.label + "' is not valid on '" +
                                                                flat.port_path(l.port) + "'");
            for (const PortLabel& l : r.produces)
                check_exclusive(produced, l.port, l.label, [&] {
                    throw Error(ErrorCode::NonDeterministicRules, "fragment '" + l.label + "' of '" +
                                                                      flat.port_path(l.port) +
                                                                      "' is produced by more than one rule");
                });
            rules.push_back(RuleRef{p, i});
        }
    }

    std::map<PortLabel, std::string> present;
    std::map<PortId, std::set<std::string>> env_seen;
    for (const Fragment& f : env) {
        auto it = model.ports.find(f.port);
        if (it == model.ports.end() || it->second.owner != model.root || it->second.direction != Direction::input)
            throw Error(ErrorCode::InvalidEnvFragment, "environment fragments must target root input ports");
        if (!label_ok(it->second, f.label))
            throw Error(ErrorCode::InvalidEnvFragment,
                        "label '" + f.label + "' is not valid on '" + it->second.name + "'");
        check_exclusive(env_seen, f.port, f.label, [&] {
            throw Error(ErrorCode::InvalidEnvFragment,
                        "fragment '" + f.label + "' of '" + it->second.name + "' is given twice or overlaps 'whole'");
        });
        auto e = entry.find(f.port);
        if (e != entry.end())
            present[PortLabel{e->second, f.label}] = f.payload;
    }

    SimResult result;
    std::vector<bool> fired(rules.size(), false);
    while (true) {
        std::vector<std::size_t> ready;
        for (std::size_t i = 0; i < rules.size(); ++i) {
            if (fired[i])
                continue;
            const FiringRule& r = flat.process(rules[i].process).firing_rules[rules[i].index];
            if (std::all_of(r.needs.begin(), r.needs.end(), [&](const PortLabel& l) { return present.count(l); }))
                ready.push_back(i);
        }
        if (ready.empty())
            break;
        std::size_t pick = ready.front();
        if (rng)
            pick = ready[std::uniform_int_distribution<std::size_t>(0, ready.size() - 1)(*rng)];
        fired[pick] = true;
        const RuleRef& ref = rules[pick];
        const FiringRule& r = flat.process(ref.process).firing_rules[ref.index];
        std::vector<std::string> consumed;
        for (const PortLabel& l : r.needs)
            consumed.push_back(present.at(l));
        std::string payload = compute(r.compute, consumed);
        result.trace.push_back(Firing{flat.process_name(ref.process), ref.index});
        for (const PortLabel& l : r.produces) {
            if (auto f = fanout.find(l.port); f != fanout.end())
                for (PortId dest : f->second)
                    present.emplace(PortLabel{dest, l.label}, payload);
            if (auto x = exit_of.find(l.port); x != exit_of.end())
                for (PortId out : x->second)
                    result.outputs.push_back(Fragment{out, l.label, payload});
        }
    }
    std::sort(result.outputs.begin(), result.outputs.end(), [&](const Fragment& a, const Fragment& b) {
        return std::tuple(model.port(a.port).name, a.label, a.payload) <
               std::tuple(model.port(b.port).name, b.label, b.payload);
    });
    return result;
}

bool check_confluence(const Model& model, const std::vector<Fragment>& env, std::size_t trials, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const auto reference = simulate_greedy(model, env).outputs;
    for (std::size_t i = 0; i < trials; ++i)
        if (simulate_greedy(model, env, &rng).outputs != reference)
            return false;
    return true;
}

std::vector<Fragment> resolve_fragments(const Model& model, const std::vector<textio::FragmentLine>& lines)
{
    std::vector<Fragment> out;
    for (const auto& l : lines) {
        auto port = model.find_port(model.root, l.port);
        if (!port)
            throw Error(ErrorCode::InvalidEnvFragment,
                        "root process '" + model.process_name(model.root) + "' has no port '" + l.port + "'");
        if (!label_ok(model.port(*port), l.label))
            throw Error(ErrorCode::InvalidEnvFragment, "label '" + l.label + "' is not valid on '" + l.port + "'");
        out.push_back(Fragment{*port, l.label, l.payload});
    }
    return out;
}

std::vector<textio::FragmentLine> describe_fragments(const Model& model, const std::vector<Fragment>& fragments)
{
    std::vector<textio::FragmentLine> out;
    for (const auto& f : fragments)
        out.push_back(textio::FragmentLine{model.port(f.port).name, f.label, f.payload});
    return out;
}

}  // namespace bpn::sim
