#include <algorithm>
#include <functional>
#include <sstream>

#include "check/check.hpp"
#include "textio/textio.hpp"

namespace bpn::check {

std::string_view to_string(VerdictStatus s)
{
    switch (s) {
    case VerdictStatus::Refines:
        return "Refines";
    case VerdictStatus::DoesNotMatch:
        return "DoesNotMatch";
    case VerdictStatus::ScriptFails:
        return "ScriptFails";
    }
    return "?";
}

int exit_code(VerdictStatus s)
{
    switch (s) {
    case VerdictStatus::Refines:
        return 0;
    case VerdictStatus::DoesNotMatch:
        return 2;
    case VerdictStatus::ScriptFails:
        return 3;
    }
    return 1;
}

namespace {

std::string first_difference(const Model& expected, const Model& actual)
{
    std::istringstream e(textio::print_model(expected)), a(textio::print_model(actual));
    std::string le, la;
    for (int line = 1;; ++line) {
        bool he = static_cast<bool>(std::getline(e, le));
        bool ha = static_cast<bool>(std::getline(a, la));
        if (!he && !ha)
            return "models differ in structure not visible in their canonical text";
        if (!he || !ha || le != la) {
            std::string out = "line " + std::to_string(line) + ": expected ";
            out += he ? "'" + le + "'" : "end of model";
            out += ", replay has ";
            out += ha ? "'" + la + "'" : "end of model";
            return out;
        }
    }
}

}  // namespace

Verdict check_refinement(const Model& base, const Model& refined, const refine::RefinementScript& script)
{
    Verdict v;
    std::pair<Model, refine::Trace> replay;
    try {
        replay = refine::apply_script(base, script);
    } catch (const refine::StepError& e) {
        v.status = VerdictStatus::ScriptFails;
        v.failed_step = e.index();
        v.detail = e.what();
        return v;
    }
    v.trace = std::move(replay.second);
    if (auto iso = model_isomorphic(replay.first, refined)) {
        v.status = VerdictStatus::Refines;
        v.witness = std::move(iso);
        v.detail = std::to_string(script.steps.size()) + " step(s) replayed";
        return v;
    }
    v.status = VerdictStatus::DoesNotMatch;
    v.detail = first_difference(refined, replay.first);
    return v;
}

namespace {

using namespace refine;

SortExpr expr_for(const Sort& s, const SortTable& table)
{
    if (s.kind != Sort::Kind::atomic)
        if (auto alias = alias_of(s, table)) {
            SortExpr e;
            e.name = *alias;
            return e;
        }
    SortExpr e;
    switch (s.kind) {
    case Sort::Kind::atomic:
        e.name = s.name;
        break;
    case Sort::Kind::record:
        e.kind = SortExpr::Kind::record;
        for (const auto& f : s.fields)
            e.fields.push_back(SortExprField{f.name, expr_for(f.sort, table)});
        break;
    case Sort::Kind::sequence:
    case Sort::Kind::set:
        e.kind = s.kind == Sort::Kind::sequence ? SortExpr::Kind::sequence : SortExpr::Kind::set;
        e.element.push_back(expr_for(s.element.front(), table));
        break;
    }
    return e;
}

std::optional<SortExpr> opt_expr(const std::optional<Sort>& s, const SortTable& table)
{
    if (!s)
        return std::nullopt;
    return expr_for(*s, table);
}

std::vector<ProcessId> sorted_processes(const Model& m, std::vector<ProcessId> ids)
{
    std::sort(ids.begin(), ids.end(),
              [&](ProcessId a, ProcessId b) { return m.process_name(a) < m.process_name(b); });
    return ids;
}

std::vector<ProcessId> all_processes(const Model& m)
{
    std::vector<ProcessId> ids;
    for (const auto& [id, p] : m.processes)
        ids.push_back(id);
    return sorted_processes(m, ids);
}

std::vector<PortId> sorted_ports(const Model& m, std::vector<PortId> ids)
{
    std::sort(ids.begin(), ids.end(), [&](PortId a, PortId b) { return m.port(a).name < m.port(b).name; });
    return ids;
}

PortRef ref_of(const Model& m, PortId p) { return PortRef{m.process_name(m.port(p).owner), m.port(p).name, {}}; }

// Ports of `target`'s namesake of `proc` that `current` lacks.
std::vector<PortId> missing_ports(const Model& current, ProcessId proc, const Model& target, Direction dir)
{
    std::vector<PortId> out;
    auto t = target.find_process(current.process_name(proc));
    if (!t)
        return out;
    for (PortId p : target.ports_of(*t)) {
        const Port& pt = target.port(p);
        if (pt.direction == dir && !current.find_port(proc, pt.name))
            out.push_back(p);
    }
    return out;
}

std::vector<Sort> sort_universe(const Model& target)
{
    std::vector<Sort> out;
    auto add = [&](const Sort& s) {
        if (std::find(out.begin(), out.end(), s) == out.end())
            out.push_back(s);
    };
    for (const auto& [name, s] : target.sorts)
        add(s);
    for (const auto& [id, p] : target.ports)
        if (p.sort)
            add(*p.sort);
    std::sort(out.begin(), out.end(), [](const Sort& a, const Sort& b) { return to_string(a) < to_string(b); });
    return out;
}

void assign_sort_candidates(const Model& cur, const Model& target, std::vector<Step>& out)
{
    auto universe = sort_universe(target);
    for (ProcessId proc : all_processes(cur))
        for (PortId p : sorted_ports(cur, cur.ports_of(proc)))
            for (const Sort& s : universe)
                if (cur.port(p).sort != s)
                    out.push_back(AssignSortStep{ref_of(cur, p), expr_for(s, cur.sorts)});
}

void split_port_candidates(const Model& cur, const Model& target, std::vector<Step>& out)
{
    for (ProcessId proc : all_processes(cur)) {
        auto t = target.find_process(cur.process_name(proc));
        if (!t)
            continue;
        for (PortId p : sorted_ports(cur, cur.ports_of(proc))) {
            const Port& pt = cur.port(p);
            if (target.find_port(*t, pt.name))
                continue;
            auto fresh = missing_ports(cur, proc, target, pt.direction);
            if (fresh.size() < 2 || fresh.size() > 6)
                continue;
            for (unsigned mask = 1; mask < (1u << fresh.size()); ++mask) {
                if (__builtin_popcount(mask) < 2)
                    continue;
                SplitPortStep s{ref_of(cur, p), {}};
                for (std::size_t i = 0; i < fresh.size(); ++i)
                    if (mask & (1u << i))
                        s.parts.push_back(
                            PartDecl{target.port(fresh[i]).name, opt_expr(target.port(fresh[i]).sort, cur.sorts)});
                out.push_back(std::move(s));
            }
        }
    }
}

void add_channel_candidates(const Model& cur, const Model& target, std::vector<Step>& out)
{
    auto endpoints = [&](ProcessId proc, Direction dir, const std::set<PortId>& driven) {
        std::vector<EndpointDecl> eps;
        const Process& p = cur.process(proc);
        for (PortId port : sorted_ports(cur, dir == Direction::input ? p.inputs : p.outputs))
            if (dir == Direction::output || !driven.count(port))
                eps.push_back(EndpointDecl{ref_of(cur, port), false, std::nullopt, {}});
        for (PortId port : missing_ports(cur, proc, target, dir)) {
            EndpointDecl e{PortRef{p.name, target.port(port).name, {}}, true,
                           opt_expr(target.port(port).sort, cur.sorts), {}};
            eps.push_back(e);
            if (cur.has_net(proc))
                for (ProcessId member :
                     sorted_processes(cur, {cur.subnet(proc).net.processes.begin(), cur.subnet(proc).net.processes.end()})) {
                    EndpointDecl via = e;
                    via.via = {cur.process_name(member)};
                    eps.push_back(std::move(via));
                }
        }
        return eps;
    };
    for (ProcessId owner : all_processes(cur)) {
        if (!cur.has_net(owner))
            continue;
        const ProcessNet& net = cur.subnet(owner).net;
        std::set<PortId> driven(net.env_inputs);
        for (const Channel& c : net.channels)
            driven.insert(c.dest);
        auto members = sorted_processes(cur, {net.processes.begin(), net.processes.end()});
        for (ProcessId src : members)
            for (ProcessId dst : members) {
                if (src == dst)
                    continue;
                auto sources = endpoints(src, Direction::output, driven);
                auto dests = endpoints(dst, Direction::input, driven);
                for (const auto& s : sources)
                    for (const auto& d : dests)
                        out.push_back(AddChannelStep{s, d});
            }
    }
}

NetDecl net_decl_from(const Model& target, ProcessId owner, const SortTable& table)
{
    NetDecl decl;
    decl.owner = target.process_name(owner);
    const Subnet& sub = target.subnet(owner);
    for (ProcessId member : sorted_processes(target, {sub.net.processes.begin(), sub.net.processes.end()})) {
        const Process& p = target.process(member);
        ProcessDecl pd;
        pd.name = p.name;
        pd.note = p.behavior_note;
        for (PortId port : target.ports_of(member)) {
            const Port& pt = target.port(port);
            pd.ports.push_back(PortDecl{pt.name, pt.direction, opt_expr(pt.sort, table), {}});
        }
        decl.processes.push_back(std::move(pd));
        for (const FiringRule& r : p.firing_rules) {
            RuleDecl rd;
            rd.process = p.name;
            rd.compute = r.compute;
            for (const auto& l : r.needs)
                rd.needs.push_back(LabelRef{target.port(l.port).name, l.label});
            for (const auto& l : r.produces)
                rd.produces.push_back(LabelRef{target.port(l.port).name, l.label});
            decl.rules.push_back(std::move(rd));
        }
    }
    for (const Channel& c : sub.net.channels)
        decl.channels.push_back(ChannelDecl{ref_of(target, c.source), ref_of(target, c.dest)});
    for (auto [dir, side] : {std::pair{Direction::input, &sub.net.env_inputs},
                             std::pair{Direction::output, &sub.net.env_outputs}})
        for (PortId inner : *side) {
            std::string parent;
            for (const auto& [outer, in] : sub.binding.mapping)
                if (in == inner)
                    parent = target.port(outer).name;
            decl.bindings.push_back(BindingDecl{dir, ref_of(target, inner), parent, {}});
        }
    return decl;
}

void decompose_candidates(const Model& cur, const Model& target, std::vector<Step>& out)
{
    for (ProcessId proc : all_processes(cur)) {
        auto t = target.find_process(cur.process_name(proc));
        if (cur.has_net(proc) || !t || !target.has_net(*t))
            continue;
        out.push_back(DecomposeStep{net_decl_from(target, *t, cur.sorts)});
    }
}

void fold_candidates(const Model& cur, const Model& target, std::vector<Step>& out)
{
    for (ProcessId q : all_processes(target)) {
        if (!target.has_net(q) || cur.find_process(target.process_name(q)))
            continue;
        const Subnet& sub = target.subnet(q);
        FoldStep s;
        s.new_name = target.process_name(q);
        std::optional<ProcessId> container;
        bool ok = !sub.net.processes.empty();
        for (ProcessId member : sorted_processes(target, {sub.net.processes.begin(), sub.net.processes.end()})) {
            auto c = cur.find_process(target.process_name(member));
            auto holder = c ? cur.container_of(*c) : std::nullopt;
            if (!holder || (container && *container != *holder)) {
                ok = false;
                break;
            }
            container = holder;
            s.group.push_back(target.process_name(member));
        }
        if (!ok)
            continue;
        s.owner = cur.process_name(*container);
        for (const auto& [outer, inner] : sub.binding.mapping)
            s.port_names.emplace_back(ref_of(target, inner), target.port(outer).name);
        out.push_back(std::move(s));
    }
}

void unfold_candidates(const Model& cur, const Model& target, std::vector<Step>& out)
{
    for (ProcessId proc : all_processes(cur)) {
        auto holder = cur.container_of(proc);
        if (!cur.has_net(proc) || !holder || target.find_process(cur.process_name(proc)))
            continue;
        out.push_back(UnfoldStep{cur.process_name(proc), cur.process_name(*holder)});
    }
}

}  // namespace

std::vector<Step> candidate_steps(const Model& current, const Model& target)
{
    std::vector<Step> out;
    assign_sort_candidates(current, target, out);
    split_port_candidates(current, target, out);
    add_channel_candidates(current, target, out);
    decompose_candidates(current, target, out);
    fold_candidates(current, target, out);
    unfold_candidates(current, target, out);
    return out;
}

std::optional<RefinementScript> brute_force_derivable(const Model& base, const Model& refined,
                                                      const SearchOptions& options)
{
    std::size_t nodes = 0;
    std::vector<Step> path;
    std::function<bool(const Model&, std::size_t)> search = [&](const Model& m, std::size_t left) {
        if (++nodes > options.node_limit)
            throw Error(ErrorCode::SearchBudgetExceeded,
                        "search exceeded " + std::to_string(options.node_limit) + " nodes");
        if (left == 0)
            return model_isomorphic(m, refined).has_value();
        for (Step& step : candidate_steps(m, refined)) {
            RuleResult r;
            try {
                r = apply_step(m, step);
            } catch (const Error&) {
                continue;
            }
            path.push_back(std::move(step));
            if (search(r.model, left - 1))
                return true;
            path.pop_back();
        }
        return false;
    };
    for (std::size_t depth = 0; depth <= options.max_steps; ++depth) {
        path.clear();
        if (search(base, depth)) {
            RefinementScript script;
            for (auto& s : path)
                script.steps.push_back(ScriptStep{std::move(s), {}});
            return script;
        }
    }
    return std::nullopt;
}

}  // namespace bpn::check
