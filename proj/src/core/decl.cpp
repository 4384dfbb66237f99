#include "core/decl.hpp"

#include <algorithm>
#include <set>

namespace bpn {

Sort resolve_sort(const SortExpr& expr, const SortTable& table)
{
    switch (expr.kind) {
    case SortExpr::Kind::ref: {
        auto it = table.find(expr.name);
        if (it == table.end())
            throw ParseError(ErrorCode::UnknownSortName, expr.span, "unknown sort '" + expr.name + "'");
        return it->second;
    }
    case SortExpr::Kind::record: {
        std::vector<SortField> fields;
        std::set<std::string> seen;
        for (const auto& f : expr.fields) {
            if (!seen.insert(f.name).second)
                throw ParseError(ErrorCode::DuplicateDefinition, f.sort.span,
                                 "record field '" + f.name + "' declared twice");
            fields.push_back(SortField{f.name, resolve_sort(f.sort, table)});
        }
        if (fields.empty())
            throw ParseError(ErrorCode::ParseError, expr.span, "record sort needs at least one field");
        return Sort::record(std::move(fields));
    }
    case SortExpr::Kind::sequence:
        return Sort::sequence(resolve_sort(expr.element.front(), table));
    case SortExpr::Kind::set:
        return Sort::set(resolve_sort(expr.element.front(), table));
    }
    throw Error(ErrorCode::ParseError, "bad sort expression");
}

SortExpr to_expr(const Sort& sort)
{
    SortExpr e;
    switch (sort.kind) {
    case Sort::Kind::atomic:
        e.kind = SortExpr::Kind::ref;
        e.name = sort.name;
        break;
    case Sort::Kind::record:
        e.kind = SortExpr::Kind::record;
        for (const auto& f : sort.fields)
            e.fields.push_back(SortExprField{f.name, to_expr(f.sort)});
        break;
    case Sort::Kind::sequence:
    case Sort::Kind::set:
        e.kind = sort.kind == Sort::Kind::sequence ? SortExpr::Kind::sequence : SortExpr::Kind::set;
        e.element.push_back(to_expr(sort.element.front()));
        break;
    }
    return e;
}

std::string format_sort_expr(const SortExpr& expr)
{
    switch (expr.kind) {
    case SortExpr::Kind::ref:
        return expr.name;
    case SortExpr::Kind::record: {
        std::string out = "record { ";
        for (std::size_t i = 0; i < expr.fields.size(); ++i) {
            if (i)
                out += ", ";
            out += expr.fields[i].name + ": " + format_sort_expr(expr.fields[i].sort);
        }
        return out + " }";
    }
    case SortExpr::Kind::sequence:
        return "seq " + format_sort_expr(expr.element.front());
    case SortExpr::Kind::set:
        return "set " + format_sort_expr(expr.element.front());
    }
    return {};
}

namespace {

PortId resolve_port_ref(const Model& model, const PortRef& ref)
{
    auto owner = model.find_process(ref.process);
    if (!owner)
        throw ParseError(ErrorCode::UnknownProcess, ref.span, "unknown process '" + ref.process + "'");
    auto port = model.find_port(*owner, ref.port);
    if (!port)
        throw ParseError(ErrorCode::UnknownPort, ref.span,
                         "process '" + ref.process + "' has no port '" + ref.port + "'");
    return *port;
}

}  // namespace

FiringRule resolve_rule(const Model& model, ProcessId owner, const RuleDecl& decl)
{
    FiringRule rule;
    rule.compute = decl.compute;
    auto lookup = [&](const LabelRef& ref, Direction dir) {
        auto port = model.find_port(owner, ref.port);
        if (!port)
            throw ParseError(ErrorCode::UnknownPort, decl.span,
                             "process '" + decl.process + "' has no port '" + ref.port + "'");
        if (model.port(*port).direction != dir)
            throw ParseError(ErrorCode::InvalidRule, decl.span,
                             "rule port '" + ref.port + "' must be an " + std::string(to_string(dir)));
        return PortLabel{*port, ref.label};
    };
    for (const auto& n : decl.needs)
        rule.needs.push_back(lookup(n, Direction::input));
    for (const auto& p : decl.produces)
        rule.produces.push_back(lookup(p, Direction::output));
    return rule;
}

ProcessId declare_process(Model& model, const ProcessDecl& decl)
{
    if (model.find_process(decl.name))
        throw ParseError(ErrorCode::DuplicateDefinition, decl.span,
                         "process '" + decl.name + "' is already defined");
    ProcessId id = model.add_process(decl.name);
    model.process(id).behavior_note = decl.note;
    for (const auto& pd : decl.ports) {
        if (model.find_port(id, pd.name))
            throw ParseError(ErrorCode::DuplicateDefinition, pd.span,
                             "port '" + pd.name + "' is already defined on '" + decl.name + "'");
        std::optional<Sort> sort;
        if (pd.sort)
            sort = resolve_sort(*pd.sort, model.sorts);
        model.add_port(id, pd.name, pd.direction, std::move(sort));
    }
    return id;
}

void declare_net(Model& model, const NetDecl& decl)
{
    auto owner = model.find_process(decl.owner);
    if (!owner)
        throw ParseError(ErrorCode::UnknownProcess, decl.span, "unknown process '" + decl.owner + "'");
    if (model.has_net(*owner))
        throw ParseError(ErrorCode::DuplicateDefinition, decl.span,
                         "process '" + decl.owner + "' already has a net");

    Subnet sub;
    for (const auto& name : decl.members) {
        auto p = model.find_process(name);
        if (!p)
            throw ParseError(ErrorCode::UnknownProcess, decl.span, "unknown net member '" + name + "'");
        sub.net.processes.insert(*p);
    }
    for (const auto& pd : decl.processes)
        sub.net.processes.insert(model.require_process(pd.name));
    for (const auto& c : decl.channels)
        sub.net.channels.insert(Channel{resolve_port_ref(model, c.source), resolve_port_ref(model, c.dest)});
    for (const auto& b : decl.bindings) {
        PortId inner = resolve_port_ref(model, b.inner);
        (b.direction == Direction::input ? sub.net.env_inputs : sub.net.env_outputs).insert(inner);
        if (b.parent_port.empty())
            continue;
        auto outer = model.find_port(*owner, b.parent_port);
        if (!outer)
            throw ParseError(ErrorCode::UnknownPort, b.span,
                             "process '" + decl.owner + "' has no port '" + b.parent_port + "'");
        if (!sub.binding.mapping.emplace(*outer, inner).second)
            throw ParseError(ErrorCode::DuplicateDefinition, b.span,
                             "port '" + b.parent_port + "' is bound twice");
    }
    model.nets.emplace(*owner, std::move(sub));
    for (const auto& r : decl.rules) {
        ProcessId p = model.find_process(r.process).value_or(ProcessId{0});
        if (!model.processes.count(p))
            throw ParseError(ErrorCode::UnknownProcess, r.span, "unknown process '" + r.process + "'");
        model.process(p).firing_rules.push_back(resolve_rule(model, p, r));
    }
}

}  // namespace bpn
