#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "textio/parser.hpp"
#include "textio/textio.hpp"

namespace bpn::textio {

namespace {

struct SortDecl {
    std::string name;
    std::optional<SortExpr> expr;
    SourceSpan span;
};

struct ModelDecls {
    std::vector<SortDecl> sorts;
    std::optional<Token> root;
    std::vector<ProcessDecl> processes;
    std::vector<NetDecl> nets;
    std::vector<RuleDecl> rules;
};

ModelDecls parse_decls(Parser& p)
{
    ModelDecls d;
    p.skip_separators();
    while (!p.at_end()) {
        Token kw = p.peek();
        if (p.accept_keyword("sort")) {
            SortDecl s;
            s.span = p.peek().span;
            s.name = p.expect_ident("sort name");
            if (p.accept_punct("="))
                s.expr = p.sort_expr();
            d.sorts.push_back(std::move(s));
        } else if (p.accept_keyword("root")) {
            if (d.root)
                p.fail(ErrorCode::DuplicateDefinition, kw, "root declared twice");
            d.root = p.peek();
            p.expect_ident("process name");
        } else if (p.accept_keyword("process")) {
            d.processes.push_back(p.process_decl());
        } else if (p.accept_keyword("net")) {
            p.expect_keyword("for");
            NetDecl n;
            n.span = p.peek().span;
            n.owner = p.expect_ident("process name");
            p.net_body(n);
            d.nets.push_back(std::move(n));
        } else if (p.accept_keyword("rule")) {
            d.rules.push_back(p.rule_decl());
        } else {
            p.fail("expected 'sort', 'root', 'process', 'net' or 'rule', found '" + kw.text + "'");
        }
        p.end_statement();
        if (p.at_punct("}"))
            p.fail("unbalanced '}'");
    }
    return d;
}

// Sort declarations may refer to each other in any order.
SortTable resolve_sorts(const std::vector<SortDecl>& decls)
{
    std::map<std::string, const SortDecl*, std::less<>> by_name;
    for (const auto& s : decls)
        if (!by_name.emplace(s.name, &s).second)
            throw ParseError(ErrorCode::DuplicateDefinition, s.span, "sort '" + s.name + "' is already defined");

    SortTable table;
    std::set<std::string, std::less<>> visiting;
    std::function<void(const SortDecl&)> define;
    std::function<void(const SortExpr&)> require = [&](const SortExpr& e) {
        if (e.kind == SortExpr::Kind::ref) {
            if (table.count(e.name))
                return;
            auto it = by_name.find(e.name);
            if (it == by_name.end())
                throw ParseError(ErrorCode::UnknownSortName, e.span, "unknown sort '" + e.name + "'");
            if (visiting.count(e.name))
                throw ParseError(ErrorCode::ParseError, e.span, "sort '" + e.name + "' is defined in terms of itself");
            define(*it->second);
        }
        for (const auto& f : e.fields)
            require(f.sort);
        for (const auto& el : e.element)
            require(el);
    };
    define = [&](const SortDecl& s) {
        if (!s.expr) {
            table.emplace(s.name, Sort::atomic(s.name));
            return;
        }
        visiting.insert(s.name);
        require(*s.expr);
        visiting.erase(s.name);
        table.emplace(s.name, resolve_sort(*s.expr, table));
    };
    for (const auto& s : decls)
        if (!table.count(s.name))
            define(s);
    return table;
}

}  // namespace

Model parse_model(std::string_view text, const std::string& file)
{
    Parser p(text, file);
    ModelDecls d = parse_decls(p);
    if (d.processes.empty())
        throw ParseError(ErrorCode::ParseError, p.peek().span, "a model must declare a root process");

    Model m;
    m.sorts = resolve_sorts(d.sorts);
    for (const auto& pd : d.processes)
        declare_process(m, pd);
    for (const auto& n : d.nets)
        for (const auto& pd : n.processes)
            declare_process(m, pd);
    if (d.root) {
        auto r = m.find_process(d.root->text);
        if (!r)
            throw ParseError(ErrorCode::UnknownProcess, d.root->span, "unknown root process '" + d.root->text + "'");
        m.root = *r;
    } else {
        m.root = m.require_process(d.processes.front().name);
    }
    for (const auto& n : d.nets)
        declare_net(m, n);
    for (const auto& r : d.rules) {
        auto owner = m.find_process(r.process);
        if (!owner)
            throw ParseError(ErrorCode::UnknownProcess, r.span, "unknown process '" + r.process + "'");
        m.process(*owner).firing_rules.push_back(resolve_rule(m, *owner, r));
    }
    return m;
}

namespace {

std::string sort_suffix(const Model& m, const std::optional<Sort>& s)
{
    return s ? " : " + render_sort(*s, m.sorts) : "";
}

std::string label_list(const Model& m, const std::vector<PortLabel>& labels)
{
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i)
            out += ", ";
        out += m.port(labels[i].port).name;
        if (labels[i].label != whole_label)
            out += "." + labels[i].label;
    }
    return out;
}

std::vector<ProcessId> by_name(const Model& m, std::vector<ProcessId> ids)
{
    std::sort(ids.begin(), ids.end(),
              [&](ProcessId a, ProcessId b) { return m.process_name(a) < m.process_name(b); });
    return ids;
}

}  // namespace

std::string print_model(const Model& m)
{
    std::ostringstream os;
    for (const auto& [name, sort] : m.sorts) {
        if (sort.kind == Sort::Kind::atomic && sort.name == name)
            os << "sort " << name << "\n";
        else
            os << "sort " << name << " = " << render_sort(sort, m.sorts, false) << "\n";
    }
    if (!m.sorts.empty())
        os << "\n";
    os << "root " << m.process_name(m.root) << "\n";

    std::vector<ProcessId> all;
    for (const auto& [id, p] : m.processes)
        all.push_back(id);
    all = by_name(m, all);

    for (ProcessId id : all) {
        const Process& p = m.process(id);
        os << "\nprocess " << p.name << " {";
        std::vector<std::string> lines;
        for (auto [dir, list] : {std::pair{"in", &p.inputs}, std::pair{"out", &p.outputs}}) {
            std::vector<std::string> group;
            for (PortId port : *list) {
                const Port& pt = m.port(port);
                group.push_back(std::string(dir) + " " + pt.name + sort_suffix(m, pt.sort));
            }
            std::sort(group.begin(), group.end());
            lines.insert(lines.end(), group.begin(), group.end());
        }
        if (!p.behavior_note.empty())
            lines.push_back("note " + quote(p.behavior_note));
        if (lines.empty()) {
            os << "}\n";
            continue;
        }
        os << "\n";
        for (const auto& l : lines)
            os << "  " << l << "\n";
        os << "}\n";
    }

    for (ProcessId owner : all) {
        auto it = m.nets.find(owner);
        if (it == m.nets.end())
            continue;
        const Subnet& sub = it->second;
        os << "\nnet for " << m.process_name(owner) << " {";
        std::vector<std::string> lines;
        std::vector<ProcessId> members = by_name(m, {sub.net.processes.begin(), sub.net.processes.end()});
        if (!members.empty()) {
            std::string l = "members ";
            for (std::size_t i = 0; i < members.size(); ++i)
                l += (i ? ", " : "") + m.process_name(members[i]);
            lines.push_back(l);
        }
        std::vector<std::string> channels;
        for (const Channel& c : sub.net.channels)
            channels.push_back("channel " + m.port_path(c.source) + " -> " + m.port_path(c.dest));
        std::sort(channels.begin(), channels.end());
        lines.insert(lines.end(), channels.begin(), channels.end());

        std::vector<std::string> bindings;
        for (auto [kw, side] : {std::pair{"input", &sub.net.env_inputs}, std::pair{"output", &sub.net.env_outputs}}) {
            for (PortId inner : *side) {
                std::string base = std::string(kw) + " " + m.port_path(inner);
                bool bound = false;
                for (const auto& [outer, in] : sub.binding.mapping)
                    if (in == inner) {
                        bindings.push_back(base + " binds " + m.port(outer).name);
                        bound = true;
                    }
                if (!bound)
                    bindings.push_back(base);
            }
        }
        std::sort(bindings.begin(), bindings.end());
        lines.insert(lines.end(), bindings.begin(), bindings.end());
        if (lines.empty()) {
            os << "}\n";
            continue;
        }
        os << "\n";
        for (const auto& l : lines)
            os << "  " << l << "\n";
        os << "}\n";
    }

    bool first_rule = true;
    for (ProcessId id : all) {
        for (const FiringRule& r : m.process(id).firing_rules) {
            if (first_rule)
                os << "\n";
            first_rule = false;
            os << "rule " << m.process_name(id) << " : needs {" << label_list(m, r.needs) << "} produces {"
               << label_list(m, r.produces) << "}";
            if (r.compute != "tag")
                os << " using " << r.compute;
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace bpn::textio
