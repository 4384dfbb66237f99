#include "refine/apply.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace bpn::refine {

std::string_view rule_name(const Step& step)
{
    static constexpr std::string_view names[] = {"decompose", "add-channel", "assign-sort",
                                                 "split-port", "unfold", "fold"};
    return names[step.index()];
}

StepError::StepError(std::size_t index, ErrorCode cause, const std::string& cause_message)
    : Error(ErrorCode::StepFailed,
            "step " + std::to_string(index) + " failed: " + std::string(to_string(cause)) + ": " + cause_message),
      index_(index), cause_(cause), cause_message_(cause_message)
{
}

namespace {

ProcessId lookup_process(const Model& m, const std::string& name) { return m.require_process(name); }

PortId lookup_port(const Model& m, const PortRef& ref) { return m.require_port(ref.process, ref.port); }

EndpointSpec resolve_endpoint(const Model& m, const EndpointDecl& decl)
{
    EndpointSpec spec;
    spec.process = lookup_process(m, decl.port.process);
    if (decl.fresh) {
        spec.fresh_name = decl.port.port;
        if (decl.sort)
            spec.sort = resolve_sort(*decl.sort, m.sorts);
    } else {
        spec.existing = lookup_port(m, decl.port);
    }
    for (const auto& v : decl.via)
        spec.via.push_back(lookup_process(m, v));
    return spec;
}

struct StepRunner {
    const Model& m;

    RuleResult operator()(const DecomposeStep& s) const { return decompose_process(m, s.net); }

    RuleResult operator()(const AddChannelStep& s) const
    {
        return add_channel(m, resolve_endpoint(m, s.source), resolve_endpoint(m, s.dest));
    }

    RuleResult operator()(const AssignSortStep& s) const
    {
        return assign_sort(m, lookup_port(m, s.port), resolve_sort(s.sort, m.sorts));
    }

    RuleResult operator()(const SplitPortStep& s) const
    {
        std::vector<PartSpec> parts;
        for (const auto& p : s.parts) {
            PartSpec spec{p.name, std::nullopt};
            if (p.sort)
                spec.sort = resolve_sort(*p.sort, m.sorts);
            parts.push_back(std::move(spec));
        }
        return split_port(m, lookup_port(m, s.port), parts);
    }

    RuleResult operator()(const UnfoldStep& s) const
    {
        ProcessId child = lookup_process(m, s.child);
        ProcessId parent;
        if (!s.parent.empty()) {
            parent = lookup_process(m, s.parent);
        } else if (auto c = m.container_of(child)) {
            parent = *c;
        } else {
            throw Error(ErrorCode::NoSuchChild, "'" + s.child + "' is not a member of any net");
        }
        return unfold(m, parent, child);
    }

    RuleResult operator()(const FoldStep& s) const
    {
        std::set<ProcessId> group;
        for (const auto& g : s.group)
            group.insert(lookup_process(m, g));
        std::map<PortId, std::string> names;
        for (const auto& [ref, name] : s.port_names)
            names[lookup_port(m, ref)] = name;
        return fold(m, lookup_process(m, s.owner), group, s.new_name, names);
    }
};

template <typename Key>
void compose(std::map<Key, std::set<Key>>& acc, const std::map<Key, std::set<Key>>& delta,
             const std::function<bool(const Key&)>& original)
{
    for (auto& [key, images] : acc) {
        std::set<Key> next;
        for (const Key& x : images) {
            auto it = delta.find(x);
            if (it == delta.end())
                next.insert(x);
            else
                next.insert(it->second.begin(), it->second.end());
        }
        images = std::move(next);
    }
    for (const auto& [x, ys] : delta)
        if (original(x) && !acc.count(x))
            acc[x] = ys;
}

std::string ref_text(const PortRef& r) { return r.process + "." + r.port; }

std::string endpoint_text(const EndpointDecl& e)
{
    std::string out = e.fresh ? "new " : "";
    out += ref_text(e.port);
    if (e.sort)
        out += " : " + format_sort_expr(*e.sort);
    if (!e.via.empty()) {
        out += " via ";
        for (std::size_t i = 0; i < e.via.size(); ++i)
            out += (i ? "/" : "") + e.via[i];
    }
    return out;
}

std::string join(const std::vector<std::string>& items, const std::string& sep)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i)
        out += (i ? sep : "") + items[i];
    return out;
}

std::string quote(const std::string& s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\')
            out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

struct StepFormatter {
    std::string operator()(const DecomposeStep& s) const
    {
        std::ostringstream os;
        os << "decompose " << s.net.owner << " {\n";
        for (const auto& pd : s.net.processes) {
            os << "  process " << pd.name << " {";
            bool first = true;
            for (const auto& port : pd.ports) {
                os << (first ? " " : "; ") << (port.direction == Direction::input ? "in " : "out ") << port.name;
                if (port.sort)
                    os << " : " << format_sort_expr(*port.sort);
                first = false;
            }
            if (!pd.note.empty())
                os << (first ? " " : "; ") << "note " << quote(pd.note);
            os << " }\n";
        }
        for (const auto& c : s.net.channels)
            os << "  channel " << ref_text(c.source) << " -> " << ref_text(c.dest) << "\n";
        for (const auto& b : s.net.bindings) {
            os << "  " << (b.direction == Direction::input ? "input " : "output ") << ref_text(b.inner);
            if (!b.parent_port.empty())
                os << " binds " << b.parent_port;
            os << "\n";
        }
        for (const auto& r : s.net.rules) {
            auto labels = [](const std::vector<LabelRef>& refs) {
                std::vector<std::string> items;
                for (const auto& l : refs)
                    items.push_back(l.label == whole_label ? l.port : l.port + "." + l.label);
                return join(items, ", ");
            };
            os << "  rule " << r.process << " : needs {" << labels(r.needs) << "} produces {"
               << labels(r.produces) << "}";
            if (r.compute != "tag")
                os << " using " << r.compute;
            os << "\n";
        }
        os << "}";
        return os.str();
    }

    std::string operator()(const AddChannelStep& s) const
    {
        return "add-channel " + endpoint_text(s.source) + " -> " + endpoint_text(s.dest);
    }

    std::string operator()(const AssignSortStep& s) const
    {
        return "assign-sort " + ref_text(s.port) + " : " + format_sort_expr(s.sort);
    }

    std::string operator()(const SplitPortStep& s) const
    {
        std::vector<std::string> parts;
        for (const auto& p : s.parts)
            parts.push_back(p.sort ? p.name + " : " + format_sort_expr(*p.sort) : p.name);
        return "split-port " + ref_text(s.port) + " -> " + join(parts, ", ");
    }

    std::string operator()(const UnfoldStep& s) const
    {
        return "unfold " + s.child + (s.parent.empty() ? "" : " in " + s.parent);
    }

    std::string operator()(const FoldStep& s) const
    {
        std::string out = "fold {" + join(s.group, ", ") + "} in " + s.owner + " as " + s.new_name;
        if (!s.port_names.empty()) {
            std::vector<std::string> items;
            for (const auto& [ref, name] : s.port_names)
                items.push_back(ref_text(ref) + " as " + name);
            out += " ports {" + join(items, ", ") + "}";
        }
        return out;
    }
};

}  // namespace

RuleResult apply_step(const Model& model, const Step& step) { return std::visit(StepRunner{model}, step); }

std::string format_step(const Step& step) { return std::visit(StepFormatter{}, step); }

std::pair<Model, Trace> apply_script(const Model& model, const RefinementScript& script)
{
    Model current = model;
    Trace trace;
    PortRefinementMap ports;
    ProcessRefinementMap processes;
    std::function<bool(const PortId&)> original_port = [&](const PortId& p) { return model.ports.count(p) != 0; };
    std::function<bool(const ProcessId&)> original_process = [&](const ProcessId& p) {
        return model.processes.count(p) != 0;
    };
    std::function<bool(const PortLabel&)> original_fragment = [&](const PortLabel& f) {
        return model.ports.count(f.port) != 0;
    };

    for (std::size_t i = 0; i < script.steps.size(); ++i) {
        const Step& step = script.steps[i].step;
        RuleResult result;
        try {
            result = apply_step(current, step);
        } catch (const Error& e) {
            throw StepError(i + 1, e.code(), e.what());
        }
        compose(ports, result.ports, original_port);
        compose(processes, result.processes, original_process);
        compose(trace.fragments, result.fragments, original_fragment);
        trace.steps.push_back(TraceStep{std::string(rule_name(step)), format_step(step), ports, processes});
        current = std::move(result.model);
    }
    return {std::move(current), std::move(trace)};
}

std::vector<std::string> format_refinements(const Model& original, const Model& refined, const Trace& trace)
{
    std::vector<std::string> lines;
    if (trace.steps.empty())
        return lines;
    for (const auto& [old, images] : trace.steps.back().ports) {
        std::vector<std::string> names;
        for (PortId p : images)
            names.push_back(refined.port_label(leaf_image(refined, p)));
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        lines.push_back(original.port_label(old) + " ~> {" + join(names, ", ") + "}");
    }
    std::sort(lines.begin(), lines.end());
    return lines;
}

std::set<PortLabel> map_fragment(const Trace& trace, const PortLabel& fragment)
{
    auto it = trace.fragments.find(fragment);
    if (it == trace.fragments.end())
        return {fragment};
    return it->second;
}

}  // namespace bpn::refine
