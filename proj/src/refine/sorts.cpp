#include <algorithm>
#include <set>

#include "refine/rules.hpp"

namespace bpn::refine {

RuleResult assign_sort(const Model& model, PortId port, const Sort& sort)
{
    if (!sort_well_formed(sort))
        throw Error(ErrorCode::SortConflict, "malformed sort " + to_string(sort));
    auto closure = sort_closure(model, port);
    for (PortId p : closure) {
        const auto& current = model.port(p).sort;
        if (current && !(*current == sort))
            throw Error(ErrorCode::SortConflict, "'" + model.port_path(p) + "' already carries " +
                                                     to_string(*current) + ", cannot assign " + to_string(sort));
    }
    RuleResult out{model, {}, {}, {}};
    for (PortId p : closure)
        out.model.port(p).sort = sort;
    require_well_formed(out.model, "assign-sort " + model.port_path(port));
    return out;
}

namespace {

struct PartPlan {
    std::optional<Sort> sort;
    std::vector<std::string> fields;  // record fields carried by the part
    bool bare = false;                // single field carried as its own sort
};

std::vector<PartPlan> plan_parts(const std::optional<Sort>& common, const std::vector<PartSpec>& parts)
{
    std::vector<PartPlan> plans;
    if (!common) {
        for (const auto& part : parts) {
            if (part.sort && !sort_well_formed(*part.sort))
                throw Error(ErrorCode::PartitionMismatch, "malformed sort for part '" + part.name + "'");
            plans.push_back(PartPlan{part.sort, {}, false});
        }
        return plans;
    }
    if (!common->is_record())
        throw Error(ErrorCode::PartitionMismatch,
                    "only record or unspecified sorts can be split, not " + to_string(*common));

    std::set<std::string> covered;
    auto cover = [&](const std::string& field, const std::string& part) {
        if (!covered.insert(field).second)
            throw Error(ErrorCode::PartitionMismatch, "field '" + field + "' is covered twice (part '" + part + "')");
    };
    for (const auto& part : parts) {
        PartPlan plan;
        if (!part.sort) {
            const Sort* fs = common->field(part.name);
            if (!fs)
                throw Error(ErrorCode::PartitionMismatch,
                            "part '" + part.name + "' has no sort and names no field of " + to_string(*common));
            cover(part.name, part.name);
            plans.push_back(PartPlan{*fs, {part.name}, true});
            continue;
        }
        const Sort& ps = *part.sort;
        bool subset = ps.is_record() && std::all_of(ps.fields.begin(), ps.fields.end(), [&](const SortField& f) {
                          const Sort* fs = common->field(f.name);
                          return fs && *fs == f.sort;
                      });
        if (subset) {
            for (const auto& f : ps.fields) {
                cover(f.name, part.name);
                plan.fields.push_back(f.name);
            }
            plan.sort = ps;
            plans.push_back(std::move(plan));
            continue;
        }
        // Bare field sort: prefer the field named like the part, otherwise
        // the first uncovered field of that sort.
        std::optional<std::string> chosen;
        if (const Sort* fs = common->field(part.name); fs && *fs == ps && !covered.count(part.name))
            chosen = part.name;
        for (const auto& f : common->fields) {
            if (chosen)
                break;
            if (f.sort == ps && !covered.count(f.name))
                chosen = f.name;
        }
        if (!chosen)
            throw Error(ErrorCode::PartitionMismatch,
                        "part '" + part.name + "' of sort " + to_string(ps) + " matches no uncovered field of " +
                            to_string(*common));
        cover(*chosen, part.name);
        plans.push_back(PartPlan{ps, {*chosen}, true});
    }
    for (const auto& f : common->fields)
        if (!covered.count(f.name))
            throw Error(ErrorCode::PartitionMismatch, "field '" + f.name + "' is not covered by any part");
    return plans;
}

std::vector<PortLabel> map_label(const std::vector<PortId>& images, const std::vector<PartPlan>& plans,
                                 const std::string& label)
{
    std::vector<PortLabel> out;
    if (label != whole_label) {
        for (std::size_t k = 0; k < plans.size(); ++k) {
            const auto& fs = plans[k].fields;
            if (std::find(fs.begin(), fs.end(), label) != fs.end())
                return {PortLabel{images[k], plans[k].bare ? std::string(whole_label) : label}};
        }
    }
    for (PortId img : images)
        out.push_back(PortLabel{img, label});
    return out;
}

}  // namespace

RuleResult split_port(const Model& model, PortId port, const std::vector<PartSpec>& parts)
{
    model.port(port);
    if (parts.size() < 2)
        throw Error(ErrorCode::TooFewParts, "splitting '" + model.port_path(port) + "' needs at least two parts");
    std::set<std::string> part_names;
    for (const auto& part : parts)
        if (part.name.empty() || !part_names.insert(part.name).second)
            throw Error(ErrorCode::PartitionMismatch, "part name '" + part.name + "' is empty or repeated");

    auto closure = sort_closure(model, port);
    std::optional<Sort> common;
    for (PortId p : closure) {
        const auto& s = model.port(p).sort;
        if (!s)
            continue;
        if (common && !(*common == *s))
            throw Error(ErrorCode::SortConflict, "'" + model.port_path(p) + "' carries " + to_string(*s) +
                                                     " but a connected port carries " + to_string(*common));
        common = s;
    }
    auto plans = plan_parts(common, parts);

    RuleResult out{model, {}, {}, {}};
    Model& m = out.model;

    // Names already taken per owner, ignoring the ports being replaced.
    std::map<ProcessId, std::set<std::string>> taken;
    for (PortId p : closure) {
        ProcessId owner = model.port(p).owner;
        if (taken.count(owner))
            continue;
        auto& names = taken[owner];
        for (PortId q : model.ports_of(owner))
            if (!closure.count(q))
                names.insert(model.port(q).name);
    }

    const ProcessId target = model.port(port).owner;
    for (const auto& part : parts)
        if (taken[target].count(part.name))
            throw Error(ErrorCode::FreshnessViolation, "'" + model.process_name(target) + "' already has a port named '" +
                                                           part.name + "'");

    // Peers and bound ports elsewhere take a suffix on a name clash.
    std::map<PortId, std::vector<PortId>> images;
    for (PortId p : closure) {
        const Port orig = m.port(p);
        Process& proc = m.process(orig.owner);
        auto& list = orig.direction == Direction::input ? proc.inputs : proc.outputs;
        auto pos = std::find(list.begin(), list.end(), p);
        std::vector<PortId> created;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            std::string name = parts[k].name;
            for (int i = 2; taken[orig.owner].count(name); ++i)
                name = parts[k].name + "_" + std::to_string(i);
            taken[orig.owner].insert(name);
            Port np;
            np.id = m.fresh_port_id();
            np.name = name;
            np.direction = orig.direction;
            np.owner = orig.owner;
            np.sort = plans[k].sort;
            m.ports.emplace(np.id, np);
            created.push_back(np.id);
        }
        pos = list.erase(pos);
        list.insert(pos, created.begin(), created.end());
        m.ports.erase(p);
        images[p] = created;
    }

    auto replace_set = [&](std::set<PortId>& s) {
        std::set<PortId> next;
        for (PortId p : s) {
            auto it = images.find(p);
            if (it == images.end())
                next.insert(p);
            else
                next.insert(it->second.begin(), it->second.end());
        }
        s = std::move(next);
    };
    for (auto& [owner, sub] : m.nets) {
        std::set<Channel> channels;
        for (const Channel& c : sub.net.channels) {
            auto si = images.find(c.source);
            auto di = images.find(c.dest);
            if (si == images.end() && di == images.end()) {
                channels.insert(c);
                continue;
            }
            // Peers split in lockstep.
            if (si == images.end() || di == images.end())
                throw Error(ErrorCode::WouldBeIllFormed, "channel endpoint outside the split closure");
            for (std::size_t k = 0; k < parts.size(); ++k)
                channels.insert(Channel{si->second[k], di->second[k]});
        }
        sub.net.channels = std::move(channels);
        replace_set(sub.net.env_inputs);
        replace_set(sub.net.env_outputs);
        std::map<PortId, PortId> mapping;
        for (const auto& [outer, inner] : sub.binding.mapping) {
            auto oi = images.find(outer);
            auto ii = images.find(inner);
            if (oi == images.end() && ii == images.end()) {
                mapping.emplace(outer, inner);
                continue;
            }
            if (oi == images.end() || ii == images.end())
                throw Error(ErrorCode::WouldBeIllFormed, "binding partner outside the split closure");
            for (std::size_t k = 0; k < parts.size(); ++k)
                mapping.emplace(oi->second[k], ii->second[k]);
        }
        sub.binding.mapping = std::move(mapping);
    }

    auto rewrite = [&](std::vector<PortLabel>& entries) {
        std::vector<PortLabel> next;
        for (const auto& e : entries) {
            auto it = images.find(e.port);
            std::vector<PortLabel> mapped =
                it == images.end() ? std::vector<PortLabel>{e} : map_label(it->second, plans, e.label);
            for (auto& pl : mapped)
                if (std::find(next.begin(), next.end(), pl) == next.end())
                    next.push_back(std::move(pl));
        }
        entries = std::move(next);
    };
    std::set<ProcessId> owners;
    for (PortId p : closure)
        owners.insert(model.port(p).owner);
    for (ProcessId o : owners)
        for (auto& rule : m.process(o).firing_rules) {
            rewrite(rule.needs);
            rewrite(rule.produces);
        }

    for (const auto& [p, imgs] : images) {
        out.ports[p] = std::set<PortId>(imgs.begin(), imgs.end());
        auto whole = map_label(imgs, plans, std::string(whole_label));
        out.fragments[PortLabel{p, std::string(whole_label)}] = {whole.begin(), whole.end()};
        if (common)
            for (const auto& f : common->fields) {
                auto mapped = map_label(imgs, plans, f.name);
                out.fragments[PortLabel{p, f.name}] = {mapped.begin(), mapped.end()};
            }
    }
    require_well_formed(m, "split-port " + model.port_path(port));
    return out;
}

}  // namespace bpn::refine
