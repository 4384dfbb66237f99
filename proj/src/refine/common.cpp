#include <deque>

#include "refine/rules.hpp"

namespace bpn::refine {

namespace {

std::string summarize(const std::vector<Violation>& violations, const std::string& context)
{
    std::string out = context + " would leave the model ill-formed";
    if (!violations.empty())
        out += ": " + format_violation(violations.front());
    if (violations.size() > 1)
        out += " (+" + std::to_string(violations.size() - 1) + " more)";
    return out;
}

}  // namespace

IllFormedError::IllFormedError(std::vector<Violation> violations, const std::string& context)
    : Error(ErrorCode::WouldBeIllFormed, summarize(violations, context)), violations_(std::move(violations))
{
}

void require_well_formed(const Model& model, const std::string& context)
{
    auto found = validate_model(model);
    if (!found.empty())
        throw IllFormedError(std::move(found), context);
}

std::set<PortId> sort_closure(const Model& model, PortId port)
{
    model.port(port);
    std::map<PortId, std::vector<PortId>> adjacent;
    for (const auto& [owner, sub] : model.nets) {
        for (const Channel& c : sub.net.channels) {
            adjacent[c.source].push_back(c.dest);
            adjacent[c.dest].push_back(c.source);
        }
        for (const auto& [outer, inner] : sub.binding.mapping) {
            adjacent[outer].push_back(inner);
            adjacent[inner].push_back(outer);
        }
    }
    std::set<PortId> seen{port};
    std::deque<PortId> queue{port};
    while (!queue.empty()) {
        PortId p = queue.front();
        queue.pop_front();
        for (PortId q : adjacent[p])
            if (model.ports.count(q) && seen.insert(q).second)
                queue.push_back(q);
    }
    return seen;
}

PortId leaf_image(const Model& model, PortId port)
{
    // Depth is bounded by the hierarchy; the guard only protects against
    // malformed bindings that loop.
    for (std::size_t guard = 0; guard <= model.nets.size(); ++guard) {
        auto owner = model.ports.find(port);
        if (owner == model.ports.end())
            return port;
        auto net = model.nets.find(owner->second.owner);
        if (net == model.nets.end())
            return port;
        auto it = net->second.binding.mapping.find(port);
        if (it == net->second.binding.mapping.end())
            return port;
        port = it->second;
    }
    return port;
}

}  // namespace bpn::refine
