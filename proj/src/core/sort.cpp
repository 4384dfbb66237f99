#include "core/sort.hpp"

#include <set>

namespace bpn {

Sort Sort::atomic(std::string name)
{
    Sort s;
    s.kind = Kind::atomic;
    s.name = std::move(name);
    return s;
}

Sort Sort::record(std::vector<SortField> fields)
{
    Sort s;
    s.kind = Kind::record;
    s.fields = std::move(fields);
    return s;
}

Sort Sort::sequence(Sort element)
{
    Sort s;
    s.kind = Kind::sequence;
    s.element.push_back(std::move(element));
    return s;
}

Sort Sort::set(Sort element)
{
    Sort s;
    s.kind = Kind::set;
    s.element.push_back(std::move(element));
    return s;
}

const Sort* Sort::field(std::string_view field_name) const
{
    if (kind != Kind::record)
        return nullptr;
    for (const auto& f : fields)
        if (f.name == field_name)
            return &f.sort;
    return nullptr;
}

bool operator==(const Sort& a, const Sort& b)
{
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
    case Sort::Kind::atomic:
        return a.name == b.name;
    case Sort::Kind::record:
        return a.fields == b.fields;
    case Sort::Kind::sequence:
    case Sort::Kind::set:
        return a.element == b.element;
    }
    return false;
}

bool operator==(const SortField& a, const SortField& b)
{
    return a.name == b.name && a.sort == b.sort;
}

bool sort_well_formed(const Sort& sort)
{
    switch (sort.kind) {
    case Sort::Kind::atomic:
        return !sort.name.empty();
    case Sort::Kind::record: {
        if (sort.fields.empty())
            return false;
        std::set<std::string_view> seen;
        for (const auto& f : sort.fields) {
            if (f.name.empty() || !seen.insert(f.name).second || !sort_well_formed(f.sort))
                return false;
        }
        return true;
    }
    case Sort::Kind::sequence:
    case Sort::Kind::set:
        return sort.element.size() == 1 && sort_well_formed(sort.element.front());
    }
    return false;
}

bool sorts_compatible(const std::optional<Sort>& a, const std::optional<Sort>& b)
{
    if (!a || !b)
        return true;
    return *a == *b;
}

std::optional<std::string> alias_of(const Sort& sort, const SortTable& table)
{
    for (const auto& [name, s] : table)
        if (s == sort)
            return name;
    return std::nullopt;
}

namespace {

std::string render(const Sort& sort, const SortTable* table, bool allow_alias)
{
    if (table && allow_alias) {
        // An atom's own name always resolves when the atom was declared.
        if (sort.kind != Sort::Kind::atomic) {
            if (auto alias = alias_of(sort, *table))
                return *alias;
        }
    }
    switch (sort.kind) {
    case Sort::Kind::atomic:
        return sort.name;
    case Sort::Kind::record: {
        std::string out = "record { ";
        for (std::size_t i = 0; i < sort.fields.size(); ++i) {
            if (i)
                out += ", ";
            out += sort.fields[i].name + ": " + render(sort.fields[i].sort, table, true);
        }
        return out + " }";
    }
    case Sort::Kind::sequence:
        return "seq " + render(sort.element.front(), table, true);
    case Sort::Kind::set:
        return "set " + render(sort.element.front(), table, true);
    }
    return {};
}

}  // namespace

std::string to_string(const Sort& sort) { return render(sort, nullptr, false); }

std::string render_sort(const Sort& sort, const SortTable& table, bool allow_alias)
{
    return render(sort, &table, allow_alias);
}

}  // namespace bpn
