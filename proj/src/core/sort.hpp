#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bpn {

struct SortField;

/// Data type of a port's document: an atom, a record of named component
/// sorts, or a sequence/set of one element sort. Sorts are compared
/// structurally; names in the sort table are aliases for structures.
struct Sort {
    enum class Kind { atomic, record, sequence, set };

    Kind kind = Kind::atomic;
    std::string name;               // atomic only
    std::vector<SortField> fields;  // record only, declaration order
    std::vector<Sort> element;      // sequence/set only, exactly one entry

    static Sort atomic(std::string name);
    static Sort record(std::vector<SortField> fields);
    static Sort sequence(Sort element);
    static Sort set(Sort element);

    bool is_record() const { return kind == Kind::record; }
    bool is_collection() const { return kind == Kind::sequence || kind == Kind::set; }

    // Record field lookup; nullptr when absent or not a record.
    const Sort* field(std::string_view field_name) const;
};

struct SortField {
    std::string name;
    Sort sort;
};

bool operator==(const Sort& a, const Sort& b);
bool operator==(const SortField& a, const SortField& b);

using SortTable = std::map<std::string, Sort, std::less<>>;

/// Record fields non-empty and pairwise distinct, collections carry one
/// element, recursively.
bool sort_well_formed(const Sort& sort);

/// Channel endpoint compatibility: unspecified on either side is compatible
/// with anything, otherwise structural equality.
bool sorts_compatible(const std::optional<Sort>& a, const std::optional<Sort>& b);

/// Structural rendering, e.g. `record { a: A, b: seq B }`.
std::string to_string(const Sort& sort);

/// Renders a sort preferring table names for the sort itself (when
/// `allow_alias`) and for every nested component.
std::string render_sort(const Sort& sort, const SortTable& table, bool allow_alias = true);

/// Smallest table name whose structure equals `sort`, if any.
std::optional<std::string> alias_of(const Sort& sort, const SortTable& table);

}  // namespace bpn
