#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "core/model.hpp"
#include "refine/apply.hpp"

namespace bpn::check {

struct Isomorphism {
    std::map<ProcessId, ProcessId> process_map;
    std::map<PortId, PortId> port_map;
};

/// Exact search for an id renaming from `a` onto `b` that preserves every
/// structural attribute and display name.
std::optional<Isomorphism> model_isomorphic(const Model& a, const Model& b);

/// True when `iso` maps `a` onto `b` exactly.
bool verify_isomorphism(const Model& a, const Model& b, const Isomorphism& iso);

enum class VerdictStatus { Refines, DoesNotMatch, ScriptFails };

std::string_view to_string(VerdictStatus s);

struct Verdict {
    VerdictStatus status = VerdictStatus::DoesNotMatch;
    std::string detail;
    std::optional<Isomorphism> witness;  // set iff Refines
    std::optional<refine::Trace> trace;  // set unless ScriptFails
    std::size_t failed_step = 0;         // 1-based, ScriptFails only
};

int exit_code(VerdictStatus s);

Verdict check_refinement(const Model& base, const Model& refined, const refine::RefinementScript& script);

struct SearchOptions {
    std::size_t max_steps = 1;
    std::size_t node_limit = 200000;
};

/// Iterative deepening over every applicable rule instance whose parameters
/// come from the names and sorts of the two models. Returns the first
/// witnessing script in enumeration order. Throws SearchBudgetExceeded.
std::optional<refine::RefinementScript> brute_force_derivable(const Model& base, const Model& refined,
                                                              const SearchOptions& options = {});

/// Every candidate step of the search from `current` towards `target`, in
/// enumeration order (not all of them apply).
std::vector<refine::Step> candidate_steps(const Model& current, const Model& target);

}  // namespace bpn::check
