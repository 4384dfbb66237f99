#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "core/model.hpp"
#include "textio/textio.hpp"

namespace bpn::sim {

/// A piece of a document on a port of the root interface. Payloads are
/// text; record ports carry one fragment per field or a single "whole".
struct Fragment {
    PortId port;
    std::string label{whole_label};
    std::string payload;
    auto operator<=>(const Fragment&) const = default;
};

struct Firing {
    std::string process;
    std::size_t rule = 0;  // index into the process's firing rules
    bool operator==(const Firing&) const = default;
};

struct SimResult {
    std::vector<Fragment> outputs;  // sorted by port name, then label
    std::vector<Firing> trace;
};

/// Unfolds every decomposed process below the root until the root's net
/// holds only leaves. A root without a net is returned unchanged.
Model flatten(const Model& model);

/// Runs firing rules to fixpoint. With `rng`, the next rule is drawn
/// uniformly from the ready ones; otherwise the smallest (process name,
/// rule index) fires first. Throws InvalidEnvFragment,
/// NonDeterministicRules, InvalidRule.
SimResult simulate_greedy(const Model& model, const std::vector<Fragment>& env, std::mt19937_64* rng = nullptr);

bool check_confluence(const Model& model, const std::vector<Fragment>& env, std::size_t trials, std::uint64_t seed);

/// Labels a port accepts: "whole", plus the field names of a record sort.
std::vector<std::string> valid_labels(const Port& port);

/// Name-level fragments against the root interface. Throws
/// InvalidEnvFragment for unknown ports or labels.
std::vector<Fragment> resolve_fragments(const Model& model, const std::vector<textio::FragmentLine>& lines);
std::vector<textio::FragmentLine> describe_fragments(const Model& model, const std::vector<Fragment>& fragments);

}  // namespace bpn::sim
