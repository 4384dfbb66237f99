#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "core/model.hpp"
#include "refine/script.hpp"

namespace bpn::testing {

std::string fixture_path(const std::string& name);
std::string read_text(const std::string& path);
Model load_fixture(const std::string& name);
refine::RefinementScript load_script_fixture(const std::string& name);

struct GenConfig {
    int max_levels = 3;       // the root's net counts as level 1
    int max_per_net = 6;
    double sort_probability = 0.4;
    double decompose_probability = 0.3;
};

/// Random well-formed model built bottom-up: every composite's interface
/// is derived from its net's boundary. The root always has a net of at
/// least two members. Sort table: A, B, R = record { a: A, b: B }.
Model generate_model(std::mt19937_64& rng, const GenConfig& cfg = {});

/// A random rule invocation against `model`; it may or may not apply.
/// Fresh names come from `counter` and never clash with existing names.
refine::Step random_step(std::mt19937_64& rng, const Model& model, int& counter);

/// Same structure with process and port ids permuted and port lists
/// shuffled.
Model rename_ids(const Model& model, std::mt19937_64& rng);

/// Random graph on `n` processes with `edges` channels (self loops
/// allowed), as a model whose root net holds the processes.
Model random_port_graph(std::mt19937_64& rng, int n, int edges,
                        std::vector<std::pair<int, int>>* edge_list = nullptr);

/// Exhaustive search: tries every ordered selection of distinct vertices as
/// a closed walk.
bool has_cycle_exhaustive(int n, const std::vector<std::pair<int, int>>& edges);

struct DotSummary {
    int box_nodes = 0;
    int point_nodes = 0;
    int edges = 0;
    int clusters = 0;
    std::vector<std::string> labels;  // node labels in order of appearance
};

/// Recognizer for the DOT subset: digraph, subgraph, node/edge/graph
/// attribute statements, node and edge statements with attribute lists.
/// Returns nullopt and sets `error` on a syntax error.
std::optional<DotSummary> parse_dot(const std::string& text, std::string* error = nullptr);

}  // namespace bpn::testing
