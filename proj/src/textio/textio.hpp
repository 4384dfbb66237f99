#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "core/model.hpp"
#include "refine/script.hpp"

namespace bpn::textio {

/// Parses a `.bpn` model. Well-formedness is not checked; name resolution
/// is. Throws ParseError (codes ParseError, DuplicateDefinition,
/// UnknownSortName, UnknownProcess, UnknownPort, InvalidRule).
Model parse_model(std::string_view text, const std::string& file = "<input>");

/// Canonical text: every declaration ordered by name, independent of ids.
std::string print_model(const Model& model);

/// Parses a `.bps` script. Throws ParseError (UnknownRuleName for an
/// unknown step keyword).
refine::RefinementScript parse_script(std::string_view text, const std::string& file = "<input>");

std::string print_script(const refine::RefinementScript& script);

/// Graphviz digraph of `owner`'s net. Members with nets become clusters
/// while `depth` allows. Throws NoNet.
std::string export_dot(const Model& model, ProcessId owner, int depth = 1);

/// One `port [label] = payload` line of an environment or output file.
struct FragmentLine {
    std::string port;
    std::string label{whole_label};
    std::string payload;
};

std::vector<FragmentLine> parse_fragments(std::string_view text, const std::string& file = "<input>");
std::string print_fragments(const std::vector<FragmentLine>& lines);

}  // namespace bpn::textio
