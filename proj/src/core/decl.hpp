#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/model.hpp"

namespace bpn {

// Name-level declarations as written in model and script files. They are
// resolved against a Model, which allocates the ids.

struct SortExprField;

struct SortExpr {
    enum class Kind { ref, record, sequence, set };
    Kind kind = Kind::ref;
    std::string name;                   // ref
    std::vector<SortExprField> fields;  // record
    std::vector<SortExpr> element;      // sequence/set
    SourceSpan span;
};

struct SortExprField {
    std::string name;
    SortExpr sort;
};

/// Resolves name references through the table. Throws UnknownSortName.
Sort resolve_sort(const SortExpr& expr, const SortTable& table);

/// Inverse of resolve_sort for sorts whose atoms are declared in the table.
SortExpr to_expr(const Sort& sort);

/// Source text of a sort expression.
std::string format_sort_expr(const SortExpr& expr);

struct PortDecl {
    std::string name;
    Direction direction = Direction::input;
    std::optional<SortExpr> sort;
    SourceSpan span;
};

struct ProcessDecl {
    std::string name;
    std::vector<PortDecl> ports;
    std::string note;
    SourceSpan span;
};

struct PortRef {
    std::string process;
    std::string port;
    SourceSpan span;
};

struct ChannelDecl {
    PortRef source;
    PortRef dest;
};

/// `input <inner> binds <parent_port>` / `output ...`
struct BindingDecl {
    Direction direction = Direction::input;
    PortRef inner;
    std::string parent_port;
    SourceSpan span;
};

struct LabelRef {
    std::string port;
    std::string label{whole_label};
};

struct RuleDecl {
    std::string process;
    std::vector<LabelRef> needs;
    std::vector<LabelRef> produces;
    std::string compute = "tag";
    SourceSpan span;
};

/// Body of a net: members listed by name, channels, boundary bindings.
/// Members declared inline (script decompose blocks) go in `processes`.
struct NetDecl {
    std::string owner;
    std::vector<std::string> members;
    std::vector<ProcessDecl> processes;
    std::vector<ChannelDecl> channels;
    std::vector<BindingDecl> bindings;
    std::vector<RuleDecl> rules;
    SourceSpan span;
};

/// Resolves a rule against its process's ports. Throws UnknownPort /
/// InvalidRule on a bad reference or wrong direction.
FiringRule resolve_rule(const Model& model, ProcessId owner, const RuleDecl& decl);

/// Adds the declared process with its ports to the model. Throws
/// DuplicateDefinition on a repeated process or port name.
ProcessId declare_process(Model& model, const ProcessDecl& decl);

/// Fills `owner`'s net from a declaration whose processes already exist in
/// the model. Throws UnknownProcess / UnknownPort / DuplicateDefinition.
void declare_net(Model& model, const NetDecl& decl);

}  // namespace bpn
