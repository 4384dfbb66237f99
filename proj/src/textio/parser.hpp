#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "core/decl.hpp"
#include "core/error.hpp"

namespace bpn::textio {

enum class Tok { ident, string, punct, separator, end };

struct Token {
    Tok kind = Tok::end;
    std::string text;
    SourceSpan span;
};

/// Newlines and `;` become separator tokens; `#` starts a comment.
std::vector<Token> tokenize(std::string_view text, const std::string& file);

// Recursive-descent cursor with the productions shared by model files and
// scripts.
class Parser {
public:
    Parser(std::string_view text, const std::string& file);

    const Token& peek(std::size_t ahead = 0) const;
    Token next();
    bool at_end() const { return peek().kind == Tok::end; }
    bool at_separator() const { return peek().kind == Tok::separator; }
    bool at_punct(std::string_view p) const;
    bool at_keyword(std::string_view k) const;

    void skip_separators();
    void end_statement();  // separator, `}` (not consumed) or end of input
    bool accept_punct(std::string_view p);
    bool accept_keyword(std::string_view k);
    void expect_punct(std::string_view p);
    void expect_keyword(std::string_view k);
    std::string expect_ident(std::string_view what);
    std::string expect_string();

    [[noreturn]] void fail(const std::string& msg) const;
    [[noreturn]] void fail(ErrorCode code, const Token& at, const std::string& msg) const;

    SortExpr sort_expr();
    PortRef port_ref();
    ProcessDecl process_decl();  // after `process`
    RuleDecl rule_decl();        // after `rule`
    // Block body `{ ... }` of a `net for` or `decompose`.
    void net_body(NetDecl& decl);

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::string quote(std::string_view s);

}  // namespace bpn::textio
