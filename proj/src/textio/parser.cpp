#include "textio/parser.hpp"

#include <cctype>

namespace bpn::textio {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text, const std::string& file)
{
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    while (i < text.size()) {
        char c = text[i];
        SourceSpan span{file, line, col};
        if (c == '\n' || c == ';') {
            if (out.empty() || out.back().kind != Tok::separator)
                out.push_back(Token{Tok::separator, std::string(1, c), span});
            advance(1);
        } else if (c == ' ' || c == '\t' || c == '\r') {
            advance(1);
        } else if (c == '#') {
            while (i < text.size() && text[i] != '\n')
                advance(1);
        } else if (ident_start(c) || std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < text.size() &&
                   (ident_char(text[j]) || (text[j] == '-' && j + 1 < text.size() && ident_char(text[j + 1]))))
                ++j;
            out.push_back(Token{Tok::ident, std::string(text.substr(i, j - i)), span});
            advance(j - i);
        } else if (c == '"') {
            std::string value;
            advance(1);
            while (true) {
                if (i >= text.size() || text[i] == '\n')
                    throw ParseError(ErrorCode::ParseError, span, "unterminated string");
                char d = text[i];
                if (d == '"') {
                    advance(1);
                    break;
                }
                if (d == '\\' && i + 1 < text.size()) {
                    char e = text[i + 1];
                    value += e == 'n' ? '\n' : e == 't' ? '\t' : e;
                    advance(2);
                    continue;
                }
                value += d;
                advance(1);
            }
            out.push_back(Token{Tok::string, std::move(value), span});
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            out.push_back(Token{Tok::punct, "->", span});
            advance(2);
        } else if (std::string_view("{}(),:.=/").find(c) != std::string_view::npos) {
            out.push_back(Token{Tok::punct, std::string(1, c), span});
            advance(1);
        } else {
            throw ParseError(ErrorCode::ParseError, span, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back(Token{Tok::end, "", SourceSpan{file, line, col}});
    return out;
}

std::string quote(std::string_view s)
{
    std::string out = "\"";
    for (char c : s) {
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '\t') {
            out += "\\t";
            continue;
        }
        if (c == '"' || c == '\\')
            out += '\\';
        out += c;
    }
    return out + "\"";
}

Parser::Parser(std::string_view text, const std::string& file) : tokens_(tokenize(text, file)) {}

const Token& Parser::peek(std::size_t ahead) const { return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)]; }

Token Parser::next()
{
    Token t = peek();
    if (pos_ < tokens_.size() - 1)
        ++pos_;
    return t;
}

bool Parser::at_punct(std::string_view p) const { return peek().kind == Tok::punct && peek().text == p; }

bool Parser::at_keyword(std::string_view k) const { return peek().kind == Tok::ident && peek().text == k; }

void Parser::skip_separators()
{
    while (at_separator())
        next();
}

void Parser::end_statement()
{
    if (at_separator()) {
        skip_separators();
        return;
    }
    if (at_end() || at_punct("}"))
        return;
    fail("expected end of statement, found '" + peek().text + "'");
}

bool Parser::accept_punct(std::string_view p)
{
    if (!at_punct(p))
        return false;
    next();
    return true;
}

bool Parser::accept_keyword(std::string_view k)
{
    if (!at_keyword(k))
        return false;
    next();
    return true;
}

void Parser::expect_punct(std::string_view p)
{
    if (!accept_punct(p))
        fail("expected '" + std::string(p) + "', found " + (at_end() ? "end of input" : "'" + peek().text + "'"));
}

void Parser::expect_keyword(std::string_view k)
{
    if (!accept_keyword(k))
        fail("expected '" + std::string(k) + "', found " + (at_end() ? "end of input" : "'" + peek().text + "'"));
}

std::string Parser::expect_ident(std::string_view what)
{
    if (peek().kind != Tok::ident)
        fail("expected " + std::string(what) + ", found " +
             (at_end() ? "end of input" : at_separator() ? "end of line" : "'" + peek().text + "'"));
    return next().text;
}

std::string Parser::expect_string()
{
    if (peek().kind != Tok::string)
        fail("expected a quoted string");
    return next().text;
}

void Parser::fail(const std::string& msg) const { fail(ErrorCode::ParseError, peek(), msg); }

void Parser::fail(ErrorCode code, const Token& at, const std::string& msg) const
{
    throw ParseError(code, at.span, msg);
}

SortExpr Parser::sort_expr()
{
    SortExpr e;
    e.span = peek().span;
    if (accept_keyword("record")) {
        e.kind = SortExpr::Kind::record;
        expect_punct("{");
        skip_separators();
        while (!at_punct("}")) {
            std::string name = expect_ident("field name");
            expect_punct(":");
            e.fields.push_back(SortExprField{name, sort_expr()});
            skip_separators();
            if (!accept_punct(","))
                break;
            skip_separators();
        }
        skip_separators();
        expect_punct("}");
    } else if (at_keyword("seq") || at_keyword("set")) {
        e.kind = next().text == "seq" ? SortExpr::Kind::sequence : SortExpr::Kind::set;
        e.element.push_back(sort_expr());
    } else {
        e.kind = SortExpr::Kind::ref;
        e.name = expect_ident("sort");
    }
    return e;
}

PortRef Parser::port_ref()
{
    PortRef r;
    r.span = peek().span;
    r.process = expect_ident("process name");
    expect_punct(".");
    r.port = expect_ident("port name");
    return r;
}

ProcessDecl Parser::process_decl()
{
    ProcessDecl d;
    d.span = peek().span;
    d.name = expect_ident("process name");
    expect_punct("{");
    skip_separators();
    while (!at_punct("}")) {
        if (at_end())
            fail("unterminated process block");
        if (accept_keyword("note")) {
            d.note = expect_string();
        } else if (at_keyword("in") || at_keyword("out")) {
            Direction dir = next().text == "in" ? Direction::input : Direction::output;
            std::vector<PortDecl> group;
            do {
                PortDecl p;
                p.span = peek().span;
                p.name = expect_ident("port name");
                p.direction = dir;
                group.push_back(std::move(p));
            } while (peek().kind == Tok::ident);
            if (accept_punct(":")) {
                SortExpr s = sort_expr();
                for (auto& p : group)
                    p.sort = s;
            }
            d.ports.insert(d.ports.end(), group.begin(), group.end());
        } else {
            fail("expected 'in', 'out' or 'note' in process block");
        }
        end_statement();
    }
    expect_punct("}");
    return d;
}

RuleDecl Parser::rule_decl()
{
    RuleDecl r;
    r.span = peek().span;
    r.process = expect_ident("process name");
    expect_punct(":");
    auto labels = [&] {
        std::vector<LabelRef> out;
        expect_punct("{");
        skip_separators();
        while (!at_punct("}")) {
            LabelRef l;
            l.port = expect_ident("port name");
            if (accept_punct("."))
                l.label = expect_ident("label");
            out.push_back(std::move(l));
            skip_separators();
            if (!accept_punct(","))
                break;
            skip_separators();
        }
        expect_punct("}");
        return out;
    };
    expect_keyword("needs");
    r.needs = labels();
    expect_keyword("produces");
    r.produces = labels();
    if (accept_keyword("using"))
        r.compute = expect_ident("compute function");
    return r;
}

void Parser::net_body(NetDecl& decl)
{
    expect_punct("{");
    skip_separators();
    while (!at_punct("}")) {
        if (at_end())
            fail("unterminated block");
        if (accept_keyword("members")) {
            do
                decl.members.push_back(expect_ident("process name"));
            while (accept_punct(","));
        } else if (accept_keyword("process")) {
            decl.processes.push_back(process_decl());
        } else if (accept_keyword("channel")) {
            ChannelDecl c;
            c.source = port_ref();
            expect_punct("->");
            c.dest = port_ref();
            decl.channels.push_back(std::move(c));
        } else if (at_keyword("input") || at_keyword("output")) {
            BindingDecl b;
            b.span = peek().span;
            b.direction = next().text == "input" ? Direction::input : Direction::output;
            b.inner = port_ref();
            if (accept_keyword("binds"))
                b.parent_port = expect_ident("port name");
            decl.bindings.push_back(std::move(b));
        } else if (accept_keyword("rule")) {
            decl.rules.push_back(rule_decl());
        } else {
            fail("unexpected '" + peek().text + "' in net block");
        }
        end_statement();
    }
    expect_punct("}");
}

}  // namespace bpn::textio
