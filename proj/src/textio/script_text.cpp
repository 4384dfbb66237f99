#include "textio/parser.hpp"
#include "textio/textio.hpp"

#include "refine/apply.hpp"

namespace bpn::textio {

namespace {

using namespace refine;

EndpointDecl endpoint(Parser& p)
{
    EndpointDecl e;
    e.fresh = p.accept_keyword("new");
    e.port = p.port_ref();
    if (p.accept_punct(":"))
        e.sort = p.sort_expr();
    if (p.accept_keyword("via")) {
        do
            e.via.push_back(p.expect_ident("process name"));
        while (p.accept_punct("/"));
    }
    return e;
}

Step step(Parser& p)
{
    Token kw = p.peek();
    if (kw.kind != Tok::ident)
        p.fail("expected a rule name");
    p.next();
    if (kw.text == "decompose") {
        DecomposeStep s;
        s.net.span = p.peek().span;
        s.net.owner = p.expect_ident("process name");
        p.net_body(s.net);
        return s;
    }
    if (kw.text == "add-channel") {
        AddChannelStep s;
        s.source = endpoint(p);
        p.expect_punct("->");
        s.dest = endpoint(p);
        return s;
    }
    if (kw.text == "assign-sort") {
        AssignSortStep s;
        s.port = p.port_ref();
        p.expect_punct(":");
        s.sort = p.sort_expr();
        return s;
    }
    if (kw.text == "split-port") {
        SplitPortStep s;
        s.port = p.port_ref();
        p.expect_punct("->");
        do {
            PartDecl part;
            part.name = p.expect_ident("part name");
            if (p.accept_punct(":"))
                part.sort = p.sort_expr();
            s.parts.push_back(std::move(part));
        } while (p.accept_punct(","));
        return s;
    }
    if (kw.text == "unfold") {
        UnfoldStep s;
        s.child = p.expect_ident("process name");
        if (p.accept_keyword("in"))
            s.parent = p.expect_ident("process name");
        return s;
    }
    if (kw.text == "fold") {
        FoldStep s;
        p.expect_punct("{");
        do
            s.group.push_back(p.expect_ident("process name"));
        while (p.accept_punct(","));
        p.expect_punct("}");
        p.expect_keyword("in");
        s.owner = p.expect_ident("process name");
        p.expect_keyword("as");
        s.new_name = p.expect_ident("process name");
        if (p.accept_keyword("ports")) {
            p.expect_punct("{");
            p.skip_separators();
            while (!p.at_punct("}")) {
                PortRef r = p.port_ref();
                p.expect_keyword("as");
                s.port_names.emplace_back(std::move(r), p.expect_ident("port name"));
                p.skip_separators();
                if (!p.accept_punct(","))
                    break;
                p.skip_separators();
            }
            p.expect_punct("}");
        }
        return s;
    }
    p.fail(ErrorCode::UnknownRuleName, kw, "unknown rule '" + kw.text + "'");
}

}  // namespace

RefinementScript parse_script(std::string_view text, const std::string& file)
{
    Parser p(text, file);
    RefinementScript script;
    script.source_file = file;
    p.skip_separators();
    while (!p.at_end()) {
        SourceSpan span = p.peek().span;
        script.steps.push_back(ScriptStep{step(p), span});
        p.end_statement();
        if (p.at_punct("}"))
            p.fail("unbalanced '}'");
    }
    return script;
}

std::string print_script(const RefinementScript& script)
{
    std::string out;
    for (const auto& s : script.steps)
        out += format_step(s.step) + "\n";
    return out;
}

}  // namespace bpn::textio
