#include "support/support.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "core/decl.hpp"
#include "core/validate.hpp"
#include "textio/textio.hpp"

namespace bpn::testing {

std::string fixture_path(const std::string& name) { return std::string(BPN_FIXTURE_DIR) + "/" + name; }

std::string read_text(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Model load_fixture(const std::string& name)
{
    return textio::parse_model(read_text(fixture_path(name)), name);
}

refine::RefinementScript load_script_fixture(const std::string& name)
{
    return textio::parse_script(read_text(fixture_path(name)), name);
}

namespace {

class Generator {
public:
    Generator(std::mt19937_64& rng, const GenConfig& cfg) : rng_(rng), cfg_(cfg)
    {
        m_.sorts.emplace("A", Sort::atomic("A"));
        m_.sorts.emplace("B", Sort::atomic("B"));
        m_.sorts.emplace("R", Sort::record({SortField{"a", Sort::atomic("A")}, SortField{"b", Sort::atomic("B")}}));
    }

    Model run()
    {
        m_.root = composite(1, true);
        return std::move(m_);
    }

private:
    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

    std::optional<Sort> random_sort()
    {
        if (!coin(cfg_.sort_probability))
            return std::nullopt;
        static const char* names[] = {"A", "B", "R"};
        return m_.sorts.at(names[uniform(0, 2)]);
    }

    std::string fresh() { return "p" + std::to_string(++counter_); }

    void add_rule(ProcessId p)
    {
        FiringRule r;
        for (PortId i : m_.process(p).inputs)
            r.needs.push_back(PortLabel{i, std::string(whole_label)});
        for (PortId o : m_.process(p).outputs)
            r.produces.push_back(PortLabel{o, std::string(whole_label)});
        m_.process(p).firing_rules.push_back(std::move(r));
    }

    ProcessId leaf()
    {
        ProcessId p = m_.add_process(fresh());
        int nin = uniform(1, 2), nout = uniform(1, 2);
        for (int i = 1; i <= nin; ++i)
            m_.add_port(p, "i" + std::to_string(i), Direction::input, random_sort());
        for (int i = 1; i <= nout; ++i)
            m_.add_port(p, "o" + std::to_string(i), Direction::output, random_sort());
        add_rule(p);
        return p;
    }

    ProcessId composite(int level, bool root)
    {
        int n = uniform(2, cfg_.max_per_net);
        std::vector<ProcessId> kids;
        for (int i = 0; i < n; ++i) {
            bool nested = level + 1 < cfg_.max_levels && coin(cfg_.decompose_probability);
            kids.push_back(nested ? composite(level + 1, false) : leaf());
        }
        std::shuffle(kids.begin(), kids.end(), rng_);

        Subnet sub;
        sub.net.processes.insert(kids.begin(), kids.end());
        std::vector<PortId> outputs;
        for (ProcessId kid : kids) {
            for (PortId in : m_.process(kid).inputs) {
                std::vector<PortId> candidates;
                for (PortId out : outputs)
                    if (sorts_compatible(m_.port(out).sort, m_.port(in).sort))
                        candidates.push_back(out);
                if (!candidates.empty() && coin(0.6))
                    sub.net.channels.insert(Channel{candidates[uniform(0, int(candidates.size()) - 1)], in});
                else
                    sub.net.env_inputs.insert(in);
            }
            const auto& outs = m_.process(kid).outputs;
            outputs.insert(outputs.end(), outs.begin(), outs.end());
        }
        for (PortId out : outputs)
            if (coin(0.5))
                sub.net.env_outputs.insert(out);
        if (sub.net.env_outputs.empty())
            sub.net.env_outputs.insert(outputs.back());

        ProcessId p = m_.add_process(root ? "root" : fresh());
        int k = 0;
        for (PortId inner : sub.net.env_inputs)
            sub.binding.mapping[m_.add_port(p, "in" + std::to_string(++k), Direction::input, m_.port(inner).sort)] =
                inner;
        k = 0;
        for (PortId inner : sub.net.env_outputs)
            sub.binding.mapping[m_.add_port(p, "out" + std::to_string(++k), Direction::output, m_.port(inner).sort)] =
                inner;
        m_.nets.emplace(p, std::move(sub));
        add_rule(p);
        return p;
    }

    std::mt19937_64& rng_;
    GenConfig cfg_;
    Model m_;
    int counter_ = 0;
};

}  // namespace

Model generate_model(std::mt19937_64& rng, const GenConfig& cfg) { return Generator(rng, cfg).run(); }

namespace {

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v)
{
    return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::string fresh_name(const Model& m, const std::string& prefix, int& counter)
{
    while (true) {
        std::string name = prefix + std::to_string(++counter);
        bool used = m.find_process(name).has_value();
        for (const auto& [id, p] : m.ports)
            used = used || p.name == name;
        if (!used)
            return name;
    }
}

PortRef ref(const Model& m, PortId p) { return PortRef{m.process_name(m.port(p).owner), m.port(p).name, {}}; }

std::optional<SortExpr> expr(const std::optional<Sort>& s)
{
    if (!s)
        return std::nullopt;
    return to_expr(*s);
}

}  // namespace

refine::Step random_step(std::mt19937_64& rng, const Model& m, int& counter)
{
    using namespace refine;
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto coin = [&](double p) { return std::bernoulli_distribution(p)(rng); };

    std::vector<ProcessId> owners, members, leaves, nested_composites;
    for (const auto& [id, p] : m.processes) {
        bool contained = m.container_of(id).has_value();
        if (m.has_net(id))
            owners.push_back(id);
        if (contained)
            members.push_back(id);
        if (contained && !m.has_net(id))
            leaves.push_back(id);
        if (contained && m.has_net(id))
            nested_composites.push_back(id);
    }
    std::vector<PortId> ports;
    for (const auto& [id, p] : m.ports)
        ports.push_back(id);
    static const char* sort_names[] = {"A", "B", "R"};

    switch (uniform(0, 5)) {
    case 0:
        if (!leaves.empty()) {
            ProcessId x = pick(rng, leaves);
            const Process& px = m.process(x);
            NetDecl decl;
            decl.owner = px.name;
            bool two = coin(0.6);
            ProcessDecl c1{fresh_name(m, "d", counter), {}, "", {}};
            ProcessDecl c2{fresh_name(m, "d", counter), {}, "", {}};
            RuleDecl r1{c1.name, {}, {}, "tag", {}}, r2{c2.name, {}, {}, "tag", {}};
            for (PortId in : px.inputs) {
                const Port& pt = m.port(in);
                c1.ports.push_back(PortDecl{pt.name, Direction::input, expr(pt.sort), {}});
                decl.bindings.push_back(BindingDecl{Direction::input, PortRef{c1.name, pt.name, {}}, pt.name, {}});
                r1.needs.push_back(LabelRef{pt.name});
            }
            for (PortId out : px.outputs) {
                const Port& pt = m.port(out);
                bool second = two && coin(0.5);
                auto& target = second ? c2 : c1;
                target.ports.push_back(PortDecl{pt.name, Direction::output, expr(pt.sort), {}});
                decl.bindings.push_back(BindingDecl{Direction::output, PortRef{target.name, pt.name, {}}, pt.name, {}});
                (second ? r2 : r1).produces.push_back(LabelRef{pt.name});
            }
            if (two) {
                std::string link = fresh_name(m, "w", counter);
                c1.ports.push_back(PortDecl{link, Direction::output, std::nullopt, {}});
                c2.ports.push_back(PortDecl{link, Direction::input, std::nullopt, {}});
                decl.channels.push_back(ChannelDecl{PortRef{c1.name, link, {}}, PortRef{c2.name, link, {}}});
                r1.produces.push_back(LabelRef{link});
                r2.needs.push_back(LabelRef{link});
            }
            decl.processes.push_back(c1);
            decl.rules.push_back(r1);
            if (two) {
                decl.processes.push_back(c2);
                decl.rules.push_back(r2);
            }
            return DecomposeStep{std::move(decl)};
        }
        [[fallthrough]];
    case 1: {
        ProcessId owner = pick(rng, owners);
        const auto& net = m.subnet(owner).net;
        std::vector<ProcessId> in_net(net.processes.begin(), net.processes.end());
        ProcessId src = pick(rng, in_net), dst = pick(rng, in_net);
        auto endpoint = [&](ProcessId p, Direction dir) {
            EndpointDecl e;
            const auto& list = dir == Direction::input ? m.process(p).inputs : m.process(p).outputs;
            if (!list.empty() && coin(0.5)) {
                e.port = ref(m, pick(rng, list));
                return e;
            }
            e.fresh = true;
            e.port = PortRef{m.process_name(p), fresh_name(m, dir == Direction::input ? "x" : "y", counter), {}};
            if (coin(0.3))
                e.sort = to_expr(m.sorts.at(sort_names[uniform(0, 2)]));
            if (m.has_net(p) && coin(0.5)) {
                const auto& sub = m.subnet(p).net.processes;
                if (!sub.empty())
                    e.via.push_back(m.process_name(pick(rng, std::vector<ProcessId>(sub.begin(), sub.end()))));
            }
            return e;
        };
        return AddChannelStep{endpoint(src, Direction::output), endpoint(dst, Direction::input)};
    }
    case 2: {
        SortExpr s;
        s.name = sort_names[uniform(0, 2)];
        return AssignSortStep{ref(m, pick(rng, ports)), s};
    }
    case 3: {
        PortId p = pick(rng, ports);
        SplitPortStep s{ref(m, p), {}};
        const auto& sort = m.port(p).sort;
        if (sort && sort->is_record()) {
            for (const auto& f : sort->fields)
                s.parts.push_back(PartDecl{fresh_name(m, "f", counter), to_expr(f.sort)});
        } else {
            int n = uniform(2, 3);
            for (int i = 0; i < n; ++i)
                s.parts.push_back(PartDecl{fresh_name(m, "s", counter), std::nullopt});
        }
        return s;
    }
    case 4:
        if (!nested_composites.empty()) {
            ProcessId c = pick(rng, nested_composites);
            return UnfoldStep{m.process_name(c), ""};
        }
        [[fallthrough]];
    default: {
        ProcessId owner = pick(rng, owners);
        std::map<ProcessId, unsigned> order;
        try {
            order = serialize_order(m, owner);
        } catch (const Error&) {
        }
        std::vector<ProcessId> ranked(order.size());
        for (const auto& [p, rank] : order)
            ranked[rank - 1] = p;
        FoldStep f;
        f.owner = m.process_name(owner);
        f.new_name = fresh_name(m, "g", counter);
        if (ranked.size() >= 2) {
            int len = uniform(1, int(ranked.size()) - 1);
            int start = uniform(0, int(ranked.size()) - len);
            for (int i = start; i < start + len; ++i)
                f.group.push_back(m.process_name(ranked[i]));
        }
        return f;
    }
    }
}

Model rename_ids(const Model& model, std::mt19937_64& rng)
{
    std::vector<std::uint32_t> pvals, qvals;
    for (const auto& [id, p] : model.processes)
        pvals.push_back(id.value + 1000);
    for (const auto& [id, p] : model.ports)
        qvals.push_back(id.value + 5000);
    std::shuffle(pvals.begin(), pvals.end(), rng);
    std::shuffle(qvals.begin(), qvals.end(), rng);
    std::map<ProcessId, ProcessId> pm;
    std::map<PortId, PortId> qm;
    std::size_t i = 0;
    for (const auto& [id, p] : model.processes)
        pm[id] = ProcessId{pvals[i++]};
    i = 0;
    for (const auto& [id, p] : model.ports)
        qm[id] = PortId{qvals[i++]};

    Model out;
    out.sorts = model.sorts;
    out.root = pm.at(model.root);
    for (const auto& [id, p] : model.processes) {
        Process np = p;
        np.id = pm.at(id);
        for (auto* list : {&np.inputs, &np.outputs}) {
            for (PortId& q : *list)
                q = qm.at(q);
            std::shuffle(list->begin(), list->end(), rng);
        }
        for (auto& r : np.firing_rules)
            for (auto* side : {&r.needs, &r.produces})
                for (auto& l : *side)
                    l.port = qm.at(l.port);
        out.processes.emplace(np.id, std::move(np));
    }
    for (const auto& [id, p] : model.ports) {
        Port np = p;
        np.id = qm.at(id);
        np.owner = pm.at(p.owner);
        out.ports.emplace(np.id, std::move(np));
    }
    for (const auto& [owner, sub] : model.nets) {
        Subnet ns;
        for (ProcessId p : sub.net.processes)
            ns.net.processes.insert(pm.at(p));
        for (const Channel& c : sub.net.channels)
            ns.net.channels.insert(Channel{qm.at(c.source), qm.at(c.dest)});
        for (PortId p : sub.net.env_inputs)
            ns.net.env_inputs.insert(qm.at(p));
        for (PortId p : sub.net.env_outputs)
            ns.net.env_outputs.insert(qm.at(p));
        for (const auto& [a, b] : sub.binding.mapping)
            ns.binding.mapping[qm.at(a)] = qm.at(b);
        out.nets.emplace(pm.at(owner), std::move(ns));
    }
    return out;
}

Model random_port_graph(std::mt19937_64& rng, int n, int edges, std::vector<std::pair<int, int>>* edge_list)
{
    Model m;
    m.root = m.add_process("g");
    Subnet sub;
    std::vector<ProcessId> vs;
    for (int i = 0; i < n; ++i) {
        vs.push_back(m.add_process("v" + std::to_string(i)));
        sub.net.processes.insert(vs.back());
    }
    std::uniform_int_distribution<int> vertex(0, n - 1);
    for (int e = 0; e < edges; ++e) {
        int a = vertex(rng), b = vertex(rng);
        PortId out = m.add_port(vs[a], "o" + std::to_string(e), Direction::output);
        PortId in = m.add_port(vs[b], "i" + std::to_string(e), Direction::input);
        sub.net.channels.insert(Channel{out, in});
        if (edge_list)
            edge_list->emplace_back(a, b);
    }
    m.nets.emplace(m.root, std::move(sub));
    return m;
}

bool has_cycle_exhaustive(int n, const std::vector<std::pair<int, int>>& edges)
{
    std::set<std::pair<int, int>> e(edges.begin(), edges.end());
    for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> vs;
        for (int v = 0; v < n; ++v)
            if (mask & (1 << v))
                vs.push_back(v);
        do {
            bool closed = true;
            for (std::size_t i = 0; i < vs.size() && closed; ++i)
                closed = e.count({vs[i], vs[(i + 1) % vs.size()]}) != 0;
            if (closed)
                return true;
        } while (std::next_permutation(vs.begin(), vs.end()));
    }
    return false;
}

namespace {

struct DotToken {
    enum Kind { id, punct, end } kind;
    std::string text;
};

class DotParser {
public:
    explicit DotParser(const std::string& text) { lex(text); }

    DotSummary graph()
    {
        if (accept_word("strict")) {
        }
        if (!accept_word("digraph"))
            throw std::runtime_error("expected 'digraph'");
        if (peek().kind == DotToken::id)
            next();
        expect("{");
        stmt_list();
        expect("}");
        if (peek().kind != DotToken::end)
            throw std::runtime_error("trailing input after graph");
        return summary_;
    }

private:
    void lex(const std::string& s)
    {
        std::size_t i = 0;
        while (i < s.size()) {
            char c = s[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                std::size_t j = i;
                while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                    ++j;
                tokens_.push_back({DotToken::id, s.substr(i, j - i)});
                i = j;
            } else if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size())) {
                std::size_t j = i;
                while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.'))
                    ++j;
                tokens_.push_back({DotToken::id, s.substr(i, j - i)});
                i = j;
            } else if (c == '"') {
                std::string v;
                ++i;
                while (i < s.size() && s[i] != '"') {
                    if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == '"')
                        ++i;
                    v += s[i++];
                }
                if (i >= s.size())
                    throw std::runtime_error("unterminated string");
                ++i;
                tokens_.push_back({DotToken::id, v});
            } else if (c == '-' && i + 1 < s.size() && (s[i + 1] == '>' || s[i + 1] == '-')) {
                tokens_.push_back({DotToken::punct, s.substr(i, 2)});
                i += 2;
            } else if (std::string("{}[];=,:").find(c) != std::string::npos) {
                tokens_.push_back({DotToken::punct, std::string(1, c)});
                ++i;
            } else {
                throw std::runtime_error(std::string("unexpected character '") + c + "'");
            }
        }
        tokens_.push_back({DotToken::end, ""});
    }

    const DotToken& peek(std::size_t k = 0) const { return tokens_[std::min(pos_ + k, tokens_.size() - 1)]; }
    DotToken next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
    bool at(const std::string& p) const { return peek().kind == DotToken::punct && peek().text == p; }
    bool accept(const std::string& p)
    {
        if (!at(p))
            return false;
        ++pos_;
        return true;
    }
    bool accept_word(const std::string& w)
    {
        if (peek().kind != DotToken::id || peek().text != w)
            return false;
        ++pos_;
        return true;
    }
    void expect(const std::string& p)
    {
        if (!accept(p))
            throw std::runtime_error("expected '" + p + "' near '" + peek().text + "'");
    }
    std::string id()
    {
        if (peek().kind != DotToken::id)
            throw std::runtime_error("expected an identifier near '" + peek().text + "'");
        return next().text;
    }

    void stmt_list()
    {
        while (!at("}")) {
            if (peek().kind == DotToken::end)
                throw std::runtime_error("unterminated block");
            stmt();
            accept(";");
        }
    }

    std::map<std::string, std::string> attr_list()
    {
        std::map<std::string, std::string> attrs;
        while (accept("[")) {
            while (!at("]")) {
                std::string k = id();
                expect("=");
                attrs[k] = id();
                if (!accept(","))
                    accept(";");
            }
            expect("]");
        }
        return attrs;
    }

    void subgraph()
    {
        std::string name;
        if (accept_word("subgraph") && peek().kind == DotToken::id)
            name = id();
        if (name.rfind("cluster", 0) == 0)
            ++summary_.clusters;
        expect("{");
        stmt_list();
        expect("}");
    }

    void stmt()
    {
        if (accept_word("graph") || accept_word("node") || accept_word("edge")) {
            attr_list();
            return;
        }
        if (at("{") || (peek().kind == DotToken::id && peek().text == "subgraph")) {
            subgraph();
            return;
        }
        std::string first = id();
        if (accept("=")) {
            id();
            return;
        }
        if (accept(":"))
            id();
        if (at("--"))
            throw std::runtime_error("undirected edge in a digraph");
        int hops = 0;
        while (accept("->")) {
            if (at("{") || (peek().kind == DotToken::id && peek().text == "subgraph"))
                subgraph();
            else
                id();
            ++hops;
        }
        auto attrs = attr_list();
        if (hops) {
            summary_.edges += hops;
            return;
        }
        if (attrs.count("shape") && attrs.at("shape") == "point") {
            ++summary_.point_nodes;
        } else {
            ++summary_.box_nodes;
            summary_.labels.push_back(attrs.count("label") ? attrs.at("label") : first);
        }
    }

    std::vector<DotToken> tokens_;
    std::size_t pos_ = 0;
    DotSummary summary_;
};

}  // namespace

std::optional<DotSummary> parse_dot(const std::string& text, std::string* error)
{
    try {
        return DotParser(text).graph();
    } catch (const std::exception& e) {
        if (error)
            *error = e.what();
        return std::nullopt;
    }
}

}  // namespace bpn::testing
