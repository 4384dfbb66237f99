#include <sstream>

#include "textio/parser.hpp"
#include "textio/textio.hpp"

namespace bpn::textio {

namespace {

class DotWriter {
public:
    DotWriter(const Model& m, std::ostringstream& os) : m_(m), os_(os) {}

    // Members of `owner`'s net, nesting clusters for decomposed members.
    void members(ProcessId owner, int depth, int indent)
    {
        const Subnet& sub = m_.subnet(owner);
        std::string pad(indent, ' ');
        for (ProcessId p : sub.net.processes) {
            if (expanded(p, depth)) {
                os_ << pad << "subgraph cluster_" << p.value << " {\n";
                os_ << pad << "  label=" << quote(m_.process_name(p)) << ";\n";
                members(p, depth - 1, indent + 2);
                os_ << pad << "}\n";
            } else {
                os_ << pad << node(p) << " [label=" << quote(m_.process_name(p)) << "];\n";
            }
        }
        for (const Channel& c : sub.net.channels)
            edges_.push_back(node(image(c.source, depth)) + " -> " + node(image(c.dest, depth)) +
                             attributes(c.source, c.dest));
    }

    void half_edges(ProcessId owner, int depth)
    {
        const Subnet& sub = m_.subnet(owner);
        for (PortId p : sub.net.env_inputs) {
            std::string src = "env_in_" + std::to_string(p.value);
            os_ << "  " << src << " [shape=point];\n";
            edges_.push_back(src + " -> " + node(image(p, depth)) + attributes(p, p));
        }
        for (PortId p : sub.net.env_outputs) {
            std::string dst = "env_out_" + std::to_string(p.value);
            os_ << "  " << dst << " [shape=point];\n";
            edges_.push_back(node(image(p, depth)) + " -> " + dst + attributes(p, p));
        }
    }

    void flush()
    {
        for (const auto& e : edges_)
            os_ << "  " << e << ";\n";
    }

private:
    bool expanded(ProcessId p, int depth) const { return depth > 1 && m_.has_net(p); }

    // Leaf port reached by following bindings into expanded members.
    PortId image(PortId port, int depth) const
    {
        for (int guard = 0; guard < 1000; ++guard) {
            ProcessId owner = m_.port(port).owner;
            if (!expanded(owner, depth))
                return port;
            const auto& mapping = m_.subnet(owner).binding.mapping;
            auto it = mapping.find(port);
            if (it == mapping.end())
                return port;
            port = it->second;
            --depth;
        }
        return port;
    }

    std::string node(ProcessId p) const { return "p" + std::to_string(p.value); }
    std::string node(PortId port) const { return node(m_.port(port).owner); }

    std::string attributes(PortId a, PortId b) const
    {
        const auto& sa = m_.port(a).sort;
        const auto& sb = m_.port(b).sort;
        const auto& s = sa ? sa : sb;
        return s ? " [label=" + quote(render_sort(*s, m_.sorts)) + "]" : "";
    }

    const Model& m_;
    std::ostringstream& os_;
    std::vector<std::string> edges_;
};

}  // namespace

std::string export_dot(const Model& model, ProcessId owner, int depth)
{
    model.subnet(owner);
    std::ostringstream os;
    os << "digraph " << quote(model.process_name(owner)) << " {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=box];\n";
    DotWriter w(model, os);
    w.members(owner, std::max(depth, 1), 2);
    w.half_edges(owner, std::max(depth, 1));
    w.flush();
    os << "}\n";
    return os.str();
}

}  // namespace bpn::textio
