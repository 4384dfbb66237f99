#include <sstream>

#include "textio/parser.hpp"
#include "textio/textio.hpp"

namespace bpn::textio {

std::vector<FragmentLine> parse_fragments(std::string_view text, const std::string& file)
{
    std::vector<FragmentLine> out;
    std::istringstream in{std::string(text)};
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError(ErrorCode::ParseError, SourceSpan{file, n, static_cast<int>(first) + 1},
                             "expected 'port [label] = payload'");
        std::istringstream head(line.substr(0, eq));
        FragmentLine f;
        std::string extra;
        head >> f.port;
        if (!(head >> f.label))
            f.label = std::string(whole_label);
        if (f.port.empty() || (head >> extra))
            throw ParseError(ErrorCode::ParseError, SourceSpan{file, n, static_cast<int>(first) + 1},
                             "expected 'port [label] = payload'");
        std::string payload = line.substr(eq + 1);
        auto b = payload.find_first_not_of(" \t");
        auto e = payload.find_last_not_of(" \t");
        f.payload = b == std::string::npos ? "" : payload.substr(b, e - b + 1);
        out.push_back(std::move(f));
    }
    return out;
}

std::string print_fragments(const std::vector<FragmentLine>& lines)
{
    std::string out;
    for (const auto& f : lines) {
        out += f.port + " " + f.label + " = " + f.payload + "\n";
    }
    return out;
}

}  // namespace bpn::textio
