#include <algorithm>
#include <numeric>
#include <random>

#include "core/validate.hpp"
#include "doctest.h"
#include "support/support.hpp"
#include "textio/textio.hpp"

using namespace bpn;
using bpn::testing::load_fixture;

namespace {

std::vector<ViolationCode> codes(const std::vector<Violation>& v)
{
    std::vector<ViolationCode> out;
    for (const auto& x : v)
        out.push_back(x.code);
    return out;
}

bool contains(const std::vector<ViolationCode>& v, ViolationCode c) { return std::find(v.begin(), v.end(), c) != v.end(); }

}  // namespace

TEST_CASE("sorts compare structurally")
{
    Sort r1 = Sort::record({{"a", Sort::atomic("A")}, {"b", Sort::sequence(Sort::atomic("B"))}});
    Sort r2 = Sort::record({{"a", Sort::atomic("A")}, {"b", Sort::sequence(Sort::atomic("B"))}});
    Sort r3 = Sort::record({{"a", Sort::atomic("A")}, {"b", Sort::set(Sort::atomic("B"))}});
    CHECK(r1 == r2);
    CHECK_FALSE(r1 == r3);
    CHECK(sort_well_formed(r1));
    CHECK_FALSE(sort_well_formed(Sort::record({{"a", Sort::atomic("A")}, {"a", Sort::atomic("B")}})));
    CHECK(sorts_compatible(std::nullopt, r1));
    CHECK(sorts_compatible(r1, std::nullopt));
    CHECK_FALSE(sorts_compatible(Sort::atomic("A"), Sort::atomic("B")));
    CHECK(to_string(r1) == "record { a: A, b: seq B }");
    REQUIRE(r1.field("b"));
    CHECK(*r1.field("b") == Sort::sequence(Sort::atomic("B")));
    CHECK(r1.field("c") == nullptr);
}

TEST_CASE("render_sort prefers table names")
{
    SortTable table;
    table["A"] = Sort::atomic("A");
    table["Pair"] = Sort::record({{"x", Sort::atomic("A")}, {"y", Sort::atomic("A")}});
    CHECK(render_sort(table["Pair"], table) == "Pair");
    CHECK(render_sort(table["Pair"], table, false) == "record { x: A, y: A }");
    CHECK(render_sort(Sort::sequence(table["Pair"]), table) == "seq Pair");
    CHECK(alias_of(table["Pair"], table) == std::optional<std::string>("Pair"));
    CHECK_FALSE(alias_of(Sort::atomic("Z"), table));
}

TEST_CASE("model lookups")
{
    Model m = load_fixture("library.bpn");
    CHECK(m.process_name(m.root) == "library");
    PortId p = m.require_port("reserve-book", "out_2");
    CHECK(m.port_label(p) == "out_2^{reserve-book}");
    CHECK(m.port_path(p) == "reserve-book.out_2");
    CHECK(m.container_of(m.require_process("notify-user")) == m.root);
    CHECK_FALSE(m.container_of(m.root));
    CHECK_THROWS_AS(m.require_process("nobody"), Error);
    try {
        m.require_port("library", "nothing");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownPort);
    }
    try {
        m.subnet(m.require_process("notify-user"));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoNet);
    }
}

TEST_CASE("constraint fixtures are classified")
{
    const std::vector<std::pair<std::string, ViolationCode>> table = {
        {"c1", ViolationCode::InputBothInternalAndEnv},
        {"c2", ViolationCode::InputMultiplyDriven},
        {"c3", ViolationCode::SortMismatch},
        {"c4", ViolationCode::CycleDetected},
        {"totality", ViolationCode::InputUnconnected},
        {"selfloop", ViolationCode::SelfLoop},
        {"hierarchy", ViolationCode::HierarchyNotTree},
    };
    for (const auto& [name, code] : table) {
        CAPTURE(name);
        CHECK(validate_model(load_fixture("constraints/" + name + "_holds.bpn")).empty());
        auto v = validate_model(load_fixture("constraints/" + name + "_violated.bpn"));
        CHECK(contains(codes(v), code));
        for (const auto& x : v)
            CHECK_FALSE(x.location.empty());
    }
}

TEST_CASE("a two-process cycle is reported once with both members")
{
    auto v = validate_model(load_fixture("constraints/c4_violated.bpn"));
    REQUIRE(v.size() == 1);
    CHECK(v[0].code == ViolationCode::CycleDetected);
    std::string line = format_violation(v[0]);
    CHECK(line.rfind("CycleDetected ", 0) == 0);
    CHECK(line.find('a') != std::string::npos);
    CHECK(line.find('b') != std::string::npos);
}

TEST_CASE("self loop is also a cycle")
{
    auto c = codes(validate_model(load_fixture("constraints/selfloop_violated.bpn")));
    CHECK(contains(c, ViolationCode::SelfLoop));
    CHECK(contains(c, ViolationCode::CycleDetected));
}

TEST_CASE("example fixtures are well formed")
{
    for (const char* name : {"library.bpn", "library_decomposed.bpn", "library_flat.bpn", "bp.bpn", "bp_decomposed.bpn",
                             "bp_typed.bpn", "bp_split.bpn"}) {
        CAPTURE(name);
        CHECK(validate_model(load_fixture(name)).empty());
    }
}

TEST_CASE("serialize_order on the library chain is the only consistent ranking")
{
    Model m = load_fixture("library.bpn");
    auto order = serialize_order(m, m.root);
    std::vector<ProcessId> procs{m.require_process("retrieve-book"), m.require_process("reserve-book"),
                                 m.require_process("notify-user")};
    CHECK(order.at(procs[0]) == 1);
    CHECK(order.at(procs[1]) == 2);
    CHECK(order.at(procs[2]) == 3);

    // Every bijection onto 1..3, checked against the channels.
    const ProcessNet& net = m.subnet(m.root).net;
    std::vector<unsigned> ranks{1, 2, 3};
    int consistent = 0;
    do {
        std::map<ProcessId, unsigned> candidate;
        for (std::size_t i = 0; i < procs.size(); ++i)
            candidate[procs[i]] = ranks[i];
        bool ok = std::all_of(net.channels.begin(), net.channels.end(), [&](const Channel& c) {
            return candidate.at(m.port(c.source).owner) < candidate.at(m.port(c.dest).owner);
        });
        if (ok) {
            ++consistent;
            CHECK(candidate == order);
        }
    } while (std::next_permutation(ranks.begin(), ranks.end()));
    CHECK(consistent == 1);
}

TEST_CASE("serialize_order is injective and increases along channels")
{
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        std::vector<std::pair<int, int>> edges;
        int n = std::uniform_int_distribution<int>(1, 7)(rng);
        Model m = bpn::testing::random_port_graph(rng, n, std::uniform_int_distribution<int>(0, 8)(rng), &edges);
        if (bpn::testing::has_cycle_exhaustive(n, edges))
            continue;
        auto order = serialize_order(m, m.root);
        std::set<unsigned> seen;
        for (const auto& [p, r] : order)
            seen.insert(r);
        CHECK(seen.size() == static_cast<std::size_t>(n));
        CHECK(*seen.begin() == 1);
        CHECK(*seen.rbegin() == static_cast<unsigned>(n));
        for (const Channel& c : m.subnet(m.root).net.channels)
            CHECK(order.at(m.port(c.source).owner) < order.at(m.port(c.dest).owner));
    }
}

TEST_CASE("cycle witness follows real channels")
{
    std::mt19937_64 rng(2);
    int cyclic = 0;
    for (int i = 0; i < 200; ++i) {
        std::vector<std::pair<int, int>> edges;
        int n = std::uniform_int_distribution<int>(1, 6)(rng);
        Model m = bpn::testing::random_port_graph(rng, n, std::uniform_int_distribution<int>(1, 10)(rng), &edges);
        if (!bpn::testing::has_cycle_exhaustive(n, edges))
            continue;
        ++cyclic;
        try {
            serialize_order(m, m.root);
            FAIL("cycle not detected");
        } catch (const CycleError& e) {
            CHECK(e.code() == ErrorCode::CycleDetected);
            const auto& w = e.witness();
            REQUIRE_FALSE(w.empty());
            auto graph = dependency_graph(m, m.subnet(m.root).net);
            for (std::size_t k = 0; k < w.size(); ++k) {
                ProcessId a = m.require_process(w[k]);
                ProcessId b = m.require_process(w[(k + 1) % w.size()]);
                CHECK(graph[a].count(b) == 1);
            }
        }
    }
    CHECK(cyclic > 20);
}

TEST_CASE("abstract_net gives the boundary")
{
    Model m = load_fixture("library.bpn");
    auto [in, out] = abstract_net(m, m.root);
    CHECK(in == std::set<PortId>{m.require_port("retrieve-book", "in_1")});
    CHECK(out == std::set<PortId>{m.require_port("notify-user", "out_1")});
}

TEST_CASE("generated models are well formed")
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        Model m = bpn::testing::generate_model(rng);
        auto v = validate_model(m);
        CHECK(v.empty());
        CHECK(m.has_net(m.root));
        CHECK(m.subnet(m.root).net.processes.size() >= 2);
    }
}
