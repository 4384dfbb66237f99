#include <algorithm>
#include <random>

#include "doctest.h"
#include "refine/apply.hpp"
#include "sim/sim.hpp"
#include "support/support.hpp"
#include "textio/textio.hpp"

using namespace bpn;
using bpn::testing::fixture_path;
using bpn::testing::load_fixture;
using bpn::testing::read_text;

namespace {

std::vector<sim::Fragment> env(const Model& m, const std::string& text)
{
    return sim::resolve_fragments(m, textio::parse_fragments(text));
}

std::string outputs(const Model& m, const std::string& env_text)
{
    return textio::print_fragments(sim::describe_fragments(m, sim::simulate_greedy(m, env(m, env_text)).outputs));
}

ErrorCode sim_error(const Model& m, const std::string& env_text)
{
    try {
        sim::simulate_greedy(m, env(m, env_text));
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("simulation succeeded");
    return ErrorCode::StepFailed;
}

std::vector<std::string> trace_names(const sim::SimResult& r)
{
    std::vector<std::string> out;
    for (const auto& f : r.trace)
        out.push_back(f.process + "#" + std::to_string(f.rule));
    return out;
}

}  // namespace

TEST_CASE("library pipeline")
{
    Model m = load_fixture("library.bpn");
    auto r = sim::simulate_greedy(m, env(m, "book_id = b42"));
    CHECK(trace_names(r) == std::vector<std::string>{"retrieve-book#0", "reserve-book#0", "notify-user#0"});
    CHECK(textio::print_fragments(sim::describe_fragments(m, r.outputs)) == "notice whole = b42\n");
    CHECK(outputs(m, "") == "");
}

TEST_CASE("black box and its refinements agree")
{
    for (const char* name : {"bp.bpn", "bp_decomposed.bpn", "bp_typed.bpn"}) {
        Model m = load_fixture(name);
        CHECK(outputs(m, "in_1 = a\nin_2 = b") == "out_1 whole = a+b\n");
        CHECK(outputs(m, "in_1 = b\nin_2 = a") == "out_1 whole = a+b\n");
    }
    Model split = load_fixture("bp_split.bpn");
    CHECK(outputs(split, "in_1 = a\nin_2 = b") == "book whole = a+b\nnote whole = a+b\n");
}

TEST_CASE("greedy: rules fire as soon as their inputs are present")
{
    Model decomposed_bp = load_fixture("bp_decomposed.bpn");
    auto r = sim::simulate_greedy(decomposed_bp, env(decomposed_bp, "in_1 = a"));
    CHECK(trace_names(r) == std::vector<std::string>{"bp1#0"});
    CHECK(r.outputs.empty());
}

TEST_CASE("outputs grow with the environment")
{
    std::mt19937_64 rng(6);
    for (const char* name : {"bp_decomposed.bpn", "bp_split.bpn", "library_decomposed.bpn"}) {
        Model m = load_fixture(name);
        std::vector<sim::Fragment> full;
        for (PortId p : m.process(m.root).inputs)
            full.push_back(sim::Fragment{p, "whole", m.port(p).name + "v"});
        for (int mask = 0; mask < (1 << full.size()); ++mask) {
            std::vector<sim::Fragment> sub;
            for (std::size_t i = 0; i < full.size(); ++i)
                if (mask & (1 << i))
                    sub.push_back(full[i]);
            auto small = sim::simulate_greedy(m, sub).outputs;
            auto large = sim::simulate_greedy(m, full).outputs;
            std::vector<std::pair<PortId, std::string>> small_keys, large_keys;
            for (const auto& f : small)
                small_keys.emplace_back(f.port, f.label);
            for (const auto& f : large)
                large_keys.emplace_back(f.port, f.label);
            std::sort(small_keys.begin(), small_keys.end());
            std::sort(large_keys.begin(), large_keys.end());
            CHECK(std::includes(large_keys.begin(), large_keys.end(), small_keys.begin(), small_keys.end()));
        }
    }
}

TEST_CASE("compute functions")
{
    Model m = textio::parse_model("process p { in a b; out x y }\n"
                                  "rule p : needs {b, a} produces {x} using concat\n"
                                  "rule p : needs {a, b} produces {y}\n");
    CHECK(outputs(m, "a = 2+1\nb = 3") == "x whole = 3+2+1\ny whole = 1+2+3\n");
    Model bad = textio::parse_model("process p { in a; out x }\nrule p : needs {a} produces {x} using magic\n");
    CHECK(sim_error(bad, "a = 1") == ErrorCode::InvalidRule);
}

TEST_CASE("record fragments")
{
    Model m = textio::parse_model("sort A\nsort B\nsort R = record { f: A, g: B }\n"
                                  "process p { in r : R; out f : A; out g : B }\n"
                                  "rule p : needs {r.f} produces {f}\n"
                                  "rule p : needs {r.g} produces {g}\n");
    CHECK(outputs(m, "r f = x") == "f whole = x\n");
    CHECK(outputs(m, "r f = x\nr g = y") == "f whole = x\ng whole = y\n");
    CHECK(outputs(m, "r = xy") == "");
    CHECK(sim::valid_labels(m.port(m.require_port("p", "r"))) == std::vector<std::string>{"whole", "f", "g"});
    CHECK(sim_error(m, "r h = x") == ErrorCode::InvalidEnvFragment);
    CHECK(sim_error(m, "r f = x\nr = y") == ErrorCode::InvalidEnvFragment);
    CHECK(sim_error(m, "r f = x\nr f = y") == ErrorCode::InvalidEnvFragment);
    CHECK_THROWS_AS(env(m, "nowhere = x"), Error);
}

TEST_CASE("two rules producing the same fragment are rejected")
{
    Model m = textio::parse_model("process p { in a b; out x }\n"
                                  "rule p : needs {a} produces {x}\n"
                                  "rule p : needs {b} produces {x}\n");
    CHECK(sim_error(m, "a = 1") == ErrorCode::NonDeterministicRules);
    Model overlap = textio::parse_model("sort A\nsort R = record { f: A, g: A }\n"
                                        "process p { in a b; out x : R }\n"
                                        "rule p : needs {a} produces {x}\n"
                                        "rule p : needs {b} produces {x.f}\n");
    CHECK(sim_error(overlap, "a = 1") == ErrorCode::NonDeterministicRules);
}

TEST_CASE("random schedules agree")
{
    for (const char* name : {"library_decomposed.bpn", "library_flat.bpn", "bp_split.bpn"}) {
        Model m = load_fixture(name);
        std::string env_text = read_text(fixture_path(std::string(name).rfind("library", 0) == 0 ? "library.env" : "bp.env"));
        CHECK(sim::check_confluence(m, env(m, env_text), 200, 1));
    }
    Model decomposed = load_fixture("library_decomposed.bpn");
    std::mt19937_64 rng(3);
    auto reference = sim::simulate_greedy(decomposed, env(decomposed, "book_id = q"));
    std::set<std::vector<std::string>> orders;
    for (int i = 0; i < 100; ++i) {
        auto r = sim::simulate_greedy(decomposed, env(decomposed, "book_id = q"), &rng);
        CHECK(r.outputs == reference.outputs);
        orders.insert(trace_names(r));
    }
    CHECK(orders.size() > 1);
}

TEST_CASE("flatten leaves only leaves below the root")
{
    Model flat = sim::flatten(load_fixture("bp_split.bpn"));
    CHECK(flat.nets.size() == 1);
    for (ProcessId p : flat.subnet(flat.root).net.processes)
        CHECK_FALSE(flat.has_net(p));
    CHECK(flat.find_process("bp21"));
    CHECK_FALSE(flat.find_process("bp2"));
}
