#include <random>

#include "check/check.hpp"
#include "doctest.h"
#include "support/support.hpp"
#include "textio/textio.hpp"

using namespace bpn;
using bpn::testing::load_fixture;
using bpn::testing::load_script_fixture;

TEST_CASE("isomorphism ignores ids and port order")
{
    std::mt19937_64 rng(4);
    for (const char* name : {"library.bpn", "library_decomposed.bpn", "bp_split.bpn"}) {
        Model m = load_fixture(name);
        for (int k = 0; k < 5; ++k) {
            Model r = bpn::testing::rename_ids(m, rng);
            auto iso = check::model_isomorphic(m, r);
            REQUIRE(iso);
            CHECK(check::verify_isomorphism(m, r, *iso));
            CHECK(iso->process_map.size() == m.processes.size());
            CHECK(iso->port_map.size() == m.ports.size());
        }
    }
}

TEST_CASE("isomorphism notices every attribute")
{
    Model m = load_fixture("library.bpn");
    Model sorted = m;
    sorted.port(sorted.require_port("reserve-book", "out_2")).sort = Sort::atomic("Book");
    CHECK_FALSE(check::model_isomorphic(m, sorted));

    Model renamed = m;
    renamed.process(renamed.require_process("notify-user")).name = "notify";
    CHECK_FALSE(check::model_isomorphic(m, renamed));

    Model rewired = m;
    rewired.subnet(rewired.root).net.env_outputs.clear();
    CHECK_FALSE(check::model_isomorphic(m, rewired));

    Model ruled = m;
    ruled.process(ruled.require_process("notify-user")).firing_rules.clear();
    CHECK_FALSE(check::model_isomorphic(m, ruled));

    Model noted = m;
    noted.process(noted.root).behavior_note = "other";
    CHECK_FALSE(check::model_isomorphic(m, noted));

    CHECK_FALSE(check::verify_isomorphism(m, m, check::Isomorphism{}));
}

TEST_CASE("check_refinement verdicts")
{
    Model bp = load_fixture("bp.bpn");
    auto ok = check::check_refinement(bp, load_fixture("bp_split.bpn"), load_script_fixture("bp_split.bps"));
    CHECK(ok.status == check::VerdictStatus::Refines);
    CHECK(ok.witness.has_value());
    CHECK(ok.trace.has_value());
    CHECK(check::exit_code(ok.status) == 0);

    auto mismatch = check::check_refinement(bp, load_fixture("bp_decomposed.bpn"), load_script_fixture("bp_typed.bps"));
    CHECK(mismatch.status == check::VerdictStatus::DoesNotMatch);
    CHECK(mismatch.detail.rfind("line ", 0) == 0);
    CHECK(mismatch.detail.find("expected") != std::string::npos);
    CHECK_FALSE(mismatch.witness);
    CHECK(check::exit_code(mismatch.status) == 2);

    auto fails = check::check_refinement(bp, bp, textio::parse_script("unfold bp"));
    CHECK(fails.status == check::VerdictStatus::ScriptFails);
    CHECK(fails.failed_step == 1);
    CHECK(fails.detail.find("NoSuchChild") != std::string::npos);
    CHECK(check::exit_code(fails.status) == 3);
    CHECK(check::to_string(fails.status) == "ScriptFails");
}

TEST_CASE("brute force finds the one-step sort assignment")
{
    Model bp = load_fixture("bp.bpn");
    auto script = check::brute_force_derivable(bp, load_fixture("bp_typed.bpn"));
    REQUIRE(script);
    REQUIRE(script->steps.size() == 1);
    CHECK(refine::format_step(script->steps[0].step) == "assign-sort bp.out_1 : Reservation");
}

TEST_CASE("brute force with no steps accepts only the same model")
{
    Model bp = load_fixture("bp.bpn");
    auto same = check::brute_force_derivable(bp, bp, check::SearchOptions{0, 1000});
    REQUIRE(same);
    CHECK(same->steps.empty());
    CHECK_FALSE(check::brute_force_derivable(bp, load_fixture("bp_typed.bpn"), check::SearchOptions{0, 1000}));
}

TEST_CASE("brute force rejects a refined model with an unrelated extra net")
{
    Model bp = load_fixture("bp.bpn");
    Model target = load_fixture("bp_decomposed.bpn");
    Model extra = textio::parse_model(textio::print_model(target) +
                                      "process stray { in s; out t }\n"
                                      "net for bp1 { members stray\n input stray.s binds in_1\n output stray.t binds out_1 }\n");
    CHECK(check::brute_force_derivable(bp, target, check::SearchOptions{1, 200000}));
    CHECK_FALSE(check::brute_force_derivable(bp, extra, check::SearchOptions{1, 200000}));
    CHECK(check::brute_force_derivable(bp, extra, check::SearchOptions{2, 200000}));
}

TEST_CASE("brute force reports an exhausted budget")
{
    Model bp = load_fixture("bp.bpn");
    try {
        check::brute_force_derivable(bp, load_fixture("bp_split.bpn"), check::SearchOptions{3, 10});
        FAIL("search finished");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SearchBudgetExceeded);
    }
}

TEST_CASE("candidate steps cover every rule the target suggests")
{
    Model bp = load_fixture("bp.bpn");
    std::set<std::string> kinds;
    for (const auto& s : check::candidate_steps(bp, load_fixture("bp_decomposed.bpn")))
        kinds.insert(std::string(refine::rule_name(s)));
    CHECK(kinds.count("decompose") == 1);
    CHECK(kinds.count("assign-sort") == 1);
}

TEST_CASE("one random step is always rediscovered")
{
    std::mt19937_64 rng(8);
    bpn::testing::GenConfig cfg;
    cfg.max_levels = 2;
    cfg.max_per_net = 3;
    for (int i = 0; i < 15; ++i) {
        Model base = bpn::testing::generate_model(rng, cfg);
        int counter = 0;
        std::optional<Model> refined;
        std::string applied;
        while (!refined) {
            auto step = bpn::testing::random_step(rng, base, counter);
            try {
                refined = refine::apply_step(base, step).model;
                applied = refine::format_step(step);
            } catch (const Error&) {
            }
        }
        CAPTURE(applied);
        auto script = check::brute_force_derivable(base, *refined);
        REQUIRE(script);
        CHECK(check::check_refinement(base, *refined, *script).status == check::VerdictStatus::Refines);
    }
}
