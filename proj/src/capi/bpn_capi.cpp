#include "bpn/bpn.h"

#include <cstring>
#include <sstream>

#include "check/check.hpp"
#include "core/validate.hpp"
#include "refine/apply.hpp"
#include "sim/sim.hpp"
#include "textio/textio.hpp"

struct bpn_model {
    bpn::Model model;
};

struct bpn_script {
    bpn::refine::RefinementScript script;
};

namespace {

struct LastError {
    std::string message;
    std::string code;
    size_t step = 0;
};

thread_local LastError last_error;

bpn_status fail(bpn_status status, std::string message, std::string code = "", size_t step = 0)
{
    last_error = LastError{std::move(message), std::move(code), step};
    return status;
}

bpn_status status_for(bpn::ErrorCode code)
{
    using bpn::ErrorCode;
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateDefinition:
    case ErrorCode::UnknownSortName:
    case ErrorCode::UnknownRuleName:
    case ErrorCode::UnknownProcess:
    case ErrorCode::UnknownPort:
        return BPN_ERR_PARSE;
    case ErrorCode::NoNet:
        return BPN_ERR_NO_NET;
    case ErrorCode::CycleDetected:
    case ErrorCode::WouldBeIllFormed:
        return BPN_ERR_ILL_FORMED;
    case ErrorCode::InvalidEnvFragment:
    case ErrorCode::NonDeterministicRules:
    case ErrorCode::InvalidRule:
        return BPN_ERR_SIMULATION;
    case ErrorCode::SearchBudgetExceeded:
        return BPN_ERR_SEARCH_BUDGET;
    default:
        return BPN_ERR_RULE;
    }
}

template <typename F>
bpn_status guarded(F&& body)
{
    last_error = LastError{};
    try {
        body();
        return BPN_OK;
    } catch (const bpn::refine::StepError& e) {
        return fail(BPN_ERR_RULE, e.what(), std::string(bpn::to_string(e.cause())), e.index());
    } catch (const bpn::ParseError& e) {
        return fail(BPN_ERR_PARSE, e.what(), std::string(bpn::to_string(e.code())));
    } catch (const bpn::Error& e) {
        return fail(status_for(e.code()), e.what(), std::string(bpn::to_string(e.code())));
    } catch (const std::exception& e) {
        return fail(BPN_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(BPN_ERR_INTERNAL, "unknown failure");
    }
}

char* copy_string(const std::string& s)
{
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string join_lines(const std::vector<std::string>& lines)
{
    std::string out;
    for (const auto& l : lines)
        out += l + "\n";
    return out;
}

#define BPN_REQUIRE(cond)                                                   \
    do {                                                                    \
        if (!(cond))                                                        \
            return fail(BPN_ERR_ARGUMENT, "invalid argument: " #cond);      \
    } while (0)

}  // namespace

extern "C" {

const char* bpn_version(void) { return "1.0.0"; }

const char* bpn_last_error(void) { return last_error.message.c_str(); }

const char* bpn_last_error_code(void) { return last_error.code.c_str(); }

size_t bpn_last_error_step(void) { return last_error.step; }

void bpn_string_free(char* s) { delete[] s; }

bpn_status bpn_model_parse(const char* text, const char* file, bpn_model** out)
{
    BPN_REQUIRE(text && out);
    *out = nullptr;
    return guarded([&] { *out = new bpn_model{bpn::textio::parse_model(text, file ? file : "<input>")}; });
}

void bpn_model_free(bpn_model* model) { delete model; }

bpn_status bpn_model_print(const bpn_model* model, char** out)
{
    BPN_REQUIRE(model && out);
    return guarded([&] { *out = copy_string(bpn::textio::print_model(model->model)); });
}

const char* bpn_model_root(const bpn_model* model)
{
    if (!model)
        return "";
    auto it = model->model.processes.find(model->model.root);
    return it == model->model.processes.end() ? "" : it->second.name.c_str();
}

bpn_status bpn_model_validate(const bpn_model* model, char** report, size_t* count)
{
    BPN_REQUIRE(model && report);
    return guarded([&] {
        auto violations = bpn::validate_model(model->model);
        std::vector<std::string> lines;
        for (const auto& v : violations)
            lines.push_back(bpn::format_violation(v));
        *report = copy_string(join_lines(lines));
        if (count)
            *count = violations.size();
    });
}

bpn_status bpn_model_isomorphic(const bpn_model* a, const bpn_model* b, int* result)
{
    BPN_REQUIRE(a && b && result);
    return guarded([&] { *result = bpn::check::model_isomorphic(a->model, b->model).has_value() ? 1 : 0; });
}

bpn_status bpn_script_parse(const char* text, const char* file, bpn_script** out)
{
    BPN_REQUIRE(text && out);
    *out = nullptr;
    return guarded([&] { *out = new bpn_script{bpn::textio::parse_script(text, file ? file : "<input>")}; });
}

void bpn_script_free(bpn_script* script) { delete script; }

bpn_status bpn_script_print(const bpn_script* script, char** out)
{
    BPN_REQUIRE(script && out);
    return guarded([&] { *out = copy_string(bpn::textio::print_script(script->script)); });
}

size_t bpn_script_length(const bpn_script* script) { return script ? script->script.steps.size() : 0; }

bpn_status bpn_apply(const bpn_model* model, const bpn_script* script, bpn_model** out, char** refinements)
{
    BPN_REQUIRE(model && script && out);
    *out = nullptr;
    return guarded([&] {
        auto [refined, trace] = bpn::refine::apply_script(model->model, script->script);
        std::string lines = join_lines(bpn::refine::format_refinements(model->model, refined, trace));
        *out = new bpn_model{std::move(refined)};
        if (refinements)
            *refinements = copy_string(lines);
    });
}

bpn_status bpn_check(const bpn_model* base, const bpn_model* refined, const bpn_script* script,
                     bpn_verdict* verdict, char** detail)
{
    BPN_REQUIRE(base && refined && script && verdict);
    return guarded([&] {
        auto v = bpn::check::check_refinement(base->model, refined->model, script->script);
        *verdict = static_cast<bpn_verdict>(bpn::check::exit_code(v.status));
        if (detail)
            *detail = copy_string(v.detail);
    });
}

bpn_status bpn_derive(const bpn_model* base, const bpn_model* refined, size_t max_steps, size_t node_limit,
                      bpn_script** out)
{
    BPN_REQUIRE(base && refined && out);
    *out = nullptr;
    return guarded([&] {
        bpn::check::SearchOptions options;
        options.max_steps = max_steps;
        if (node_limit)
            options.node_limit = node_limit;
        if (auto s = bpn::check::brute_force_derivable(base->model, refined->model, options))
            *out = new bpn_script{std::move(*s)};
    });
}

bpn_status bpn_simulate(const bpn_model* model, const char* env_text, char** outputs, char** trace)
{
    BPN_REQUIRE(model && env_text && outputs);
    return guarded([&] {
        const auto& m = model->model;
        auto env = bpn::sim::resolve_fragments(m, bpn::textio::parse_fragments(env_text, "<env>"));
        auto result = bpn::sim::simulate_greedy(m, env);
        *outputs = copy_string(bpn::textio::print_fragments(bpn::sim::describe_fragments(m, result.outputs)));
        if (trace) {
            std::vector<std::string> lines;
            for (const auto& f : result.trace)
                lines.push_back(f.process + "#" + std::to_string(f.rule));
            *trace = copy_string(join_lines(lines));
        }
    });
}

bpn_status bpn_check_confluence(const bpn_model* model, const char* env_text, size_t trials, uint64_t seed,
                                int* confluent)
{
    BPN_REQUIRE(model && env_text && confluent && trials >= 1);
    return guarded([&] {
        auto env = bpn::sim::resolve_fragments(model->model, bpn::textio::parse_fragments(env_text, "<env>"));
        *confluent = bpn::sim::check_confluence(model->model, env, trials, seed) ? 1 : 0;
    });
}

bpn_status bpn_export_dot(const bpn_model* model, const char* owner, int depth, char** out)
{
    BPN_REQUIRE(model && out && depth >= 1);
    return guarded([&] {
        const auto& m = model->model;
        bpn::ProcessId id = owner ? m.require_process(owner) : m.root;
        *out = copy_string(bpn::textio::export_dot(m, id, depth));
    });
}

}  // extern "C"
