// bpn: validate, refine, check, simulate and draw business process nets.

#include <bpn/bpn.h>

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_invalid = 1;
constexpr int exit_rule = 3;
constexpr int exit_usage = 64;

struct UsageError {
    std::string message;
};

struct Failure {
    int code;
};

bool use_color()
{
    const char* env = std::getenv("BPN_COLOR");
    std::string mode = env ? env : "auto";
    if (mode == "always")
        return true;
    if (mode == "never")
        return false;
    return isatty(fileno(stderr)) != 0;
}

void diagnostic(const std::string& message)
{
    if (use_color())
        std::cerr << "\033[1;31merror:\033[0m " << message << "\n";
    else
        std::cerr << "error: " << message << "\n";
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError{"cannot read '" + path + "'"};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Reports the library's last error and aborts the command.
[[noreturn]] void raise(int code)
{
    std::string message = bpn_last_error();
    std::string kind = bpn_last_error_code();
    if (!kind.empty() && message.find(kind) == std::string::npos)
        message = kind + ": " + message;
    diagnostic(message);
    throw Failure{code};
}

struct ModelDeleter {
    void operator()(bpn_model* m) const { bpn_model_free(m); }
};
struct ScriptDeleter {
    void operator()(bpn_script* s) const { bpn_script_free(s); }
};
struct StringDeleter {
    void operator()(char* s) const { bpn_string_free(s); }
};
using ModelPtr = std::unique_ptr<bpn_model, ModelDeleter>;
using ScriptPtr = std::unique_ptr<bpn_script, ScriptDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

ModelPtr load_model(const std::string& path)
{
    std::string text = read_file(path);
    bpn_model* m = nullptr;
    if (bpn_model_parse(text.c_str(), path.c_str(), &m) != BPN_OK)
        raise(exit_invalid);
    return ModelPtr(m);
}

ScriptPtr load_script(const std::string& path)
{
    std::string text = read_file(path);
    bpn_script* s = nullptr;
    if (bpn_script_parse(text.c_str(), path.c_str(), &s) != BPN_OK)
        raise(exit_invalid);
    return ScriptPtr(s);
}

std::string take(char* s)
{
    StringPtr holder(s);
    return s ? std::string(s) : std::string();
}

int cmd_validate(const std::string& model_file)
{
    auto model = load_model(model_file);
    char* report = nullptr;
    size_t count = 0;
    if (bpn_model_validate(model.get(), &report, &count) != BPN_OK)
        raise(exit_invalid);
    std::cout << take(report);
    return count == 0 ? exit_ok : exit_invalid;
}

int cmd_apply(const std::string& model_file, const std::string& script_file, const std::string& output)
{
    auto model = load_model(model_file);
    auto script = load_script(script_file);
    bpn_model* refined = nullptr;
    char* lines = nullptr;
    if (bpn_apply(model.get(), script.get(), &refined, &lines) != BPN_OK) {
        int code = bpn_last_error_step() ? exit_rule : exit_invalid;
        raise(code);
    }
    ModelPtr holder(refined);
    std::string refinements = take(lines);
    char* text = nullptr;
    if (bpn_model_print(refined, &text) != BPN_OK)
        raise(exit_invalid);
    std::string printed = take(text);
    if (output.empty() || output == "-") {
        std::cout << printed;
        std::cerr << refinements;
    } else {
        std::ofstream out(output, std::ios::binary);
        if (!(out << printed))
            throw UsageError{"cannot write '" + output + "'"};
        std::cout << refinements;
    }
    return exit_ok;
}

int cmd_check(const std::string& base_file, const std::string& refined_file, const std::string& script_file)
{
    auto base = load_model(base_file);
    auto refined = load_model(refined_file);
    auto script = load_script(script_file);
    bpn_verdict verdict = BPN_DOES_NOT_MATCH;
    char* detail = nullptr;
    if (bpn_check(base.get(), refined.get(), script.get(), &verdict, &detail) != BPN_OK)
        raise(exit_invalid);
    std::string text = take(detail);
    switch (verdict) {
    case BPN_REFINES:
        std::cout << "Refines: " << text << "\n";
        break;
    case BPN_DOES_NOT_MATCH:
        std::cout << "DoesNotMatch: " << text << "\n";
        break;
    case BPN_SCRIPT_FAILS:
        std::cout << "ScriptFails: " << text << "\n";
        break;
    }
    return static_cast<int>(verdict);
}

int cmd_simulate(const std::string& model_file, const std::string& env_file, size_t trials, uint64_t seed,
                 bool show_trace)
{
    auto model = load_model(model_file);
    std::string env = read_file(env_file);
    char* outputs = nullptr;
    char* trace = nullptr;
    if (bpn_simulate(model.get(), env.c_str(), &outputs, show_trace ? &trace : nullptr) != BPN_OK)
        raise(exit_invalid);
    std::cout << take(outputs);
    if (show_trace)
        std::cerr << take(trace);
    if (trials > 1) {
        int confluent = 0;
        if (bpn_check_confluence(model.get(), env.c_str(), trials, seed, &confluent) != BPN_OK)
            raise(exit_invalid);
        std::cout << (confluent ? "PASS" : "FAIL") << " confluence over " << trials << " trials\n";
        return confluent ? exit_ok : exit_invalid;
    }
    return exit_ok;
}

int cmd_export_dot(const std::string& model_file, const std::string& net, int depth)
{
    auto model = load_model(model_file);
    char* dot = nullptr;
    if (bpn_export_dot(model.get(), net.empty() ? nullptr : net.c_str(), depth, &dot) != BPN_OK)
        raise(exit_invalid);
    std::cout << take(dot);
    return exit_ok;
}

int cmd_fmt(const std::string& file, bool script)
{
    char* text = nullptr;
    if (script) {
        auto s = load_script(file);
        if (bpn_script_print(s.get(), &text) != BPN_OK)
            raise(exit_invalid);
    } else {
        auto m = load_model(file);
        if (bpn_model_print(m.get(), &text) != BPN_OK)
            raise(exit_invalid);
    }
    std::cout << take(text);
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Business process nets: validation, refinement, checking and simulation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", bpn_version());

    std::string model_file, script_file, output, base_file, refined_file, env_file, net;
    size_t trials = 1;
    uint64_t seed = 0;
    int depth = 1;
    bool show_trace = false;
    bool fmt_script = false;

    auto* validate = app.add_subcommand("validate", "Report constraint violations");
    validate->add_option("model", model_file, "Model file (.bpn)")->required();

    auto* apply = app.add_subcommand("apply", "Apply a refinement script");
    apply->add_option("model", model_file, "Model file (.bpn)")->required();
    apply->add_option("script", script_file, "Script file (.bps)")->required();
    apply->add_option("output", output, "Where to write the refined model (default: standard output)");

    auto* check = app.add_subcommand("check", "Check that a script derives the refined model");
    check->add_option("base", base_file, "Base model (.bpn)")->required();
    check->add_option("refined", refined_file, "Refined model (.bpn)")->required();
    check->add_option("script", script_file, "Script file (.bps)")->required();

    auto* simulate = app.add_subcommand("simulate", "Run the greedy dataflow simulation");
    simulate->add_option("model", model_file, "Model file (.bpn)")->required();
    simulate->add_option("env", env_file, "Environment fragments")->required();
    simulate->add_option("--trials", trials, "Randomized schedules for the confluence check")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "Seed for the randomized schedules");
    simulate->add_flag("--trace", show_trace, "Print the firing order to standard error");

    auto* dot = app.add_subcommand("export-dot", "Render a net as Graphviz DOT");
    dot->add_option("model", model_file, "Model file (.bpn)")->required();
    dot->add_option("--net", net, "Process whose net is drawn (default: root)");
    dot->add_option("--depth", depth, "Levels of nested nets to draw")->check(CLI::PositiveNumber);

    auto* fmt = app.add_subcommand("fmt", "Print a model (or script) in canonical form");
    fmt->add_option("file", model_file, "Model file (.bpn) or script (.bps)")->required();
    fmt->add_flag("--script", fmt_script, "Treat the file as a script");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*validate)
            return cmd_validate(model_file);
        if (*apply)
            return cmd_apply(model_file, script_file, output);
        if (*check)
            return cmd_check(base_file, refined_file, script_file);
        if (*simulate)
            return cmd_simulate(model_file, env_file, trials, seed, show_trace);
        if (*dot)
            return cmd_export_dot(model_file, net, depth);
        if (*fmt) {
            bool script = fmt_script || (model_file.size() > 4 && model_file.substr(model_file.size() - 4) == ".bps");
            return cmd_fmt(model_file, script);
        }
    } catch (const UsageError& e) {
        diagnostic(e.message);
        return exit_usage;
    } catch (const Failure& f) {
        return f.code;
    }
    return exit_usage;
}
