// nlsg_cli run <config-file|builtin>, list, describe <builtin>.
// Exit codes: 0 all checks pass, 1 a check failed, 2 parse error, 3 validation error.

#include "nlsg/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <iostream>

namespace {

constexpr int exit_check_failed = 1;
constexpr int exit_parse_error = 2;
constexpr int exit_validation_error = 3;

std::filesystem::path output_root(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("NLSG_OUTPUT_ROOT")) return env;
    return "nlsg_output";
}

nlsg::ExperimentConfig resolve(const std::string& target) {
    if (std::filesystem::exists(target)) return nlsg::load_config(target);
    if (auto c = nlsg::find_builtin(target)) return *c;
    throw nlsg::ConfigParseError(0, 0, "'" + target + "' is neither a config file nor a built-in experiment");
}

int run(const std::string& target, const std::string& out_flag) {
    try {
        const auto config = resolve(target);
        nlsg::validate(config);
        const auto dir = output_root(out_flag) / config.output_dir();
        const auto start = std::chrono::steady_clock::now();
        const auto summary = nlsg::run_experiment(config, dir);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        nlsg::print_summary(std::cout, summary);
        std::cout << "artifacts in " << dir.string() << " (" << elapsed.count() << " s)\n";
        return summary.pass() ? 0 : exit_check_failed;
    } catch (const nlsg::ConfigParseError& e) {
        std::cerr << target << ":" << e.what() << "\n";
        return exit_parse_error;
    } catch (const nlsg::ConfigValidationError& e) {
        std::cerr << "invalid config field " << e.what() << "\n";
        return exit_validation_error;
    } catch (const nlsg::input_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return exit_validation_error;
    } catch (const std::exception& e) {
        std::cerr << "FAIL " << e.what() << "\n";
        return exit_check_failed;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chernoff-type limit experiments for convex expectations"};
    app.require_subcommand(1);

    std::string target, out_flag, name;
    auto* run_cmd = app.add_subcommand("run", "run a config file or a built-in experiment");
    run_cmd->add_option("config", target, "config path or built-in name")->required();
    run_cmd->add_option("-o,--output", out_flag, "output root (default: $NLSG_OUTPUT_ROOT or ./nlsg_output)");

    auto* list_cmd = app.add_subcommand("list", "list the built-in experiments");
    auto* describe_cmd = app.add_subcommand("describe", "print a built-in experiment as a config file");
    describe_cmd->add_option("name", name, "built-in name")->required();

    CLI11_PARSE(app, argc, argv);

    if (*run_cmd) return run(target, out_flag);
    if (*list_cmd) {
        for (const auto& c : nlsg::builtin_experiments())
            std::cout << c.name << "\t" << to_string(c.kind) << "\t" << c.description << "\n";
        return 0;
    }
    if (*describe_cmd) {
        const auto c = nlsg::find_builtin(name);
        if (!c) {
            std::cerr << "unknown built-in experiment '" << name << "'\n";
            return exit_validation_error;
        }
        std::cout << "# " << c->description << "\n" << nlsg::serialize(*c);
        return 0;
    }
    return 0;
}
