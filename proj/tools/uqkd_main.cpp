#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "uqkd/cli/runner.hpp"
#include "uqkd/cli/scenario.hpp"
#include "uqkd/errors.hpp"

namespace fs = std::filesystem;
using namespace uqkd;

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

fs::path scenario_dir() {
    if (const char* env = std::getenv("UQKD_SCENARIO_DIR")) return env;
    return UQKD_SCENARIO_DIR;
}

// A path that exists wins; otherwise a bare name is looked up among the bundled scenarios.
fs::path resolve(const std::string& arg) {
    if (fs::exists(arg)) return arg;
    const fs::path bundled = scenario_dir() / (arg + ".yaml");
    if (fs::exists(bundled)) return bundled;
    throw cli::IoError("no scenario file or bundled scenario named '" + arg + "'");
}

void print_errors(const cli::ScenarioError& e) {
    for (const auto& f : e.errors()) std::cerr << "error: " << f.field << ": " << f.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Security analysis for QKD with an untrusted source"};
    app.set_version_flag("--version", std::string(cli::kVersion));
    app.require_subcommand(1);

    std::string target;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha;
    std::string output;
    unsigned threads = 1;

    auto* run = app.add_subcommand("run", "Run a scenario and write its table");
    run->add_option("scenario", target, "Scenario file or bundled scenario name")->required();
    run->add_option("--seed", seed, "Override the Monte Carlo seed");
    run->add_option("--alpha", alpha, "Override the confidence parameter")->check(CLI::Range(0.0, 1.0));
    run->add_option("--output,-o", output, "Write the table here instead of the scenario's output or stdout");
    run->add_option("--threads,-j", threads, "Worker threads for Monte Carlo runs")->check(CLI::PositiveNumber);

    auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("scenario", target, "Scenario file or bundled scenario name")->required();

    app.add_subcommand("list-scenarios", "List bundled scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }

    try {
        if (app.got_subcommand("list-scenarios")) {
            std::vector<fs::path> found;
            if (fs::is_directory(scenario_dir()))
                for (const auto& entry : fs::directory_iterator(scenario_dir()))
                    if (entry.path().extension() == ".yaml") found.push_back(entry.path());
            std::sort(found.begin(), found.end());
            for (const auto& p : found) {
                const auto s = cli::load_scenario(p);
                std::cout << p.stem().string() << '\t' << cli::to_string(s.mode) << '\t' << s.description << '\n';
            }
            return kOk;
        }

        auto scenario = cli::load_scenario(resolve(target));

        if (app.got_subcommand("validate")) {
            std::cout << "ok: " << scenario.name << " (" << cli::to_string(scenario.mode) << ")\n";
            return kOk;
        }

        if (seed) scenario.seed = *seed;
        if (alpha) scenario.alpha = *alpha;
        if (!output.empty()) scenario.output = output;
        if (const auto errs = cli::check_scenario(scenario); !errs.empty()) throw cli::ScenarioError(errs);

        const auto report = cli::execute(scenario, threads);
        if (scenario.output) {
            std::ofstream out(*scenario.output);
            if (!out) throw cli::IoError("cannot write " + *scenario.output);
            cli::write_report(out, scenario, report);
            if (!out) throw cli::IoError("write failed for " + *scenario.output);
            cli::write_summary(std::cout, scenario, report);
        } else {
            cli::write_report(std::cout, scenario, report);
        }
        return kOk;
    } catch (const cli::ScenarioError& e) {
        print_errors(e);
        return kValidation;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const cli::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIo;
    }
}
