#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "mfbsde/errors.hpp"
#include "mfbsde/parallel.hpp"
#include "mfbsde/scenario.hpp"

namespace {

struct Options {
    std::string scenario;
    std::string out_dir;
    std::int64_t seed = -1;
    int threads = 0;
};

void add_common_options(CLI::App* cmd, Options& opts) {
    cmd->add_option("--scenario", opts.scenario, "Scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out_dir, "Directory for CSV profiles (skipped when unset)");
    cmd->add_option("--seed", opts.seed, "Override the scenario's simulation seed");
    cmd->add_option("--threads", opts.threads, "Worker thread cap, 0 uses all hardware threads");
}

int run(const std::string& task, const Options& opts) {
    mfbsde::set_max_threads(opts.threads);
    const mfbsde::Scenario scenario = mfbsde::load_scenario(opts.scenario);
    const mfbsde::RunResult result = mfbsde::run_task(task, scenario, opts.out_dir, opts.seed);
    std::cout << result.summary_json;
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for mean-field BSDEs with quadratic drivers"};
    app.require_subcommand(1);

    const std::pair<const char*, const char*> tasks[] = {
        {"solve", "Run the Picard iteration and report the discrete solution"},
        {"certify", "Evaluate the well-posedness constants and smallness checks"},
        {"compare", "Check the comparison principle between two scalar problems"},
        {"bmo", "Estimate the BMO-type norm of Z along the solved problem"},
        {"lemma-check", "Test the a priori bound on the Z norm for a bounded solution"},
        {"particles", "Solve the interacting particle system or run a convergence study"},
        {"oracle-diff", "Compare the solver against a closed-form reference solution"},
    };

    Options opts;
    for (const auto& [name, description] : tasks) {
        add_common_options(app.add_subcommand(name, description), opts);
    }

    CLI11_PARSE(app, argc, argv);

    std::string task;
    for (const CLI::App* sub : app.get_subcommands()) task = sub->get_name();

    try {
        return run(task, opts);
    } catch (const mfbsde::Error& e) {
        nlohmann::ordered_json err;
        err["error"] = e.code();
        err["message"] = e.what();
        std::cerr << err.dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        nlohmann::ordered_json err;
        err["error"] = "internal";
        err["message"] = e.what();
        std::cerr << err.dump(2) << "\n";
        return 2;
    }
}
