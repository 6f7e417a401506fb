#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ppcqed/config.hpp"
#include "ppcqed/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Photon-pressure circuit QED toolkit"};
    std::string experiment;
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("experiment", experiment,
                   "estimate | chevron | spectrum | calibrate | fit-notch | fit-crossing | extract-g0 | pipeline")
        ->required();
    app.add_option("--config", config_path, "JSON experiment document")->required();
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--threads", threads, "worker threads (default: PPCQED_THREADS or 1)")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ppcqed::exit_config_error;
    }

    ppcqed::RunOptions options;
    if (!out.empty()) options.output = out;
    options.seed = seed;
    options.threads = 1;
    if (threads) {
        options.threads = *threads;
    } else if (const char* env = std::getenv("PPCQED_THREADS")) {
        options.threads = std::max(1, std::atoi(env));
    }
    options.log = &std::cout;

    std::optional<ppcqed::config::ExperimentKind> kind;
    try {
        kind = ppcqed::config::parse_kind(experiment);
    } catch (const ppcqed::config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ppcqed::exit_config_error;
    }
    return ppcqed::run_file(config_path, kind, options);
}
