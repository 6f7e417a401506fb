#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "ppcqed/config.hpp"

namespace ppcqed {

inline constexpr const char* toolkit_version = "0.1.0";

enum ExitCode : int { exit_success = 0, exit_config_error = 1, exit_numerical_failure = 2 };

struct RunOptions {
    std::optional<std::filesystem::path> output;  // overrides the document
    std::optional<std::uint64_t> seed;            // overrides the document
    int threads = 1;
    std::ostream* log = nullptr;                  // summary and errors; null = silent
};

// Runs one experiment, writes its CSV files and manifest.json into the output
// directory, and returns the exit code.
int run(const config::ExperimentConfig& config, const RunOptions& options = {});

// Loads the document first; `expected` must match its experiment kind.
int run_file(const std::filesystem::path& path, std::optional<config::ExperimentKind> expected,
             const RunOptions& options = {});

}  // namespace ppcqed
