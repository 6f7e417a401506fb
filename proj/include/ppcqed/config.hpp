#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ppcqed/quantum_core.hpp"

namespace ppcqed::config {

using Json = nlohmann::json;

// Configuration problem; the message starts with the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string key, const std::string& what)
        : std::invalid_argument(key + ": " + what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

enum class ExperimentKind { Estimate, Chevron, Spectrum, Calibrate, FitNotch, FitCrossing, ExtractG0, Pipeline };

std::string_view kind_name(ExperimentKind kind);
ExperimentKind parse_kind(std::string_view name);

struct Truncation {
    int qubit_dim = 2;
    int resonator_dim = 5;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Estimate;
    std::filesystem::path output = ".";    // relative paths resolve against base_dir
    std::optional<std::uint64_t> seed;
    Truncation truncation;
    Json parameters = Json::object();
    std::filesystem::path base_dir = ".";  // directory of the document
    Json document;                         // as read, for hashing
};

// Strict view of one JSON object: every key must be read before finish().
class Section {
public:
    Section(const Json& value, std::string path);

    bool has(const std::string& key) const;
    double number(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    int integer(const std::string& key) const;
    int integer(const std::string& key, int fallback) const;
    std::uint64_t unsigned_integer(const std::string& key) const;
    bool flag(const std::string& key, bool fallback) const;
    std::string text(const std::string& key) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    std::vector<double> numbers(const std::string& key) const;
    Section child(const std::string& key) const;
    // Empty section when the key is absent.
    Section child_or_empty(const std::string& key) const;
    const Json& raw(const std::string& key) const;
    std::string key_path(const std::string& key) const;

    // Throws ConfigError naming the first key that was never read.
    void finish() const;

private:
    const Json& at(const std::string& key) const;

    const Json* value_;
    std::string path_;
    mutable std::set<std::string> used_;
    static const Json empty_object_;
};

// Validates the top level (experiment, output, seed, truncation, parameters).
// Kind-specific parameters are checked when the experiment runs.
ExperimentConfig parse_config(const Json& document, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

// SHA-256 of the compact dump (sorted keys), hex encoded.
std::string config_hash(const Json& document);

// Device parameters in Hz (and seconds for T1); absent keys take the
// reference-device values.
SystemParams parse_device(const Section& section);

}  // namespace ppcqed::config
