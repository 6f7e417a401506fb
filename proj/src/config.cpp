#include "ppcqed/config.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "ppcqed/constants.hpp"
#include "ppcqed/device.hpp"

namespace ppcqed::config {

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 8> kind_names{{
    {ExperimentKind::Estimate, "estimate"},
    {ExperimentKind::Chevron, "chevron"},
    {ExperimentKind::Spectrum, "spectrum"},
    {ExperimentKind::Calibrate, "calibrate"},
    {ExperimentKind::FitNotch, "fit-notch"},
    {ExperimentKind::FitCrossing, "fit-crossing"},
    {ExperimentKind::ExtractG0, "extract-g0"},
    {ExperimentKind::Pipeline, "pipeline"},
}};

}  // namespace

const Json Section::empty_object_ = Json::object();

std::string_view kind_name(ExperimentKind kind) {
    for (const auto& [k, name] : kind_names) {
        if (k == kind) return name;
    }
    return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
    for (const auto& [k, n] : kind_names) {
        if (n == name) return k;
    }
    throw ConfigError("experiment", "unknown experiment kind '" + std::string(name) + "'");
}

Section::Section(const Json& value, std::string path) : value_(&value), path_(std::move(path)) {
    if (!value.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
}

std::string Section::key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

bool Section::has(const std::string& key) const { return value_->contains(key); }

const Json& Section::at(const std::string& key) const {
    const auto it = value_->find(key);
    if (it == value_->end()) throw ConfigError(key_path(key), "required key is missing");
    used_.insert(key);
    return *it;
}

const Json& Section::raw(const std::string& key) const { return at(key); }

double Section::number(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number()) throw ConfigError(key_path(key), "expected a number");
    return v.get<double>();
}

double Section::number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

int Section::integer(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
    return v.get<int>();
}

int Section::integer(const std::string& key, int fallback) const {
    return has(key) ? integer(key) : fallback;
}

std::uint64_t Section::unsigned_integer(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_number_unsigned()) throw ConfigError(key_path(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

bool Section::flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) throw ConfigError(key_path(key), "expected true or false");
    return v.get<bool>();
}

std::string Section::text(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_string()) throw ConfigError(key_path(key), "expected a string");
    return v.get<std::string>();
}

std::string Section::text(const std::string& key, const std::string& fallback) const {
    return has(key) ? text(key) : fallback;
}

std::vector<double> Section::numbers(const std::string& key) const {
    const auto& v = at(key);
    if (!v.is_array()) throw ConfigError(key_path(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(key_path(key) + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

Section Section::child(const std::string& key) const { return Section(at(key), key_path(key)); }

Section Section::child_or_empty(const std::string& key) const {
    return has(key) ? child(key) : Section(empty_object_, key_path(key));
}

void Section::finish() const {
    for (const auto& item : value_->items()) {
        if (!used_.contains(item.key())) throw ConfigError(key_path(item.key()), "unknown key");
    }
}

ExperimentConfig parse_config(const Json& document, const std::filesystem::path& base_dir) {
    const Section root(document, "");
    ExperimentConfig cfg;
    cfg.document = document;
    cfg.base_dir = base_dir;
    cfg.kind = parse_kind(root.text("experiment"));
    cfg.output = root.text("output", ".");
    if (cfg.output.is_relative()) cfg.output = base_dir / cfg.output;
    if (root.has("seed")) cfg.seed = root.unsigned_integer("seed");
    const auto trunc = root.child_or_empty("truncation");
    cfg.truncation.qubit_dim = trunc.integer("qubit_dim", cfg.truncation.qubit_dim);
    cfg.truncation.resonator_dim = trunc.integer("resonator_dim", cfg.truncation.resonator_dim);
    trunc.finish();
    if (cfg.truncation.qubit_dim < 2) throw ConfigError("truncation.qubit_dim", "must be at least 2");
    if (cfg.truncation.resonator_dim < 2) throw ConfigError("truncation.resonator_dim", "must be at least 2");
    if (root.has("parameters")) {
        cfg.parameters = root.raw("parameters");
        if (!cfg.parameters.is_object()) throw ConfigError("parameters", "expected an object");
    }
    root.finish();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config", std::string("malformed document: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

std::string config_hash(const Json& document) {
    const std::string text = document.dump();
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    EVP_Digest(text.data(), text.size(), digest.data(), &length, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < length; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

SystemParams parse_device(const Section& s) {
    const auto ref = device::system_params();
    SystemParams p;
    p.qubit_frequency = hz_to_rad(s.number("qubit_frequency_hz", rad_to_hz(ref.qubit_frequency)));
    p.anharmonicity = hz_to_rad(s.number("anharmonicity_hz", rad_to_hz(ref.anharmonicity)));
    p.resonator_frequency = hz_to_rad(s.number("resonator_frequency_hz", rad_to_hz(ref.resonator_frequency)));
    p.single_photon_coupling = hz_to_rad(s.number("g0_hz", rad_to_hz(ref.single_photon_coupling)));
    p.parasitic_coupling = hz_to_rad(s.number("parasitic_coupling_hz", rad_to_hz(ref.parasitic_coupling)));
    p.resonator_decay = hz_to_rad(s.number("resonator_decay_hz", rad_to_hz(ref.resonator_decay)));
    const double t1 = s.number("t1_s", 1.0 / ref.qubit_relaxation);
    if (!(t1 > 0.0)) throw ConfigError(s.key_path("t1_s"), "must be positive");
    p.qubit_relaxation = std::isinf(t1) ? 0.0 : 1.0 / t1;
    p.qubit_linewidth = hz_to_rad(s.number("qubit_linewidth_hz", rad_to_hz(ref.qubit_linewidth)));
    s.finish();
    p.validate();
    return p;
}

}  // namespace ppcqed::config
