#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ppcqed/config.hpp"
#include "ppcqed/csv.hpp"
#include "ppcqed/runner.hpp"

using namespace ppcqed;
using config::ConfigError;
using config::Json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("ppcqed_unit_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_json(const fs::path& dir, const Json& doc) {
    const auto path = dir / "config.json";
    std::ofstream(path) << doc.dump(2);
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const fs::path& path) {
    const auto text = slurp(path);
    return text.substr(0, text.find('\n'));
}

Json small_chevron() {
    return Json{{"experiment", "chevron"},
                {"output", "out"},
                {"parameters",
                 {{"coupling_hz", 2.76e6},
                  {"detuning_hz", {{"start", -5e6}, {"stop", 5e6}, {"count", 3}}},
                  {"time_s", {{"start", 0.0}, {"stop", 100e-9}, {"count", 5}}},
                  {"preparation", "excited_qubit"}}}};
}

std::string error_of(const Json& doc) {
    try {
        config::parse_config(doc, ".");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, UnknownTopLevelKeyNamed) {
    auto doc = small_chevron();
    doc["colour"] = "red";
    EXPECT_NE(error_of(doc).find("colour"), std::string::npos);
}

TEST(Config, TypeErrorsNameTheKey) {
    auto doc = small_chevron();
    doc["seed"] = "seven";
    EXPECT_EQ(error_of(doc).rfind("seed", 0), 0u);
    doc = small_chevron();
    doc["truncation"] = {{"qubit_dim", 2}, {"resonator_dim", "five"}};
    EXPECT_NE(error_of(doc).find("truncation.resonator_dim"), std::string::npos);
    doc = small_chevron();
    doc["experiment"] = "teleport";
    EXPECT_NE(error_of(doc).find("experiment"), std::string::npos);
}

TEST(Config, SectionIsStrict) {
    const Json j{{"a", 1.5}, {"b", "x"}};
    const config::Section s(j, "parameters");
    EXPECT_EQ(s.number("a"), 1.5);
    try {
        s.finish();
        FAIL() << "unread key accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "parameters.b");
    }
    EXPECT_THROW(s.number("b"), ConfigError);
    EXPECT_THROW(s.number("missing"), ConfigError);
}

TEST(Config, HashMatchesIndependentDigest) {
    // sha256 of {"experiment":"estimate","output":"out","seed":7,"truncation":{"qubit_dim":2,"resonator_dim":5}}
    const Json doc = Json::parse(
        R"({"truncation": {"resonator_dim": 5, "qubit_dim": 2}, "seed": 7, "output": "out", "experiment": "estimate"})");
    EXPECT_EQ(config::config_hash(doc), "9feb68ac1314a9b12f754da9f5e2764f0f87dcf2005a670a6c72aa821a0f6e87");
}

TEST(Csv, RoundTripIsLossless) {
    csv::Table t;
    t.header = {"x", "y"};
    t.add_row({0.1, -1.0 / 3.0});
    t.add_row({6.02214076e23, 5e-324});
    const auto back = csv::parse(csv::to_string(t));
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.column("x"), t.column("x"));
    EXPECT_EQ(back.column("y"), t.column("y"));
    EXPECT_EQ(back.column("y")[0], -1.0 / 3.0);
}

TEST(Csv, ParsingRules) {
    const auto t = csv::parse("a,b\r\n1,2\r\n");
    EXPECT_EQ(t.column("b"), std::vector<double>{2.0});
    EXPECT_THROW(csv::parse("a,b\n1\n"), std::exception);
    EXPECT_THROW(t.column("c"), std::exception);
    EXPECT_THROW(csv::parse_number("1.0x"), std::exception);
}

TEST(Runner, ChevronOutputsAndManifest) {
    const auto dir = scratch("chevron");
    const auto path = write_json(dir, small_chevron());
    ASSERT_EQ(run_file(path, config::ExperimentKind::Chevron), exit_success);
    EXPECT_EQ(first_line(dir / "out" / "chevron.csv"), "detuning_hz,time_s,p_excited");
    EXPECT_EQ(csv::read(dir / "out" / "chevron.csv").rows.size(), 15u);
    const Json manifest = Json::parse(slurp(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest.at("experiment"), "chevron");
    EXPECT_EQ(manifest.at("exit_code"), 0);
    EXPECT_EQ(manifest.at("version"), toolkit_version);
    EXPECT_EQ(manifest.at("config_hash"), config::config_hash(config::load_config(path).document));

    const auto first = slurp(dir / "out" / "chevron.csv");
    ASSERT_EQ(run_file(path, config::ExperimentKind::Chevron), exit_success);
    EXPECT_EQ(slurp(dir / "out" / "chevron.csv"), first);
}

TEST(Runner, SeededSpectrumIsReproducible) {
    const auto dir = scratch("spectrum");
    Json doc{{"experiment", "spectrum"},
             {"output", "out"},
             {"seed", 3},
             {"parameters",
              {{"coupling_hz", 2.81e6},
               {"probe_hz", {{"start", 4.34e9}, {"stop", 4.354e9}, {"count", 101}}},
               {"noise", 0.01}}}};
    const auto path = write_json(dir, doc);
    ASSERT_EQ(run_file(path, config::ExperimentKind::Spectrum), exit_success);
    EXPECT_EQ(first_line(dir / "out" / "spectrum.csv"), "probe_hz,s21_re,s21_im,s21_abs");
    const auto first = slurp(dir / "out" / "spectrum.csv");
    ASSERT_EQ(run_file(path, config::ExperimentKind::Spectrum), exit_success);
    EXPECT_EQ(slurp(dir / "out" / "spectrum.csv"), first);

    doc.erase("seed");
    EXPECT_EQ(run_file(write_json(dir, doc), config::ExperimentKind::Spectrum), exit_config_error);
}

TEST(Runner, ConfigErrorsExitOne) {
    const auto dir = scratch("config_errors");
    auto doc = small_chevron();
    doc["parameters"]["colour"] = "red";
    EXPECT_EQ(run_file(write_json(dir, doc), config::ExperimentKind::Chevron), exit_config_error);
    EXPECT_EQ(run_file(write_json(dir, small_chevron()), config::ExperimentKind::Estimate), exit_config_error);
    EXPECT_EQ(run_file(dir / "missing.json", std::nullopt), exit_config_error);
}

TEST(Runner, FitCsvSchema) {
    const auto dir = scratch("extract");
    const Json doc{{"experiment", "extract-g0"},
                   {"output", "out"},
                   {"parameters",
                    {{"points",
                      {{{"photon_number", 0.01}, {"coupling_hz", 1.19e6}},
                       {{"photon_number", 0.04}, {"coupling_hz", 2.38e6}}}}}}};
    ASSERT_EQ(run_file(write_json(dir, doc), config::ExperimentKind::ExtractG0), exit_success);
    EXPECT_EQ(first_line(dir / "out" / "fit_g0.csv"), "parameter,value,uncertainty");
}

TEST(Runner, FlatNotchDataExitsTwo) {
    const auto dir = scratch("flat");
    csv::Table t;
    t.header = {"probe_hz", "s21_re", "s21_im", "s21_abs"};
    for (int i = 0; i < 100; ++i) t.add_row({4.347e9 + (i - 50) * 1e4, 1.0, 0.0, 1.0});
    csv::write(dir / "flat.csv", t);
    const Json doc{{"experiment", "fit-notch"}, {"output", "out"}, {"parameters", {{"data", "flat.csv"}}}};
    EXPECT_EQ(run_file(write_json(dir, doc), config::ExperimentKind::FitNotch), exit_numerical_failure);
    const Json manifest = Json::parse(slurp(dir / "out" / "manifest.json"));
    EXPECT_EQ(manifest.at("exit_code"), 2);
    EXPECT_FALSE(manifest.at("error").get<std::string>().empty());
}
