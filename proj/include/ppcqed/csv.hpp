#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ppcqed::csv {

// Header plus rows of cells. Numbers are written with 17 significant digits
// so a write/read cycle is lossless.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& values);
    std::size_t column_index(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
};

std::string format_number(double value);
double parse_number(const std::string& cell);

std::string to_string(const Table& table);
Table parse(const std::string& text);

Table read(const std::filesystem::path& path);
void write(const std::filesystem::path& path, const Table& table);

// Writes to a sibling temporary file and renames it over the target.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace ppcqed::csv
