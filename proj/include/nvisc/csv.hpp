#pragma once

// Small text helpers shared by the file readers and writers.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nvisc::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Strict parse of a whole token as a double ('.' decimal separator).
std::optional<double> parse_double(std::string_view token);

/// Deterministic "%.*g" formatting.
std::string format_double(double x, int precision = 15);

/// Writes content to path through a temporary sibling file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Non-empty lines of a CSV body that are not '#' comments, with their
/// 1-based line numbers.
struct CsvLine {
    std::size_t line_number;
    std::vector<std::string> fields;
};
std::vector<CsvLine> csv_records(std::string_view body);

}  // namespace nvisc::text
