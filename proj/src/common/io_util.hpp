#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cfrca::io {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::vector<std::string> split_csv_line(std::string_view line);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

}  // namespace cfrca::io
