#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace scdmi {

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

// Splits one CSV record on commas. Fields are not quoted in any format this
// project writes or reads.
std::vector<std::string> split_csv_line(std::string_view line);

std::string read_text_file(const std::filesystem::path& path);
// Creates parent directories as needed. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace scdmi
