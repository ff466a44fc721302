#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace simspace::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file with a header row. Blank lines and lines
/// starting with '#' are skipped; every row must have as many cells as the
/// header (MalformedCsv otherwise).
Table read(const std::filesystem::path& path);

std::vector<std::string> split_line(std::string_view line);

/// Parses a full cell as a finite double; MalformedCsv with the row/column
/// position otherwise.
double parse_double(std::string_view cell, std::size_t row, std::size_t column);

/// Opens a file for writing, creating parent directories. Throws Io.
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace simspace::csv
