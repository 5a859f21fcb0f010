#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace kclind {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// One double, 17 significant digits — enough to round-trip exactly.
std::string format_value(double x);

// Header + rows, comma separated, '\n' line endings, no trailing blank line
// beyond the final newline.
std::string to_csv(const CsvTable& table);

// Writes UTF-8/ASCII CSV. Refuses to overwrite an existing file unless
// `force`. Throws IoError on filesystem trouble.
void write_csv(const CsvTable& table, const std::filesystem::path& path, bool force = false);

CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::filesystem::path& path);

}  // namespace kclind
