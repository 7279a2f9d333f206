#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dipspin {

/// Tab-separated numeric table. On disk: '# '-prefixed comment lines, one
/// header line naming the columns, then one row per line at 17 digits.
struct Table {
  std::vector<std::string> comments;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::vector<double> row);
  std::vector<double> column(std::string_view name) const;
};

std::string write_table(const Table& t);
Table read_table(std::string_view text);

/// Flat "key = value" document, order preserved.
using Summary = std::vector<std::pair<std::string, std::string>>;

std::string write_summary(const Summary& s);
Summary read_summary(std::string_view text);

std::string load_text(const std::filesystem::path& path);
void save_text(const std::filesystem::path& path, std::string_view text);

}  // namespace dipspin
