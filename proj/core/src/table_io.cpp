#include "dipspin/table_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "dipspin/config.hpp"
#include "dipspin/error.hpp"

namespace dipspin {

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

std::vector<std::string_view> fields_of(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

double parse_cell(std::string_view s, std::size_t row) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidArgument("table row " + std::to_string(row) + ": bad number '" + std::string(s) + "'");
  }
  return x;
}

}  // namespace

void Table::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) throw InvalidArgument("row width does not match the header");
  rows.push_back(std::move(row));
}

std::vector<double> Table::column(std::string_view name) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] != name) continue;
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }
  throw InvalidArgument("no column named '" + std::string(name) + "'");
}

std::string write_table(const Table& t) {
  std::string out;
  for (const auto& c : t.comments) out += "# " + c + '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "\t" : "") + t.columns[c];
  out += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += '\t';
      out += format_double(r[c]);
    }
    out += '\n';
  }
  return out;
}

Table read_table(std::string_view text) {
  Table t;
  bool have_header = false;
  std::size_t row_no = 0;
  for (std::string_view line : lines_of(text)) {
    if (!have_header && line.starts_with("# ")) {
      t.comments.emplace_back(line.substr(2));
      continue;
    }
    if (!have_header) {
      for (auto f : fields_of(line)) t.columns.emplace_back(f);
      have_header = true;
      continue;
    }
    ++row_no;
    const auto cells = fields_of(line);
    if (cells.size() != t.columns.size()) {
      throw InvalidArgument("table row " + std::to_string(row_no) + " has " + std::to_string(cells.size()) +
                            " fields, header has " + std::to_string(t.columns.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto c : cells) row.push_back(parse_cell(c, row_no));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw InvalidArgument("table has no header line");
  return t;
}

std::string write_summary(const Summary& s) {
  std::string out;
  for (const auto& [k, v] : s) out += k + " = " + v + '\n';
  return out;
}

Summary read_summary(std::string_view text) {
  Summary s;
  for (std::string_view line : lines_of(text)) {
    if (line.empty()) continue;
    const auto sep = line.find(" = ");
    if (sep == std::string_view::npos) throw InvalidArgument("summary line lacks ' = ': " + std::string(line));
    s.emplace_back(std::string(line.substr(0, sep)), std::string(line.substr(sep + 3)));
  }
  return s;
}

std::string load_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for " + path.string());
}

}  // namespace dipspin
