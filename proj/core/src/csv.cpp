#include "pairqfi/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pairqfi {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds negative zero
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CsvTable::CsvTable(std::string meta_comment, std::vector<std::string> header)
    : meta_(std::move(meta_comment)), header_(std::move(header)) {
  if (header_.empty()) throw ConfigError("CSV table needs a header");
}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw ConfigError("CSV row width does not match the header");
  rows_.push_back(std::move(cells));
}

void CsvTable::add_row(std::span<const double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_value(v));
  add_row(std::move(cells));
}

void CsvTable::write(std::ostream& out) const {
  out << "# " << meta_ << '\n';
  for (std::size_t c = 0; c < header_.size(); ++c) {
    if (c) out << ',';
    out << header_[c];
  }
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << row[c];
    }
    out << '\n';
  }
}

void CsvTable::write_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file: " + path);
  write(out);
  if (!out) throw Error("failed writing output file: " + path);
}

std::string CsvTable::to_string() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

}  // namespace pairqfi
