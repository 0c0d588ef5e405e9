#pragma once

#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "pairqfi/errors.hpp"

namespace pairqfi {

/// Decimal rendering used in every output table: 12 significant digits,
/// '.' decimal point, "nan"/"inf" for non-finite values. Stable bytes for
/// identical doubles.
std::string format_value(double v);

/// Comma-separated table with a leading '#' metadata comment, a header row
/// and LF line endings. Row order is insertion order; the column count is
/// fixed by the header.
class CsvTable {
 public:
  CsvTable(std::string meta_comment, std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  void add_row(std::span<const double> values);

  std::size_t n_rows() const { return rows_.size(); }
  std::size_t n_columns() const { return header_.size(); }

  void write(std::ostream& out) const;
  void write_file(const std::string& path) const;
  std::string to_string() const;

 private:
  std::string meta_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace pairqfi
