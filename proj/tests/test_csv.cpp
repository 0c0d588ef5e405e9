#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "pairqfi/csv.hpp"

using namespace pairqfi;

TEST_SUITE("csv") {

TEST_CASE("values render with 12 significant digits") {
  CHECK(format_value(1.0) == "1");
  CHECK(format_value(0.0253302959106) == "0.0253302959106");
  CHECK(format_value(-0.0) == "0");
  CHECK(format_value(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_value(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_value(-std::numeric_limits<double>::infinity()) == "-inf");
  CHECK(format_value(1.23456789012345e-7) == "1.23456789012e-07");
}

TEST_CASE("table layout: comment, header, LF rows, fixed width") {
  CsvTable table("meta line", {"a", "b"});
  const double row[] = {1.5, std::nan("")};
  table.add_row(row);
  const std::string text = table.to_string();
  CHECK(text == "# meta line\na,b\n1.5,nan\n");
  CHECK(text.find('\r') == std::string::npos);

  CHECK_THROWS_AS(table.add_row(std::vector<std::string>{"only-one"}), ConfigError);
  CHECK_THROWS_AS(CsvTable("m", {}), ConfigError);
}

TEST_CASE("identical inputs produce identical bytes") {
  auto build = [] {
    CsvTable t("m", {"x"});
    const double row[] = {0.1 + 0.2};
    t.add_row(row);
    return t.to_string();
  };
  CHECK(build() == build());
}

}  // TEST_SUITE
