#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"

#include "decoherence/errors.hpp"
#include "decoherence/table.hpp"

using namespace decoherence;

TEST_CASE("real formatting") {
  CHECK(format_real(1.0) == "1.0");
  CHECK(format_real(-2.0) == "-2.0");
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(format_real(1e-300) == "1e-300");
  CHECK(format_real(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_real(1.5e20) == "1.5e+20");
  CHECK(std::stod(format_real(std::numbers::pi)) == std::numbers::pi);
}

TEST_CASE("empty table is header only") {
  Table t;
  t.columns = {"t", "value"};
  CHECK(emit_csv(t) == "t,value\n");
}

TEST_CASE("single record") {
  Table t;
  t.columns = {"t"};
  t.add_row({1.0});
  CHECK(emit_csv(t) == "t\n1.0\n");
}

TEST_CASE("csv quoting and null cells") {
  Table t;
  t.columns = {"name", "count", "x"};
  t.add_row({std::string("a,b"), std::int64_t{3}, std::monostate{}});
  t.add_row({std::string("say \"hi\""), std::int64_t{-1}, 0.5});
  CHECK(emit_csv(t) == "name,count,x\n\"a,b\",3,\n\"say \"\"hi\"\"\",-1,0.5\n");
  CHECK_THROWS_AS(t.add_row({1.0}), ArgumentError);
}

TEST_CASE("json keeps column order and round trips") {
  Table t;
  t.columns = {"zeta", "alpha", "label", "n"};
  t.add_row({0.1, -3.25e-17, std::string("x\"y"), std::int64_t{7}});
  t.add_row({1.0 / 3.0, std::monostate{}, std::string(""), std::int64_t{-2}});
  const std::string text = emit_json(t);
  CHECK(text.find("\"zeta\"") < text.find("\"alpha\""));
  CHECK(text.find("\"alpha\"") < text.find("\"label\""));
  CHECK(parse_json_table(text) == t);
}

TEST_CASE("non-finite values become null") {
  Table t;
  t.columns = {"x"};
  t.add_row({std::numeric_limits<double>::quiet_NaN()});
  CHECK(emit_csv(t) == "x\n\n");
  CHECK(emit_json(t).find("null") != std::string::npos);
}

TEST_CASE("format names") {
  CHECK(parse_table_format("csv") == TableFormat::Csv);
  CHECK(parse_table_format("json") == TableFormat::Json);
  CHECK_THROWS_AS(parse_table_format("xml"), ArgumentError);
}
