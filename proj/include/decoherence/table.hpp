#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace decoherence {

/// A table cell. monostate is an undefined point (empty in CSV, null in JSON).
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Appends a row; throws ArgumentError if its width differs from columns.
  void add_row(std::vector<Cell> row);
  bool operator==(const Table&) const = default;
};

enum class TableFormat { Csv, Json };

TableFormat parse_table_format(const std::string& name);

/// 17 significant digits, '.' decimal separator, integral values keep ".0".
std::string format_real(double value);

/// RFC-4180 CSV with '\n' line endings: header row, then one line per record.
std::string emit_csv(const Table& table);

/// JSON array of objects, keys in column order.
std::string emit_json(const Table& table);

std::string emit_table(const Table& table, TableFormat format);

/// Inverse of emit_json.
Table parse_json_table(const std::string& text);

}  // namespace decoherence
