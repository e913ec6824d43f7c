#include "decoherence/table.hpp"

#include <charconv>
#include <cmath>
#include "json.hpp"

#include "decoherence/errors.hpp"

namespace decoherence {

using ordered_json = nlohmann::ordered_json;

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw ArgumentError("table row has " + std::to_string(row.size()) + " cells, expected " +
                        std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

TableFormat parse_table_format(const std::string& name) {
  if (name == "csv") {
    return TableFormat::Csv;
  }
  if (name == "json") {
    return TableFormat::Json;
  }
  throw ArgumentError("unknown output format '" + name + "' (expected csv or json)");
}

std::string format_real(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
  std::string text(buffer, end);
  if (text.find_first_of(".e") == std::string::npos) {
    text += ".0";
  }
  return text;
}

namespace {

std::string quote_csv(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) {
    return field;
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_text(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double v) const { return std::isfinite(v) ? format_real(v) : std::string{}; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& v) const { return quote_csv(v); }
  };
  return std::visit(Visitor{}, cell);
}

ordered_json cell_json(const Cell& cell) {
  struct Visitor {
    ordered_json operator()(std::monostate) const { return nullptr; }
    ordered_json operator()(double v) const { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }
    ordered_json operator()(std::int64_t v) const { return v; }
    ordered_json operator()(const std::string& v) const { return v; }
  };
  return std::visit(Visitor{}, cell);
}

}  // namespace

std::string emit_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out += (c ? "," : "") + quote_csv(table.columns[c]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) {
        out += ',';
      }
      out += cell_text(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::string emit_json(const Table& table) {
  ordered_json records = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json record = ordered_json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      record[table.columns[c]] = cell_json(row[c]);
    }
    records.push_back(std::move(record));
  }
  return records.dump(2) + "\n";
}

std::string emit_table(const Table& table, TableFormat format) {
  return format == TableFormat::Csv ? emit_csv(table) : emit_json(table);
}

Table parse_json_table(const std::string& text) {
  const ordered_json records = ordered_json::parse(text);
  if (!records.is_array()) {
    throw ArgumentError("parse_json_table: expected an array of records");
  }
  Table table;
  for (const auto& record : records) {
    if (!record.is_object()) {
      throw ArgumentError("parse_json_table: record is not an object");
    }
    if (table.columns.empty() && table.rows.empty()) {
      for (const auto& item : record.items()) {
        table.columns.push_back(item.key());
      }
    }
    std::vector<Cell> row;
    std::size_t c = 0;
    for (const auto& item : record.items()) {
      if (c >= table.columns.size() || item.key() != table.columns[c]) {
        throw ArgumentError("parse_json_table: records are not homogeneous");
      }
      const auto& v = item.value();
      if (v.is_null()) {
        row.emplace_back(std::monostate{});
      } else if (v.is_number_integer()) {
        row.emplace_back(v.get<std::int64_t>());
      } else if (v.is_number()) {
        row.emplace_back(v.get<double>());
      } else if (v.is_string()) {
        row.emplace_back(v.get<std::string>());
      } else {
        throw ArgumentError("parse_json_table: unsupported value type");
      }
      ++c;
    }
    table.add_row(std::move(row));
  }
  return table;
}

}  // namespace decoherence
