#pragma once

// Tabular results and their CSV / JSON serializations.

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace pqkant {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  /// Throws std::invalid_argument if the row width differs from columns.
  void add_row(std::vector<Cell> row);
};

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

/// Header row plus one line per row; comma separated, LF endings.
void write_csv(std::ostream& out, const Table& table);

/// {"meta": meta, "rows": [{column: value, ...}, ...]}
nlohmann::json to_json(const nlohmann::json& meta, const Table& table);

}  // namespace pqkant
