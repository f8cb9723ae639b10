#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace twpa::cli {

using Cell = std::variant<double, long long, std::string>;

// Column-oriented result table written as CSV (doubles as %.17g, so they
// parse back bit-exactly) or as a JSON array of row objects.
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<Cell> row);
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;
  // format: "csv" or "json"; the extension is appended to `stem`.
  std::filesystem::path write(const std::filesystem::path& dir, const std::string& stem,
                              const std::string& format) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

std::string format_double(double x);

// Writes `j` (indented) to `path`; throws IoError.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace twpa::cli
