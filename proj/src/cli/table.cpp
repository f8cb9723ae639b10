#include "table.hpp"

#include "twpa/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace twpa::cli {

std::string format_double(double x) {
  if (std::isnan(x)) {
    return "nan";
  }
  if (std::isinf(x)) {
    return x > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw InvalidArgument("table row has " + std::to_string(row.size()) + " cells, expected " +
                          std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& out) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    out << (c ? "," : "") << columns_[c];
  }
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) {
        out << ",";
      }
      if (const auto* d = std::get_if<double>(&row[c])) {
        out << format_double(*d);
      } else if (const auto* i = std::get_if<long long>(&row[c])) {
        out << *i;
      } else {
        out << std::get<std::string>(row[c]);
      }
    }
    out << "\n";
  }
}

nlohmann::json Table::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& row : rows_) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              // JSON has no inf/nan.
              obj[columns_[c]] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
            } else {
              obj[columns_[c]] = v;
            }
          },
          row[c]);
    }
    arr.push_back(std::move(obj));
  }
  return arr;
}

std::filesystem::path Table::write(const std::filesystem::path& dir, const std::string& stem,
                                   const std::string& format) const {
  const auto path = dir / (stem + "." + format);
  if (format == "json") {
    write_json_file(path, to_json());
    return path;
  }
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  write_csv(out);
  out.flush();
  if (!out) {
    throw IoError("write failed on '" + path.string() + "'");
  }
  return path;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << j.dump(2) << "\n";
  out.flush();
  if (!out) {
    throw IoError("write failed on '" + path.string() + "'");
  }
}

}  // namespace twpa::cli
