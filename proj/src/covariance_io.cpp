#include "twpa/covariance_io.hpp"

#include "twpa/errors.hpp"

#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace twpa::cv {

nlohmann::json covariance_to_json(const CovarianceMatrix& v) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.dimension(); ++i) {
    for (Eigen::Index j = 0; j < v.dimension(); ++j) {
      data.push_back(v(i, j));
    }
  }
  return {{"n_modes", v.n_modes()}, {"data", std::move(data)}};
}

CovarianceMatrix covariance_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n_modes") || !j.contains("data")) {
    throw InvalidArgument("covariance JSON needs 'n_modes' and 'data'");
  }
  const auto n = j.at("n_modes").get<std::int64_t>();
  if (n <= 0) {
    throw InvalidArgument("covariance JSON: n_modes must be positive");
  }
  const auto& data = j.at("data");
  const auto dim = static_cast<Eigen::Index>(2 * n);
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != dim * dim) {
    throw InvalidArgument("covariance JSON: 'data' must hold (2 n_modes)^2 numbers");
  }
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index jj = 0; jj < dim; ++jj) {
      m(i, jj) = data.at(static_cast<std::size_t>(i * dim + jj)).get<double>();
    }
  }
  return CovarianceMatrix(std::move(m));
}

void write_covariance_csv(const CovarianceMatrix& v, std::ostream& out) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t m = 0; m < v.n_modes(); ++m) {
    out << (m ? "," : "") << 'I' << m + 1 << ",Q" << m + 1;
  }
  out << '\n';
  for (Eigen::Index i = 0; i < v.dimension(); ++i) {
    for (Eigen::Index j = 0; j < v.dimension(); ++j) {
      out << (j ? "," : "") << v(i, j);
    }
    out << '\n';
  }
  out.precision(old_precision);
}

CovarianceMatrix read_covariance_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw InvalidArgument("covariance CSV is empty");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgument("covariance CSV: cannot parse '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  const auto dim = static_cast<Eigen::Index>(rows.size());
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != dim) {
      throw InvalidArgument("covariance CSV: matrix is not square");
    }
    for (Eigen::Index j = 0; j < dim; ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  return CovarianceMatrix(std::move(m));
}

}  // namespace twpa::cv
