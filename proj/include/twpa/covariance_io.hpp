#pragma once

// Serialization of covariance matrices. Field names and layout are
// documented in docs/formats.md.

#include "twpa/gaussian_cv.hpp"

#include <json.hpp>

#include <iosfwd>

namespace twpa::cv {

// {"n_modes": N, "data": [row-major 2N x 2N values]}
nlohmann::json covariance_to_json(const CovarianceMatrix& v);
CovarianceMatrix covariance_from_json(const nlohmann::json& j);

// Header line "I1,Q1,...,IN,QN" followed by 2N rows of 2N values.
void write_covariance_csv(const CovarianceMatrix& v, std::ostream& out);
CovarianceMatrix read_covariance_csv(std::istream& in);

}  // namespace twpa::cv
