#pragma once

// 50-digit finite-difference reference for SNAIL Taylor coefficients.

#include "twpa/snail.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

namespace twpa::fixtures {

using BigFloat = boost::multiprecision::cpp_bin_float_50;

inline BigFloat snail_potential_big(const BigFloat& phi, const snail::SnailParams& p) {
  const BigFloat n = p.n_large;
  return -BigFloat(p.alpha) * p.e_j * boost::multiprecision::cos(phi) -
         n * p.e_j * boost::multiprecision::cos((BigFloat(p.phi_ext) - phi) / n);
}

// Central difference of order k (2..4) with step h.
inline BigFloat central_difference(const snail::SnailParams& p, const BigFloat& x, const BigFloat& h,
                                   int k) {
  auto u = [&](int step) { return snail_potential_big(x + h * step, p); };
  switch (k) {
    case 2: return (u(1) - 2 * u(0) + u(-1)) / (h * h);
    case 3: return (u(2) - 2 * u(1) + 2 * u(-1) - u(-2)) / (2 * h * h * h);
    default: return (u(2) - 4 * u(1) + 6 * u(0) - 4 * u(-1) + u(-2)) / (h * h * h * h);
  }
}

// U^(k)(x) / (k! E_J) from one Richardson step on the O(h^2) differences.
inline double richardson_coefficient(const snail::SnailParams& p, double x, int k) {
  const BigFloat h("1e-4");
  const BigFloat coarse = central_difference(p, BigFloat(x), h, k);
  const BigFloat fine = central_difference(p, BigFloat(x), h / 2, k);
  const BigFloat derivative = (4 * fine - coarse) / 3;
  BigFloat factorial = 1;
  for (int j = 2; j <= k; ++j) {
    factorial *= j;
  }
  return static_cast<double>(derivative / (factorial * p.e_j));
}

inline bool within_oracle_tolerance(double value, double reference) {
  return std::abs(value - reference) <= 1e-6 * std::abs(reference) + 1e-12;
}

}  // namespace twpa::fixtures
