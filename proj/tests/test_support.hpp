#pragma once

// Random Gaussian states for property tests.

#include "twpa/gaussian_cv.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace twpa::fixtures {

inline Eigen::MatrixXd single_mode_op(std::size_t n_modes, std::size_t mode, const Eigen::Matrix2d& m) {
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
  s.block<2, 2>(static_cast<Eigen::Index>(2 * mode), static_cast<Eigen::Index>(2 * mode)) = m;
  return s;
}

// Product of random single-mode squeezers, phase rotations and beam splitters.
inline Eigen::MatrixXd random_symplectic(std::size_t n_modes, std::mt19937_64& rng, double max_squeeze = 1.0,
                                         int layers = 6) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> squeeze(-max_squeeze, max_squeeze);
  std::uniform_int_distribution<std::size_t> pick(0, n_modes - 1);
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::MatrixXd s = Eigen::MatrixXd::Identity(dim, dim);
  for (int l = 0; l < layers; ++l) {
    for (std::size_t m = 0; m < n_modes; ++m) {
      const double t = angle(rng);
      Eigen::Matrix2d rot;
      rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      const double r = squeeze(rng);
      Eigen::Matrix2d sq;
      sq << std::exp(-r), 0.0, 0.0, std::exp(r);
      s = single_mode_op(n_modes, m, sq * rot) * s;
    }
    if (n_modes > 1) {
      const std::size_t a = pick(rng);
      std::size_t b = pick(rng);
      if (a == b) {
        b = (a + 1) % n_modes;
      }
      const double t = angle(rng);
      Eigen::MatrixXd bs = Eigen::MatrixXd::Identity(dim, dim);
      const auto ia = static_cast<Eigen::Index>(2 * a);
      const auto ib = static_cast<Eigen::Index>(2 * b);
      bs.block<2, 2>(ia, ia) = std::cos(t) * Eigen::Matrix2d::Identity();
      bs.block<2, 2>(ib, ib) = std::cos(t) * Eigen::Matrix2d::Identity();
      bs.block<2, 2>(ia, ib) = std::sin(t) * Eigen::Matrix2d::Identity();
      bs.block<2, 2>(ib, ia) = -std::sin(t) * Eigen::Matrix2d::Identity();
      s = bs * s;
    }
  }
  return s;
}

struct RandomState {
  cv::CovarianceMatrix v;
  Eigen::VectorXd nu;  // symplectic eigenvalues used to build v
};

// V = S diag(nu_1, nu_1, ..., nu_N, nu_N) S^T with nu_k in [1, 1 + max_thermal].
inline RandomState random_physical_state(std::size_t n_modes, std::mt19937_64& rng,
                                         double max_thermal = 2.0, double max_squeeze = 1.0) {
  std::uniform_real_distribution<double> thermal(0.0, max_thermal);
  Eigen::VectorXd nu(static_cast<Eigen::Index>(n_modes));
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < nu.size(); ++k) {
    nu(k) = 1.0 + thermal(rng);
    d(2 * k, 2 * k) = nu(k);
    d(2 * k + 1, 2 * k + 1) = nu(k);
  }
  const Eigen::MatrixXd s = random_symplectic(n_modes, rng, max_squeeze);
  Eigen::MatrixXd v = s * d * s.transpose();
  v = 0.5 * (v + v.transpose()).eval();
  return {cv::CovarianceMatrix(v), nu};
}

// Independent route to the symplectic spectrum: the eigenvalues of
// (Omega V) are +-i nu, so -(Omega V)^2 has eigenvalues nu^2 (each twice).
inline std::vector<double> symplectic_spectrum_oracle(const cv::CovarianceMatrix& v) {
  const Eigen::MatrixXd ov = cv::symplectic_form(v.n_modes()) * v.data();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(-(ov * ov));
  std::vector<double> all;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    all.push_back(std::sqrt(std::abs(solver.eigenvalues()(k).real())));
  }
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (std::size_t k = 0; k < all.size(); k += 2) {
    out.push_back(0.5 * (all[k] + all[k + 1]));
  }
  return out;
}

}  // namespace twpa::fixtures
