#include "twpa/gaussian_cv.hpp"

#include "twpa/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <sstream>

namespace twpa::cv {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;

constexpr double kSymmetryTolerance = 1e-12;
constexpr double kPairingTolerance = 1e-9;
// nu_min within rounding of 1 is read as the separable boundary.
constexpr double kSeparableTolerance = 1e-12;

void check_modes(const std::vector<std::size_t>& modes, std::size_t n_modes) {
  for (auto m : modes) {
    if (m >= n_modes) {
      std::ostringstream msg;
      msg << "mode index " << m << " out of range for " << n_modes << "-mode state";
      throw InvalidArgument(msg.str());
    }
  }
}

std::vector<std::size_t> unique_modes(const std::vector<std::size_t>& modes) {
  std::set<std::size_t> s(modes.begin(), modes.end());
  return {s.begin(), s.end()};
}

void check_bipartition(const std::vector<std::size_t>& bipartition, std::size_t n_modes) {
  check_modes(bipartition, n_modes);
  const auto unique = unique_modes(bipartition);
  if (unique.empty() || unique.size() >= n_modes) {
    throw InvalidArgument("bipartition must select a non-empty proper subset of modes");
  }
}

}  // namespace

CovarianceMatrix::CovarianceMatrix(Matrix data) : data_(std::move(data)) {
  if (data_.rows() == 0 || data_.rows() != data_.cols() || data_.rows() % 2 != 0) {
    std::ostringstream msg;
    msg << "covariance matrix must be square with even dimension, got " << data_.rows()
        << "x" << data_.cols();
    throw InvalidArgument(msg.str());
  }
  if (!data_.allFinite()) {
    throw InvalidArgument("covariance matrix contains non-finite entries");
  }
  const double scale = std::max(1.0, data_.cwiseAbs().maxCoeff());
  const double asym = (data_ - data_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance * scale) {
    std::ostringstream msg;
    msg << "covariance matrix is not symmetric (max |V - V^T| = " << asym << ")";
    throw InvalidState(msg.str());
  }
  data_ = (0.5 * (data_ + data_.transpose())).eval();
}

CovarianceMatrix CovarianceMatrix::vacuum(std::size_t n_modes) {
  if (n_modes == 0) {
    throw InvalidArgument("vacuum state needs at least one mode");
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  return CovarianceMatrix(Matrix::Identity(dim, dim));
}

double CovarianceMatrix::physicality_margin() const {
  const ComplexMatrix omega = symplectic_form(n_modes()).cast<std::complex<double>>();
  const ComplexMatrix h = data_.cast<std::complex<double>>() + std::complex<double>(0.0, 1.0) * omega;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

bool CovarianceMatrix::is_physical(double tolerance) const {
  const double scale = std::max(1.0, data_.cwiseAbs().maxCoeff());
  return physicality_margin() >= -tolerance * scale;
}

Matrix symplectic_form(std::size_t n_modes) {
  if (n_modes == 0) {
    throw InvalidArgument("symplectic form needs at least one mode");
  }
  const auto dim = static_cast<Eigen::Index>(2 * n_modes);
  Matrix omega = Matrix::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; k += 2) {
    omega(k, k + 1) = 1.0;
    omega(k + 1, k) = -1.0;
  }
  return omega;
}

SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& v) {
  // i*Omega*V is similar to the Hermitian matrix L^T (i*Omega) L with
  // V = L L^T, so a Hermitian solver gives the +/- nu pairs directly.
  Eigen::LLT<Matrix> llt(v.data());
  if (llt.info() != Eigen::Success) {
    throw InvalidState("covariance matrix is not positive definite");
  }
  const Matrix l = llt.matrixL();
  const Matrix a = l.transpose() * symplectic_form(v.n_modes()) * l;
  const ComplexMatrix h = std::complex<double>(0.0, 1.0) * a.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  const Vector& ev = solver.eigenvalues();  // ascending: -nu_N .. -nu_1, nu_1 .. nu_N

  const auto n = static_cast<Eigen::Index>(v.n_modes());
  SymplecticSpectrum spectrum;
  spectrum.values.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double positive = ev(n + k);
    const double negative = -ev(n - 1 - k);
    const double mismatch = std::abs(positive - negative);
    if (mismatch > kPairingTolerance * std::max(1.0, positive)) {
      std::ostringstream msg;
      msg << "symplectic eigenvalue pairing failed (|" << positive << " - " << negative << "|)";
      throw NumericFailure(msg.str());
    }
    spectrum.values.push_back(0.5 * (positive + negative));
  }
  std::sort(spectrum.values.begin(), spectrum.values.end());
  return spectrum;
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& v,
                                   const std::vector<std::size_t>& modes) {
  check_modes(modes, v.n_modes());
  Matrix out = v.data();
  for (auto m : unique_modes(modes)) {
    const auto q = static_cast<Eigen::Index>(2 * m + 1);
    out.row(q) *= -1.0;
    out.col(q) *= -1.0;
  }
  return CovarianceMatrix(std::move(out));
}

double log_negativity_from_nu(double nu_min) {
  if (!(nu_min > 0.0)) {
    throw InvalidArgument("nu_min must be positive");
  }
  if (nu_min >= 1.0 - kSeparableTolerance) {
    return 0.0;
  }
  return -std::log2(nu_min);
}

Interval log_negativity_interval(double nu_min, double nu_err) {
  if (nu_err < 0.0) {
    throw InvalidArgument("nu uncertainty must be non-negative");
  }
  return {log_negativity_from_nu(nu_min + nu_err), log_negativity_from_nu(nu_min - nu_err)};
}

double log_negativity_unchecked(const CovarianceMatrix& v,
                                const std::vector<std::size_t>& bipartition) {
  check_bipartition(bipartition, v.n_modes());
  const auto spectrum = symplectic_eigenvalues(partial_transpose(v, bipartition));
  return log_negativity_from_nu(spectrum.min());
}

double log_negativity(const CovarianceMatrix& v, const std::vector<std::size_t>& bipartition) {
  check_bipartition(bipartition, v.n_modes());
  if (!v.is_physical()) {
    throw InvalidState("log_negativity: covariance matrix violates V + i*Omega >= 0");
  }
  return log_negativity_unchecked(v, bipartition);
}

double purity(const CovarianceMatrix& v) {
  const double det = v.data().determinant();
  if (!(det > 0.0)) {
    throw InvalidState("purity: covariance determinant is not positive");
  }
  return 1.0 / std::sqrt(det);
}

double entropy_of_formation(double nu_min) {
  if (!(nu_min > 0.0) || nu_min > 1.0) {
    throw InvalidArgument("entropy_of_formation: nu_min must lie in (0, 1]");
  }
  const double root = std::sqrt(nu_min);
  const double c_plus = std::pow(1.0 / root + root, 2) / 4.0;
  const double c_minus = std::pow(1.0 / root - root, 2) / 4.0;
  const double minus_term = c_minus > 0.0 ? c_minus * std::log2(c_minus) : 0.0;
  return c_plus * std::log2(c_plus) - minus_term;
}

double entanglement_rate(double photon_flux_intensity, double e_formation, double delta_omega,
                         double band_width, FrequencyUnit unit) {
  if (photon_flux_intensity < 0.0 || e_formation < 0.0 || delta_omega < 0.0 || band_width < 0.0) {
    throw InvalidArgument("entanglement_rate: arguments must be non-negative");
  }
  double rate = 2.0 * photon_flux_intensity * e_formation * (delta_omega + band_width);
  if (unit == FrequencyUnit::Angular) {
    rate /= 2.0 * std::numbers::pi;
  }
  return rate;
}

CovarianceMatrix two_mode_squeezed_vacuum(double r, double phase) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw InvalidArgument("two_mode_squeezed_vacuum: r must be finite and >= 0");
  }
  const double c = std::cosh(2.0 * r);
  const double s = std::sinh(2.0 * r);
  Matrix v = Matrix::Zero(4, 4);
  v.diagonal().setConstant(c);
  Eigen::Matrix2d coupling;
  coupling << std::cos(phase), std::sin(phase), std::sin(phase), -std::cos(phase);
  v.block<2, 2>(0, 2) = s * coupling;
  v.block<2, 2>(2, 0) = s * coupling.transpose();
  return CovarianceMatrix(std::move(v));
}

QuadratureSelector QuadratureSelector::principal(std::vector<std::size_t> modes) {
  QuadratureSelector sel;
  sel.principal_ = true;
  sel.modes_ = unique_modes(modes);
  return sel;
}

QuadratureSelector QuadratureSelector::axes(Vector squeezed, Vector amplified) {
  if (squeezed.size() != amplified.size() || squeezed.size() == 0 || squeezed.size() % 2 != 0) {
    throw InvalidArgument("quadrature axes must have equal, even, non-zero length");
  }
  if (squeezed.norm() == 0.0 || amplified.norm() == 0.0) {
    throw InvalidArgument("quadrature axes must be non-zero");
  }
  QuadratureSelector sel;
  sel.principal_ = false;
  sel.squeezed_ = squeezed.normalized();
  sel.amplified_ = amplified.normalized();
  return sel;
}

SqueezingDb squeezing_db(const CovarianceMatrix& v, const QuadratureSelector& selector) {
  double squeezed = 0.0;
  double amplified = 0.0;
  if (selector.is_principal()) {
    const auto& modes = selector.modes();
    if (modes.empty()) {
      throw InvalidArgument("squeezing_db: principal selector needs at least one mode");
    }
    check_modes(modes, v.n_modes());
    std::vector<Eigen::Index> idx;
    for (auto m : modes) {
      idx.push_back(static_cast<Eigen::Index>(2 * m));
      idx.push_back(static_cast<Eigen::Index>(2 * m + 1));
    }
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix sub(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        sub(i, j) = v(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sub, Eigen::EigenvaluesOnly);
    squeezed = solver.eigenvalues().minCoeff();
    amplified = solver.eigenvalues().maxCoeff();
  } else {
    if (selector.squeezed_axis().size() != v.dimension()) {
      throw InvalidArgument("squeezing_db: axis length does not match covariance dimension");
    }
    squeezed = selector.squeezed_axis().dot(v.data() * selector.squeezed_axis());
    amplified = selector.amplified_axis().dot(v.data() * selector.amplified_axis());
  }
  if (!(squeezed > 0.0) || !(amplified > 0.0)) {
    throw InvalidArgument("squeezing_db: selected variances must be positive");
  }
  return {10.0 * std::log10(squeezed), 10.0 * std::log10(amplified)};
}

EntanglementReport analyze_state(const CovarianceMatrix& v,
                                 const std::vector<std::size_t>& bipartition,
                                 const QuadratureSelector& selector) {
  check_bipartition(bipartition, v.n_modes());
  EntanglementReport report;
  report.physical = v.is_physical();
  report.nu_min = symplectic_eigenvalues(partial_transpose(v, bipartition)).min();
  report.log_negativity = log_negativity_from_nu(report.nu_min);
  report.entropy_of_formation =
      report.nu_min < 1.0 - kSeparableTolerance ? entropy_of_formation(report.nu_min) : 0.0;
  report.purity = purity(v);
  const auto sq = squeezing_db(v, selector);
  report.squeeze_plus_db = sq.s_plus_db;
  report.squeeze_minus_db = sq.s_minus_db;
  return report;
}

}  // namespace twpa::cv
