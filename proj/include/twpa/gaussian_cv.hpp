#pragma once

// Gaussian continuous-variable states described by their quadrature
// covariance matrix, and the entanglement / squeezing figures of merit
// derived from it.
//
// Conventions used throughout:
//   * quadrature ordering (I_1, Q_1, ..., I_N, Q_N);
//   * vacuum-normalized units, so the vacuum covariance is the identity;
//   * the symplectic form is block-diagonal with [[0, 1], [-1, 0]] blocks,
//     and a state is physical iff V + i*Omega is positive semidefinite.

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace twpa::cv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class CovarianceMatrix {
 public:
  // Throws InvalidArgument for an empty, non-square, odd-sized or
  // non-finite matrix and InvalidState when it is not symmetric to 1e-12
  // relative. The stored matrix is exactly symmetric.
  explicit CovarianceMatrix(Matrix data);

  static CovarianceMatrix vacuum(std::size_t n_modes);

  std::size_t n_modes() const { return static_cast<std::size_t>(data_.rows() / 2); }
  Eigen::Index dimension() const { return data_.rows(); }
  const Matrix& data() const { return data_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

  // Smallest eigenvalue of the Hermitian matrix V + i*Omega.
  double physicality_margin() const;
  bool is_physical(double tolerance = 1e-9) const;

 private:
  Matrix data_;
};

struct SymplecticSpectrum {
  std::vector<double> values;  // ascending, one per mode

  double min() const { return values.front(); }
};

struct EntanglementReport {
  double log_negativity = 0.0;        // bits
  double purity = 1.0;
  double entropy_of_formation = 0.0;  // ebits
  double nu_min = 1.0;                // of the partially transposed state
  double squeeze_plus_db = 0.0;       // squeezed joint quadrature
  double squeeze_minus_db = 0.0;      // amplified joint quadrature
  bool physical = true;
};

Matrix symplectic_form(std::size_t n_modes);

// Absolute eigenvalues of i*Omega*V, one per mode. Throws InvalidState if
// V is not positive definite.
SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& v);

// Momentum reversal on the selected modes. Exact involution.
CovarianceMatrix partial_transpose(const CovarianceMatrix& v,
                                   const std::vector<std::size_t>& modes);

// E = max(-log2 nu_min, 0) of the state partially transposed on
// `bipartition`. Throws InvalidState for an unphysical input.
double log_negativity(const CovarianceMatrix& v,
                      const std::vector<std::size_t>& bipartition);

// Same as log_negativity but skips the physicality gate; used on noisy
// reconstructions where a small violation is expected and reported.
double log_negativity_unchecked(const CovarianceMatrix& v,
                                const std::vector<std::size_t>& bipartition);

// max(-log2 nu_min, 0); nu_min within 1e-12 of 1 gives exactly 0.
double log_negativity_from_nu(double nu_min);

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

// Log-negativity range for nu_min +/- nu_err.
Interval log_negativity_interval(double nu_min, double nu_err);

// mu = 1 / sqrt(det V).
double purity(const CovarianceMatrix& v);

// Entropy of formation of a symmetric two-mode Gaussian state from the
// smallest partially-transposed symplectic eigenvalue:
//   c(+/-) = (nu^(-1/2) +/- nu^(1/2))^2 / 4,
//   E_F    = c+ log2 c+ - c- log2 c-.
double entropy_of_formation(double nu_min);

enum class FrequencyUnit { Angular, Hertz };

// R_E = 2 <I_1^2> E_F (delta_omega + band_width), returned in ebits/s.
// With FrequencyUnit::Angular the frequencies are rad/s and the result is
// divided by 2 pi.
double entanglement_rate(double photon_flux_intensity, double e_formation,
                         double delta_omega, double band_width,
                         FrequencyUnit unit = FrequencyUnit::Angular);

CovarianceMatrix two_mode_squeezed_vacuum(double r, double phase = 0.0);

// Chooses which variances are reported as S+ (squeezed) and S- (amplified).
class QuadratureSelector {
 public:
  // Smallest and largest eigenvalue of the sub-covariance of `modes`.
  static QuadratureSelector principal(std::vector<std::size_t> modes);
  // Variances along two explicit directions in quadrature space
  // (normalized internally).
  static QuadratureSelector axes(Vector squeezed, Vector amplified);

  bool is_principal() const { return principal_; }
  const std::vector<std::size_t>& modes() const { return modes_; }
  const Vector& squeezed_axis() const { return squeezed_; }
  const Vector& amplified_axis() const { return amplified_; }

 private:
  bool principal_ = true;
  std::vector<std::size_t> modes_;
  Vector squeezed_;
  Vector amplified_;
};

struct SqueezingDb {
  double s_plus_db = 0.0;
  double s_minus_db = 0.0;
};

SqueezingDb squeezing_db(const CovarianceMatrix& v, const QuadratureSelector& selector);

// Full metric set. Never throws on mild unphysicality; the `physical` flag
// records whether V + i*Omega >= 0 held.
EntanglementReport analyze_state(const CovarianceMatrix& v,
                                 const std::vector<std::size_t>& bipartition,
                                 const QuadratureSelector& selector);

}  // namespace twpa::cv
