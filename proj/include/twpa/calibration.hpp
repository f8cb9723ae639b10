#pragma once

// Reconstruction of the vacuum-referenced amplifier output covariance from
// pump-on / pump-off quadrature statistics, Johnson-Nyquist gain fits,
// Gaussianity checks and corner-style uncertainty propagation.
//
// All quantities are linear; dB conversions belong to the caller.

#include "twpa/gaussian_cv.hpp"
#include "twpa/records.hpp"
#include "twpa/statistics.hpp"

#include <string>
#include <vector>

namespace twpa::calibration {

struct MeasurementChain {
  double g_off = 1.0;    // measured pump-off total gain
  double eta = 1.0;      // TWPA internal transmissivity, (0, 1]
  double t_sys_k = 0.0;  // system noise temperature, K
  double z0_ohm = 50.0;
  double f_hz = 4.8e9;
  double bw_hz = 1e6;

  // Throws InvalidArgument on g_off <= 0, eta outside (0, 1], t_sys < 0,
  // z0 <= 0, f <= 0 or bw <= 0.
  void validate() const;
  // Gain of the chain after the TWPA, g_off / eta.
  double system_gain() const { return g_off / eta; }
};

// Z0 h f BW / 4: measured V^2 of one vacuum unit at unit gain.
double vacuum_unit(const MeasurementChain& chain);

// N = G_OFF Z0 h f BW / (4 eta), in V^2.
double normalization_coefficient(const MeasurementChain& chain);

// (V_ON - V_OFF) / N + I, elementwise. Throws InvalidArgument when the
// channel sets differ or n_coeff <= 0.
cv::CovarianceMatrix scaled_covariance(const stats::QuadratureStatistics& on,
                                       const stats::QuadratureStatistics& off, double n_coeff);

// 4 eta (V_ON - V_OFF) / (G_OFF Z0 h f BW) + I; algebraically equal to
// scaled_covariance with N from the same chain.
cv::CovarianceMatrix scaled_covariance_gain_form(const stats::QuadratureStatistics& on,
                                                 const stats::QuadratureStatistics& off,
                                                 const MeasurementChain& chain);

// V measured with normalization n_from, re-expressed with n_to.
cv::CovarianceMatrix renormalize(const cv::CovarianceMatrix& v, double n_from, double n_to);

struct TemperaturePower {
  double kelvin = 0.0;
  double watts = 0.0;
};

// P(T) = BW k_B G (T_N + T), fitted by ordinary least squares.
struct CalibrationFit {
  double gain = 0.0;
  double gain_err = 0.0;
  double t_n_k = 0.0;
  double t_n_err = 0.0;
  double slope = 0.0;      // W / K
  double intercept = 0.0;  // W
  double slope_err = 0.0;
  double intercept_err = 0.0;
  std::vector<double> residuals;
  int dof = 0;

  double gain_db() const;
  double gain_db_err() const;
};

// Throws InvalidArgument for fewer than three points, bw <= 0, non-finite
// input, all temperatures equal or a non-positive slope.
CalibrationFit johnson_nyquist_fit(const std::vector<TemperaturePower>& points, double bw_hz);

// "91.74 ± 0.20 dB"
std::string format_db_with_error(double db, double err_db, int decimals = 2);

enum class TemperatureStatus { Ok, NegativeWarning };

struct NoiseTemperature {
  double kelvin = 0.0;
  TemperatureStatus status = TemperatureStatus::Ok;
};

// T_sys = T_N_OFF (1 / delta_snr - 1 / G_T). g_twpa may be +inf.
NoiseTemperature system_noise_temperature(double t_n_off, double delta_snr, double g_twpa);

// eta_e = 1 / (1 + N) and its inverse.
double quantum_efficiency(double added_photons);
double added_noise_photons(double efficiency);
// N = k_B T / (h f) and its inverse.
double photons_from_kelvin(double kelvin, double f_hz);
double kelvin_from_photons(double photons, double f_hz);

inline constexpr double kSkewnessLimit = 0.01;
inline constexpr double kKurtosisLimit = 0.01;
inline constexpr std::size_t kMinGaussianitySamples = 10000;

struct GaussianityResult {
  stats::ShapeMoments i;
  stats::ShapeMoments q;
  double worst_skewness = 0.0;        // largest |skewness|
  double worst_kurtosis_excess = 0.0; // largest |kurtosis - 3|
  std::uint64_t samples = 0;
  bool pass = false;
};

GaussianityResult gaussianity_from_moments(const stats::ShapeMoments& i,
                                           const stats::ShapeMoments& q, std::uint64_t samples);

// Throws InvalidArgument below kMinGaussianitySamples samples.
GaussianityResult gaussianity_test(const records::QuadratureRecord& record);

// Multiplicative one-sigma factors (>= 1) on G_OFF and eta.
struct UncertaintyFactors {
  double g_off = 1.0;
  double eta = 1.0;
};

struct MetricRange {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;

  double err() const;  // max(value - lower, upper - value)
};

struct UncertainReport {
  cv::EntanglementReport nominal;
  MetricRange log_negativity;
  MetricRange purity;
  MetricRange entropy_of_formation;
  MetricRange nu_min;
  MetricRange squeeze_plus_db;
  MetricRange squeeze_minus_db;
  MetricRange normalization;  // V^2
};

// Evaluates the metrics of v_out re-normalized at the four corners
// (G_OFF * f^+-1, eta * f^+-1) and at the nominal point. Reported log
// negativities are max(E - e0_baseline, 0).
UncertainReport propagate_uncertainty(const MeasurementChain& chain,
                                      const UncertaintyFactors& factors,
                                      const cv::CovarianceMatrix& v_out,
                                      const std::vector<std::size_t>& bipartition,
                                      const cv::QuadratureSelector& selector,
                                      double e0_baseline = 0.0);

}  // namespace twpa::calibration
