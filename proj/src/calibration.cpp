#include "twpa/calibration.hpp"

#include "twpa/errors.hpp"
#include "twpa/units.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace twpa::calibration {

namespace {

void check_pair(const stats::QuadratureStatistics& on, const stats::QuadratureStatistics& off) {
  if (on.channels() != off.channels()) {
    throw InvalidArgument("ON and OFF statistics cover different channel sets");
  }
}

MetricRange range_of(const std::vector<double>& corners, double nominal) {
  MetricRange r;
  r.value = nominal;
  r.lower = nominal;
  r.upper = nominal;
  for (double c : corners) {
    r.lower = std::min(r.lower, c);
    r.upper = std::max(r.upper, c);
  }
  return r;
}

}  // namespace

void MeasurementChain::validate() const {
  if (!(g_off > 0.0) || !std::isfinite(g_off)) {
    throw InvalidArgument("measurement chain: g_off must be positive");
  }
  if (!(eta > 0.0) || eta > 1.0) {
    throw InvalidArgument("measurement chain: eta must lie in (0, 1]");
  }
  if (!(t_sys_k >= 0.0) || !std::isfinite(t_sys_k)) {
    throw InvalidArgument("measurement chain: t_sys must be >= 0");
  }
  if (!(z0_ohm > 0.0) || !(f_hz > 0.0) || !(bw_hz > 0.0) || !std::isfinite(z0_ohm) ||
      !std::isfinite(f_hz) || !std::isfinite(bw_hz)) {
    throw InvalidArgument("measurement chain: z0, f and bw must be positive");
  }
}

double vacuum_unit(const MeasurementChain& chain) {
  chain.validate();
  return chain.z0_ohm * units::kPlanck * chain.f_hz * chain.bw_hz / 4.0;
}

double normalization_coefficient(const MeasurementChain& chain) {
  chain.validate();
  return chain.g_off * chain.z0_ohm * units::kPlanck * chain.f_hz * chain.bw_hz / (4.0 * chain.eta);
}

cv::CovarianceMatrix scaled_covariance(const stats::QuadratureStatistics& on,
                                       const stats::QuadratureStatistics& off, double n_coeff) {
  check_pair(on, off);
  if (!(n_coeff > 0.0) || !std::isfinite(n_coeff)) {
    throw InvalidArgument("scaled_covariance: normalization must be positive");
  }
  const Eigen::MatrixXd delta = on.covariance() - off.covariance();
  return cv::CovarianceMatrix(delta / n_coeff +
                              Eigen::MatrixXd::Identity(delta.rows(), delta.cols()));
}

cv::CovarianceMatrix scaled_covariance_gain_form(const stats::QuadratureStatistics& on,
                                                 const stats::QuadratureStatistics& off,
                                                 const MeasurementChain& chain) {
  check_pair(on, off);
  chain.validate();
  const Eigen::MatrixXd delta = on.covariance() - off.covariance();
  const double photon_units = chain.z0_ohm * units::kPlanck * chain.f_hz * chain.bw_hz;
  return cv::CovarianceMatrix(
      4.0 * (chain.eta * (delta / photon_units) / chain.g_off +
             0.25 * Eigen::MatrixXd::Identity(delta.rows(), delta.cols())));
}

cv::CovarianceMatrix renormalize(const cv::CovarianceMatrix& v, double n_from, double n_to) {
  if (!(n_from > 0.0) || !(n_to > 0.0)) {
    throw InvalidArgument("renormalize: normalizations must be positive");
  }
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(v.dimension(), v.dimension());
  return cv::CovarianceMatrix((v.data() - id) * (n_from / n_to) + id);
}

double CalibrationFit::gain_db() const { return units::linear_to_db(gain); }

double CalibrationFit::gain_db_err() const { return 10.0 / std::log(10.0) * gain_err / gain; }

CalibrationFit johnson_nyquist_fit(const std::vector<TemperaturePower>& points, double bw_hz) {
  if (points.size() < 3) {
    throw InvalidArgument("johnson_nyquist_fit needs at least three points");
  }
  if (!(bw_hz > 0.0)) {
    throw InvalidArgument("johnson_nyquist_fit: bandwidth must be positive");
  }
  const double n = static_cast<double>(points.size());
  double t_mean = 0.0;
  double p_mean = 0.0;
  for (const auto& pt : points) {
    if (!std::isfinite(pt.kelvin) || !std::isfinite(pt.watts)) {
      throw InvalidArgument("johnson_nyquist_fit: non-finite point");
    }
    t_mean += pt.kelvin;
    p_mean += pt.watts;
  }
  t_mean /= n;
  p_mean /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& pt : points) {
    sxx += (pt.kelvin - t_mean) * (pt.kelvin - t_mean);
    sxy += (pt.kelvin - t_mean) * (pt.watts - p_mean);
  }
  if (!(sxx > 0.0)) {
    throw InvalidArgument("johnson_nyquist_fit: temperatures must not all be equal");
  }

  CalibrationFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = p_mean - fit.slope * t_mean;
  if (!(fit.slope > 0.0)) {
    throw InvalidArgument("johnson_nyquist_fit: fitted slope is not positive");
  }
  double sse = 0.0;
  for (const auto& pt : points) {
    const double r = pt.watts - (fit.intercept + fit.slope * pt.kelvin);
    fit.residuals.push_back(r);
    sse += r * r;
  }
  fit.dof = static_cast<int>(points.size()) - 2;
  const double s2 = sse / fit.dof;
  const double var_slope = s2 / sxx;
  const double var_intercept = s2 * (1.0 / n + t_mean * t_mean / sxx);
  const double cov_is = -s2 * t_mean / sxx;
  fit.slope_err = std::sqrt(var_slope);
  fit.intercept_err = std::sqrt(var_intercept);

  const double kb_bw = units::kBoltzmann * bw_hz;
  fit.gain = fit.slope / kb_bw;
  fit.gain_err = fit.slope_err / kb_bw;
  const double m = fit.slope;
  const double b = fit.intercept;
  fit.t_n_k = b / m;
  const double var_tn = var_intercept / (m * m) + b * b * var_slope / (m * m * m * m) -
                        2.0 * b * cov_is / (m * m * m);
  fit.t_n_err = std::sqrt(std::max(var_tn, 0.0));
  return fit;
}

std::string format_db_with_error(double db, double err_db, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f ± %.*f dB", decimals, db, decimals, err_db);
  return buf;
}

NoiseTemperature system_noise_temperature(double t_n_off, double delta_snr, double g_twpa) {
  if (!(t_n_off > 0.0) || !(delta_snr > 0.0) || !(g_twpa > 0.0)) {
    throw InvalidArgument("system_noise_temperature: inputs must be positive");
  }
  NoiseTemperature t;
  t.kelvin = t_n_off * (1.0 / delta_snr - 1.0 / g_twpa);
  t.status = t.kelvin < 0.0 ? TemperatureStatus::NegativeWarning : TemperatureStatus::Ok;
  return t;
}

double quantum_efficiency(double added_photons) {
  if (!(added_photons >= 0.0)) {
    throw InvalidArgument("quantum_efficiency: added photons must be >= 0");
  }
  return 1.0 / (1.0 + added_photons);
}

double added_noise_photons(double efficiency) {
  if (!(efficiency > 0.0) || efficiency > 1.0) {
    throw InvalidArgument("added_noise_photons: efficiency must lie in (0, 1]");
  }
  return 1.0 / efficiency - 1.0;
}

double photons_from_kelvin(double kelvin, double f_hz) {
  if (!(f_hz > 0.0)) {
    throw InvalidArgument("photons_from_kelvin: frequency must be positive");
  }
  return units::kBoltzmann * kelvin / (units::kPlanck * f_hz);
}

double kelvin_from_photons(double photons, double f_hz) {
  if (!(f_hz > 0.0)) {
    throw InvalidArgument("kelvin_from_photons: frequency must be positive");
  }
  return photons * units::kPlanck * f_hz / units::kBoltzmann;
}

GaussianityResult gaussianity_from_moments(const stats::ShapeMoments& i,
                                           const stats::ShapeMoments& q, std::uint64_t samples) {
  if (samples < kMinGaussianitySamples) {
    throw InvalidArgument("gaussianity test needs at least " +
                          std::to_string(kMinGaussianitySamples) + " samples");
  }
  GaussianityResult r;
  r.i = i;
  r.q = q;
  r.samples = samples;
  r.worst_skewness = std::max(std::abs(i.skewness), std::abs(q.skewness));
  r.worst_kurtosis_excess = std::max(std::abs(i.kurtosis - 3.0), std::abs(q.kurtosis - 3.0));
  r.pass = r.worst_skewness <= kSkewnessLimit && r.worst_kurtosis_excess <= kKurtosisLimit;
  return r;
}

GaussianityResult gaussianity_test(const records::QuadratureRecord& record) {
  if (record.samples.size() < kMinGaussianitySamples) {
    throw InvalidArgument("gaussianity test needs at least " +
                          std::to_string(kMinGaussianitySamples) + " samples");
  }
  record.validate();
  std::vector<double> i;
  std::vector<double> q;
  i.reserve(record.samples.size());
  q.reserve(record.samples.size());
  for (const auto& s : record.samples) {
    i.push_back(s.i);
    q.push_back(s.q);
  }
  return gaussianity_from_moments(stats::shape_moments(i), stats::shape_moments(q),
                                  record.samples.size());
}

double MetricRange::err() const { return std::max(value - lower, upper - value); }

UncertainReport propagate_uncertainty(const MeasurementChain& chain,
                                      const UncertaintyFactors& factors,
                                      const cv::CovarianceMatrix& v_out,
                                      const std::vector<std::size_t>& bipartition,
                                      const cv::QuadratureSelector& selector, double e0_baseline) {
  if (!(factors.g_off >= 1.0) || !(factors.eta >= 1.0)) {
    throw InvalidArgument("propagate_uncertainty: one-sigma factors must be >= 1");
  }
  if (!(e0_baseline >= 0.0)) {
    throw InvalidArgument("propagate_uncertainty: baseline must be >= 0");
  }
  const double n0 = normalization_coefficient(chain);
  auto metrics = [&](const cv::CovarianceMatrix& v) {
    auto rep = cv::analyze_state(v, bipartition, selector);
    rep.log_negativity = std::max(rep.log_negativity - e0_baseline, 0.0);
    return rep;
  };

  UncertainReport out;
  out.nominal = metrics(v_out);
  std::vector<cv::EntanglementReport> corners;
  std::vector<double> norms;
  for (int sg : {-1, 1}) {
    for (int se : {-1, 1}) {
      MeasurementChain c = chain;
      c.g_off = chain.g_off * std::pow(factors.g_off, sg);
      c.eta = chain.eta * std::pow(factors.eta, se);
      // Corner loss may formally exceed unit transmissivity; the
      // normalization is still well defined.
      const double n = c.g_off * vacuum_unit(chain) / c.eta;
      norms.push_back(n);
      corners.push_back(metrics(renormalize(v_out, n0, n)));
    }
  }
  auto collect = [&](auto member) {
    std::vector<double> v;
    for (const auto& c : corners) {
      v.push_back(c.*member);
    }
    return range_of(v, out.nominal.*member);
  };
  out.log_negativity = collect(&cv::EntanglementReport::log_negativity);
  out.purity = collect(&cv::EntanglementReport::purity);
  out.entropy_of_formation = collect(&cv::EntanglementReport::entropy_of_formation);
  out.nu_min = collect(&cv::EntanglementReport::nu_min);
  out.squeeze_plus_db = collect(&cv::EntanglementReport::squeeze_plus_db);
  out.squeeze_minus_db = collect(&cv::EntanglementReport::squeeze_minus_db);
  out.normalization = range_of(norms, n0);
  return out;
}

}  // namespace twpa::calibration
