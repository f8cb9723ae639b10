#include "twpa/calibration.hpp"
#include "twpa/errors.hpp"
#include "twpa/gaussian_cv.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace twpa;
using namespace twpa::calibration;

namespace {

constexpr double kH = 6.62607015e-34;
constexpr double kKb = 1.380649e-23;

MeasurementChain reference_chain() {
  MeasurementChain c;
  c.g_off = std::pow(10.0, 9.174);
  c.eta = std::pow(10.0, -0.065);
  c.t_sys_k = 0.35;
  return c;
}

stats::QuadratureStatistics sample_statistics(const Eigen::MatrixXd& cov, std::size_t n, std::uint64_t seed) {
  const Eigen::MatrixXd l = cov.llt().matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const Eigen::Index d = cov.rows();
  std::vector<std::string> labels;
  for (Eigen::Index k = 0; k < d / 2; ++k) labels.push_back("ch" + std::to_string(k));
  stats::QuadratureStatistics acc(labels);
  stats::RowMatrix rows(1000, d);
  for (std::size_t done = 0; done < n; done += 1000) {
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      Eigen::VectorXd z(d);
      for (auto& x : z) x = g(rng);
      rows.row(r) = (l * z).transpose();
    }
    acc.add_rows(rows);
  }
  return acc;
}

}  // namespace

TEST(MeasurementChain, Validation) {
  EXPECT_NO_THROW(reference_chain().validate());
  auto c = reference_chain();
  c.eta = 1.2;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = reference_chain();
  c.g_off = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = reference_chain();
  c.bw_hz = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = reference_chain();
  c.t_sys_k = -0.1;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Normalization, ReferenceChainValue) {
  const auto c = reference_chain();
  EXPECT_NEAR(normalization_coefficient(c), 6.892984149281607e-08, 1e-22);
  const double oracle = c.g_off * 50.0 * kH * 4.8e9 * 1e6 / (4.0 * c.eta);
  EXPECT_NEAR(normalization_coefficient(c) / oracle, 1.0, 1e-15);
  EXPECT_NEAR(vacuum_unit(c), 50.0 * kH * 4.8e9 * 1e6 / 4.0, 1e-30);
  EXPECT_NEAR(c.system_gain(), c.g_off / c.eta, 1e-6);
}

TEST(ScaledCovariance, TwoFormsAgree) {
  const auto chain = reference_chain();
  const double n0 = normalization_coefficient(chain);
  const Eigen::MatrixXd off_cov = 3.0 * n0 * Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd on_cov = off_cov + n0 * (cv::two_mode_squeezed_vacuum(0.4).data() -
                                                 Eigen::MatrixXd::Identity(4, 4));
  const auto on = sample_statistics(on_cov, 20000, 1);
  const auto off = sample_statistics(off_cov, 20000, 2);
  const auto a = scaled_covariance(on, off, n0);
  const auto b = scaled_covariance_gain_form(on, off, chain);
  EXPECT_LT((a.data() - b.data()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ScaledCovariance, IdenticalOnOffGivesVacuum) {
  const auto stats = sample_statistics(2.0 * Eigen::MatrixXd::Identity(4, 4), 5000, 3);
  const auto v = scaled_covariance(stats, stats, 1e-7);
  EXPECT_EQ(v.data(), Eigen::MatrixXd::Identity(4, 4));
  const auto g = scaled_covariance_gain_form(stats, stats, reference_chain());
  EXPECT_LT((g.data() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(scaled_covariance(stats, stats, 0.0), InvalidArgument);
  const auto single = sample_statistics(Eigen::MatrixXd::Identity(2, 2), 5000, 4);
  EXPECT_THROW(scaled_covariance(stats, single, 1.0), InvalidArgument);
}

TEST(ScaledCovariance, RecoversStateFromExactStatistics) {
  const double n0 = 2.5e-8;
  const Eigen::MatrixXd truth = cv::two_mode_squeezed_vacuum(0.3).data();
  const Eigen::MatrixXd off_cov = 4.0 * n0 * Eigen::MatrixXd::Identity(4, 4);
  const auto on = sample_statistics(off_cov + n0 * (truth - Eigen::MatrixXd::Identity(4, 4)), 400000, 5);
  const auto off = sample_statistics(off_cov, 400000, 6);
  const auto v = scaled_covariance(on, off, n0);
  EXPECT_LT((v.data() - truth).cwiseAbs().maxCoeff(), 0.05);
}

TEST(ScaledCovariance, EntanglementGrowsWithTransmissivity) {
  auto chain = reference_chain();
  const double n0 = normalization_coefficient(chain);
  const Eigen::MatrixXd off_cov = 3.0 * n0 * Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd on_cov =
      off_cov + n0 * (cv::two_mode_squeezed_vacuum(0.3).data() - Eigen::MatrixXd::Identity(4, 4));
  const auto on = sample_statistics(on_cov, 20000, 7);
  const auto off = sample_statistics(off_cov, 20000, 8);
  double previous = -1.0;
  for (double eta_db : {-1.5, -1.0, -0.65, -0.3, 0.0}) {
    chain.eta = std::pow(10.0, eta_db / 10.0);
    const auto rep = cv::analyze_state(scaled_covariance_gain_form(on, off, chain), {1},
                                       cv::QuadratureSelector::principal({0, 1}));
    EXPECT_GT(rep.log_negativity, previous) << eta_db;
    previous = rep.log_negativity;
  }
}

TEST(Renormalize, ScalesDeviationFromVacuum) {
  const auto v = cv::two_mode_squeezed_vacuum(0.5);
  const auto w = renormalize(v, 2.0, 4.0);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  EXPECT_LT(((w.data() - id) - 0.5 * (v.data() - id)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((renormalize(w, 4.0, 2.0).data() - v.data()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_THROW(renormalize(v, 0.0, 1.0), InvalidArgument);
}

TEST(JohnsonNyquist, ExactLineIsRecovered) {
  const double bw = 1e6;
  const double gain = std::pow(10.0, 9.174);
  const double t_n = 2.3;
  std::vector<TemperaturePower> pts;
  for (double t : {0.05, 0.5, 1.0, 2.0, 3.0, 4.0}) {
    pts.push_back({t, bw * kKb * gain * (t_n + t)});
  }
  const auto fit = johnson_nyquist_fit(pts, bw);
  EXPECT_NEAR(fit.gain / gain, 1.0, 1e-10);
  EXPECT_NEAR(fit.t_n_k, t_n, 1e-9);
  EXPECT_NEAR(fit.gain_db(), 91.74, 1e-9);
  EXPECT_EQ(fit.dof, 4);
  EXPECT_LT(fit.gain_err / fit.gain, 1e-10);
  for (double r : fit.residuals) {
    EXPECT_LT(std::abs(r), 1e-10 * pts.back().watts);
  }
}

TEST(JohnsonNyquist, MatchesMatrixLeastSquares) {
  const double bw = 2e6;
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<TemperaturePower> pts;
  const double scale = bw * kKb * 1e9;
  for (double t : {0.1, 0.6, 1.1, 1.9, 2.7, 3.5, 4.2}) {
    pts.push_back({t, scale * (1.7 + t) * (1.0 + noise(rng))});
  }
  const auto fit = johnson_nyquist_fit(pts, bw);

  const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    x(k, 0) = 1.0;
    x(k, 1) = pts[static_cast<std::size_t>(k)].kelvin;
    y(k) = pts[static_cast<std::size_t>(k)].watts / scale;
  }
  const Eigen::Vector2d beta = x.colPivHouseholderQr().solve(y);
  const double s2 = (y - x * beta).squaredNorm() / static_cast<double>(n - 2);
  const Eigen::Matrix2d cov = s2 * (x.transpose() * x).inverse();
  EXPECT_NEAR(fit.intercept / scale, beta(0), 1e-10);
  EXPECT_NEAR(fit.slope / scale, beta(1), 1e-10);
  EXPECT_NEAR(fit.slope_err / scale, std::sqrt(cov(1, 1)), 1e-10);
  EXPECT_NEAR(fit.intercept_err / scale, std::sqrt(cov(0, 0)), 1e-10);
  // Delta method for T_N = b / m.
  const Eigen::Vector2d grad(1.0 / beta(1), -beta(0) / (beta(1) * beta(1)));
  EXPECT_NEAR(fit.t_n_k, beta(0) / beta(1), 1e-10);
  EXPECT_NEAR(fit.t_n_err, std::sqrt(grad.dot(cov * grad)), 1e-10);
  EXPECT_NEAR(fit.gain, beta(1) * 1e9, 1e-1);
  EXPECT_NEAR(fit.gain_db_err(), 10.0 / std::log(10.0) * std::sqrt(cov(1, 1)) / beta(1), 1e-10);
}

TEST(JohnsonNyquist, RejectsDegenerateInput) {
  EXPECT_THROW(johnson_nyquist_fit({{1.0, 1.0}, {2.0, 2.0}}, 1e6), InvalidArgument);
  EXPECT_THROW(johnson_nyquist_fit({{1.0, 1.0}, {1.0, 2.0}, {1.0, 3.0}}, 1e6), InvalidArgument);
  EXPECT_THROW(johnson_nyquist_fit({{1.0, 3.0}, {2.0, 2.0}, {3.0, 1.0}}, 1e6), InvalidArgument);
  EXPECT_THROW(johnson_nyquist_fit({{1.0, 1.0}, {2.0, 2.0}, {3.0, 3.0}}, 0.0), InvalidArgument);
  EXPECT_THROW(johnson_nyquist_fit({{1.0, 1.0}, {2.0, std::nan("")}, {3.0, 3.0}}, 1e6),
               InvalidArgument);
}

TEST(FormatDb, TwoDecimals) {
  EXPECT_EQ(format_db_with_error(91.7400001, 0.2, 2), "91.74 ± 0.20 dB");
  EXPECT_EQ(format_db_with_error(-0.65, 0.2, 1), "-0.7 ± 0.2 dB");
}

TEST(NoiseTemperature, SystemTemperatureAndWarning) {
  const auto t = system_noise_temperature(10.0, 20.0, 100.0);
  EXPECT_NEAR(t.kelvin, 10.0 * (1.0 / 20.0 - 1.0 / 100.0), 1e-15);
  EXPECT_EQ(t.status, TemperatureStatus::Ok);
  EXPECT_NEAR(system_noise_temperature(10.0, 20.0, INFINITY).kelvin, 0.5, 1e-15);
  const auto neg = system_noise_temperature(10.0, 200.0, 100.0);
  EXPECT_LT(neg.kelvin, 0.0);
  EXPECT_EQ(neg.status, TemperatureStatus::NegativeWarning);
  EXPECT_THROW(system_noise_temperature(0.0, 1.0, 1.0), InvalidArgument);
}

TEST(NoiseTemperature, PhotonConversionsAndEfficiency) {
  EXPECT_NEAR(added_noise_photons(0.69), 0.4492753623188408, 1e-15);
  EXPECT_NEAR(quantum_efficiency(added_noise_photons(0.69)), 0.69, 1e-15);
  const double n = photons_from_kelvin(0.35, 4.8e9);
  EXPECT_NEAR(n, kKb * 0.35 / (kH * 4.8e9), 1e-12);
  EXPECT_NEAR(kelvin_from_photons(n, 4.8e9), 0.35, 1e-15);
  EXPECT_THROW(added_noise_photons(0.0), InvalidArgument);
  EXPECT_THROW(quantum_efficiency(-1.0), InvalidArgument);
}

TEST(Gaussianity, GaussianPassesUniformFails) {
  const std::size_t n = 4000000;
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g(0.0, 1e-3);
  records::QuadratureRecord gauss;
  gauss.channel = "ch0";
  gauss.samples.resize(n);
  for (auto& s : gauss.samples) s = {g(rng), g(rng)};
  const auto ok = gaussianity_test(gauss);
  EXPECT_TRUE(ok.pass) << ok.worst_skewness << " " << ok.worst_kurtosis_excess;
  EXPECT_EQ(ok.samples, n);

  std::uniform_real_distribution<double> u(-1.0, 1.0);
  records::QuadratureRecord flat = gauss;
  for (auto& s : flat.samples) s = {u(rng), g(rng)};
  const auto bad = gaussianity_test(flat);
  EXPECT_FALSE(bad.pass);
  EXPECT_NEAR(bad.i.kurtosis, 1.8, 0.01);

  flat.samples.resize(kMinGaussianitySamples - 1);
  EXPECT_THROW(gaussianity_test(flat), InvalidArgument);
}

TEST(Gaussianity, InvariantUnderAffineRescaling) {
  std::mt19937_64 rng(11);
  std::gamma_distribution<double> skewed(20.0, 1.0);
  records::QuadratureRecord r;
  r.channel = "ch0";
  r.samples.resize(50000);
  for (auto& s : r.samples) s = {skewed(rng), skewed(rng)};
  const auto a = gaussianity_test(r);
  for (auto& s : r.samples) s = {3.0e-4 * s.i - 7.0, 12.0 * s.q + 1e3};
  const auto b = gaussianity_test(r);
  EXPECT_NEAR(a.i.skewness, b.i.skewness, 1e-8);
  EXPECT_NEAR(a.q.kurtosis, b.q.kurtosis, 1e-8);
  EXPECT_EQ(a.pass, b.pass);
}

TEST(Gaussianity, ThresholdsAreInclusive) {
  const stats::ShapeMoments edge{0.01, 3.01};
  EXPECT_TRUE(gaussianity_from_moments(edge, {0.0, 3.0}, kMinGaussianitySamples).pass);
  EXPECT_FALSE(gaussianity_from_moments({0.0101, 3.0}, {0.0, 3.0}, kMinGaussianitySamples).pass);
  EXPECT_FALSE(gaussianity_from_moments({0.0, 2.985}, {0.0, 3.0}, kMinGaussianitySamples).pass);
}

TEST(Uncertainty, CornersSpanFourTenthsOfADecibelInNormalization) {
  const auto chain = reference_chain();
  const UncertaintyFactors f{std::pow(10.0, 0.02), std::pow(10.0, 0.02)};
  const auto v = cv::two_mode_squeezed_vacuum(-0.5 * std::log(0.55));
  const auto rep = propagate_uncertainty(chain, f, v, {1}, cv::QuadratureSelector::principal({0, 1}));
  const double n0 = normalization_coefficient(chain);
  EXPECT_NEAR(rep.normalization.value, n0, 1e-22);
  EXPECT_NEAR(10.0 * std::log10(rep.normalization.upper / n0), 0.4, 1e-12);
  EXPECT_NEAR(10.0 * std::log10(rep.normalization.lower / n0), -0.4, 1e-12);
  EXPECT_NEAR(rep.log_negativity.value, 0.8624964762500651, 1e-9);
  EXPECT_LT(rep.log_negativity.lower, rep.log_negativity.value);
  EXPECT_GT(rep.log_negativity.upper, rep.log_negativity.value);
  EXPECT_LT(rep.nu_min.lower, rep.nu_min.value);
  EXPECT_GT(rep.nu_min.upper, rep.nu_min.value);
  // Independent corner: the largest normalization shrinks V - I the most.
  const auto shrunk = renormalize(v, n0, rep.normalization.upper);
  EXPECT_NEAR(rep.log_negativity.lower, cv::log_negativity(shrunk, {1}), 1e-12);
}

TEST(Uncertainty, BaselineSubtractionClampsAtZero) {
  const auto chain = reference_chain();
  const auto v = cv::two_mode_squeezed_vacuum(0.05);
  const double e = cv::log_negativity(v, {1});
  const auto rep = propagate_uncertainty(chain, {1.0, 1.0}, v, {1},
                                         cv::QuadratureSelector::principal({0, 1}), e + 0.1);
  EXPECT_EQ(rep.log_negativity.value, 0.0);
  EXPECT_EQ(rep.log_negativity.err(), 0.0);
  const auto partial = propagate_uncertainty(chain, {1.0, 1.0}, v, {1},
                                             cv::QuadratureSelector::principal({0, 1}), 0.5 * e);
  EXPECT_NEAR(partial.log_negativity.value, 0.5 * e, 1e-12);
  EXPECT_THROW(propagate_uncertainty(chain, {0.9, 1.0}, v, {1}, cv::QuadratureSelector::principal({0, 1})),
               InvalidArgument);
}
