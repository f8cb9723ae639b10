#include "twpa/propagation.hpp"

#include "twpa/errors.hpp"
#include "twpa/units.hpp"

#include <cmath>
#include <sstream>

namespace twpa::propagation {

namespace {

using Eigen::Matrix2d;
using Eigen::Matrix4d;

Matrix2d rotation(double theta) {
  Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

// Signal/idler coupling block of the two-mode squeeze generator.
Matrix2d coupling(double pump_phase) {
  Matrix2d c;
  c << std::cos(pump_phase), std::sin(pump_phase), std::sin(pump_phase), -std::cos(pump_phase);
  return c;
}

Matrix4d squeeze_generator(double pump_phase) {
  Matrix4d k = Matrix4d::Zero();
  k.block<2, 2>(0, 2) = coupling(pump_phase);
  k.block<2, 2>(2, 0) = coupling(pump_phase);
  return k;
}

Matrix4d detuning_rotation(double theta) {
  Matrix4d d = Matrix4d::Zero();
  d.block<2, 2>(0, 0) = rotation(theta);
  d.block<2, 2>(2, 2) = rotation(-theta);
  return d;
}

Matrix4d thermal_noise(const NoiseOccupations& noise) {
  Matrix4d n = Matrix4d::Zero();
  n.diagonal() << 2.0 * noise.signal + 1.0, 2.0 * noise.signal + 1.0, 2.0 * noise.idler + 1.0,
      2.0 * noise.idler + 1.0;
  return n;
}

void check_noise(const NoiseOccupations& noise) {
  if (!(noise.signal >= 0.0) || !(noise.idler >= 0.0) || !std::isfinite(noise.signal) ||
      !std::isfinite(noise.idler)) {
    throw InvalidArgument("noise occupations must be finite and >= 0");
  }
}

// Parametric gain step: cosh(r) I + sinh(r) K, with the detuning phase.
GaussianChannel gain_step(double r, double theta, double pump_phase) {
  const Matrix4d t = detuning_rotation(theta) *
                     (std::cosh(r) * Matrix4d::Identity() + std::sinh(r) * squeeze_generator(pump_phase));
  return {t, Matrix4d::Zero()};
}

GaussianChannel loss_step(double eta, const Matrix4d& noise) {
  return {std::sqrt(eta) * Matrix4d::Identity(), (1.0 - eta) * noise};
}

// integral_0^L exp(-lambda x) dx, stable for lambda -> 0 and lambda < 0.
double exp_integral(double lambda, double length) {
  const double z = lambda * length;
  if (std::abs(z) < 1e-8) {
    return length * (1.0 - z / 2.0 + z * z / 6.0);
  }
  return -std::expm1(-z) / lambda;
}

double transposed_nu_min(const cv::CovarianceMatrix& v) {
  return cv::symplectic_eigenvalues(cv::partial_transpose(v, {1})).min();
}

}  // namespace

void PropagationParams::validate() const {
  if (!(kappa >= 0.0) || !(v > 0.0) || !(length >= 0.0) || !(chi >= 0.0)) {
    throw InvalidArgument("propagation parameters need kappa >= 0, chi >= 0, v > 0, length >= 0");
  }
  if (!std::isfinite(kappa) || !std::isfinite(chi) || !std::isfinite(v) || !std::isfinite(length) ||
      !std::isfinite(omega) || !std::isfinite(pump_phase)) {
    throw InvalidArgument("propagation parameters must be finite");
  }
}

Eigen::Matrix2cd scattering_matrix(double x, const PropagationParams& p) {
  p.validate();
  if (!(x >= 0.0) || x > p.length) {
    std::ostringstream msg;
    msg << "scattering_matrix: position " << x << " outside [0, " << p.length << "]";
    throw InvalidArgument(msg.str());
  }
  const std::complex<double> envelope =
      std::exp(std::complex<double>(-p.kappa * x / (2.0 * p.v), p.omega * x / p.v));
  const double r = p.chi * x / p.v;
  Eigen::Matrix2cd s;
  s << envelope * std::cosh(r), envelope * std::sinh(r), envelope * std::sinh(r),
      envelope * std::cosh(r);
  return s;
}

IdealGain ideal_gain(const PropagationParams& p) {
  p.validate();
  if (p.kappa != 0.0) {
    throw InvalidArgument("ideal_gain requires kappa = 0; use distributed_output for lossy lines");
  }
  IdealGain g;
  g.r = p.squeeze_parameter();
  g.amplitude = std::cosh(g.r);
  g.power = g.amplitude * g.amplitude;
  return g;
}

GaussianChannel::GaussianChannel()
    : transfer_(Matrix4d::Identity()), noise_(Matrix4d::Zero()) {}

GaussianChannel::GaussianChannel(Matrix4d transfer, Matrix4d noise)
    : transfer_(std::move(transfer)), noise_(std::move(noise)) {}

cv::CovarianceMatrix GaussianChannel::apply(const cv::CovarianceMatrix& input) const {
  if (input.dimension() != 4) {
    throw InvalidArgument("GaussianChannel acts on two-mode states");
  }
  const Matrix4d in = input.data();
  return cv::CovarianceMatrix(transfer_ * in * transfer_.transpose() + noise_);
}

cv::CovarianceMatrix GaussianChannel::output() const {
  return cv::CovarianceMatrix(transfer_ * transfer_.transpose() + noise_);
}

GaussianChannel GaussianChannel::then(const GaussianChannel& next) const {
  return {next.transfer_ * transfer_,
          next.transfer_ * noise_ * next.transfer_.transpose() + next.noise_};
}

double GaussianChannel::signal_gain() const {
  return 0.5 * transfer_.block<2, 2>(0, 0).squaredNorm();
}

GaussianChannel lumped_channel(const IoChannel& ch, const NoiseOccupations& noise, double pump_phase) {
  check_noise(noise);
  if (!(ch.eta > 0.0) || ch.eta > 1.0) {
    throw InvalidArgument("IoChannel: eta must lie in (0, 1]");
  }
  if (!(ch.g_signal >= 1.0) || !std::isfinite(ch.g_signal)) {
    throw InvalidArgument("IoChannel: parametric gain must be finite and >= 1");
  }
  if (std::abs(ch.g_signal - ch.g_idler) > 1e-9 * ch.g_signal) {
    throw InvalidArgument("IoChannel: signal and idler gains of a two-mode parametric process must match");
  }
  const double cosh_r = std::sqrt(ch.g_signal);
  const double sinh_r = std::sqrt(ch.g_signal - 1.0);
  const GaussianChannel gain(cosh_r * Matrix4d::Identity() + sinh_r * squeeze_generator(pump_phase),
                             Matrix4d::Zero());
  return gain.then(loss_step(ch.eta, thermal_noise(noise)));
}

cv::CovarianceMatrix output_covariance(const IoChannel& channel, const NoiseOccupations& noise) {
  return lumped_channel(channel, noise).output();
}

LossEstimate loss_from_tan_delta(double tan_delta, double electrical_length) {
  if (!(tan_delta >= 0.0) || !(electrical_length >= 0.0)) {
    throw InvalidArgument("loss_from_tan_delta: tan_delta and electrical length must be >= 0");
  }
  LossEstimate loss;
  loss.transmissivity = std::exp(-tan_delta * electrical_length);
  loss.db = units::linear_to_db(loss.transmissivity);
  return loss;
}

DistributedOutput distributed_output(const PropagationParams& p, int n_segments,
                                     const NoiseOccupations& noise) {
  p.validate();
  check_noise(noise);
  if (n_segments < 1) {
    throw InvalidArgument("distributed_output: n_segments must be >= 1");
  }
  const double dx = p.length / n_segments;
  const double half_eta = std::exp(-p.kappa * dx / (2.0 * p.v));
  const Matrix4d n_xi = thermal_noise(noise);
  const GaussianChannel half_loss = loss_step(half_eta, n_xi);
  const GaussianChannel segment =
      half_loss.then(gain_step(p.chi * dx / p.v, p.omega * dx / p.v, p.pump_phase)).then(half_loss);

  GaussianChannel line;
  for (int k = 0; k < n_segments; ++k) {
    line = line.then(segment);
  }

  DistributedOutput out;
  out.line = line;
  out.channel.eta = std::exp(-p.loss_exponent());
  const double g_t = line.signal_gain();
  out.channel.g_signal = g_t / out.channel.eta;
  out.channel.g_idler = 0.5 * line.transfer().block<2, 2>(2, 2).squaredNorm() / out.channel.eta;
  return out;
}

GaussianChannel distributed_channel_exact(const PropagationParams& p, const NoiseOccupations& noise) {
  p.validate();
  check_noise(noise);
  const double a = p.kappa / p.v;
  const double b = p.chi / p.v;
  const double len = p.length;

  const Matrix4d k = squeeze_generator(p.pump_phase);
  const Matrix4d transfer = std::exp(-a * len / 2.0) * detuning_rotation(p.omega * len / p.v) *
                            (std::cosh(b * len) * Matrix4d::Identity() + std::sinh(b * len) * k);

  // integral_0^L T(y) D T(y)^T dy with D = a * diag(N_S, N_S, N_I, N_I);
  // the detuning rotation leaves every block invariant.
  const double j0 = exp_integral(a, len);
  const double f_minus = exp_integral(a - 2.0 * b, len);
  const double f_plus = exp_integral(a + 2.0 * b, len);
  const double jc = 0.5 * (f_minus + f_plus);
  const double js = 0.5 * (f_minus - f_plus);
  const double ns = 2.0 * noise.signal + 1.0;
  const double ni = 2.0 * noise.idler + 1.0;

  Matrix4d n = Matrix4d::Zero();
  n.block<2, 2>(0, 0) = 0.5 * a * (ns * (j0 + jc) + ni * (jc - j0)) * Matrix2d::Identity();
  n.block<2, 2>(2, 2) = 0.5 * a * (ni * (j0 + jc) + ns * (jc - j0)) * Matrix2d::Identity();
  n.block<2, 2>(0, 2) = 0.5 * a * (ns + ni) * js * coupling(p.pump_phase);
  n.block<2, 2>(2, 0) = n.block<2, 2>(0, 2).transpose();
  return {transfer, n};
}

double noise_commutator_weight(const PropagationParams& p, double x, int n_intervals) {
  p.validate();
  if (!(x >= 0.0) || x > p.length) {
    throw InvalidArgument("noise_commutator_weight: position outside the line");
  }
  if (n_intervals < 2) {
    throw InvalidArgument("noise_commutator_weight: need at least two intervals");
  }
  const int n = n_intervals + (n_intervals % 2);
  const double h = x / n;
  auto integrand = [&](double y) {
    const auto s = scattering_matrix(y, p);
    return std::norm(s(0, 0)) - std::norm(s(0, 1));
  };
  double sum = integrand(0.0) + integrand(x);
  for (int k = 1; k < n; ++k) {
    sum += (k % 2 ? 4.0 : 2.0) * integrand(k * h);
  }
  return p.kappa / p.v * sum * h / 3.0;
}

double chi_for_target_nu_min(const PropagationParams& base, const double target,
                             const NoiseOccupations& noise) {
  base.validate();
  if (!(target > 0.0) || !(base.length > 0.0)) {
    throw InvalidArgument("chi_for_target_nu_min: need target > 0 and a line of non-zero length");
  }
  auto nu_at = [&](double chi) {
    PropagationParams p = base;
    p.chi = chi;
    const auto out = distributed_channel_exact(p, noise).output();
    try {
      return transposed_nu_min(out);
    } catch (const InvalidState&) {
      std::ostringstream msg;
      msg << "chi_for_target_nu_min: output at chi=" << chi
          << " is too ill-conditioned to resolve nu_min=" << target;
      throw NumericFailure(msg.str());
    }
  };
  if (nu_at(0.0) <= target) {
    return 0.0;
  }
  double lo = 0.0;
  double hi = base.v / base.length;  // r = 1
  int doublings = 0;
  while (nu_at(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 60) {
      std::ostringstream msg;
      msg << "chi_for_target_nu_min: nu_min=" << target << " is not reachable with this loss";
      throw InvalidArgument(msg.str());
    }
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (nu_at(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace twpa::propagation
