#pragma once

// Traveling-wave gain with distributed loss.
//
// The line is described by the coupled Heisenberg-Langevin equations for a
// signal/idler pair with parametric coupling chi, loss rate kappa and group
// velocity v. Two routes to the output state are provided:
//   * distributed_output: composition of n short segments, each a lumped
//     "half loss / parametric gain / half loss" step;
//   * distributed_channel_exact: the closed-form solution of the
//     covariance equation of motion.
// Both produce a GaussianChannel acting on 4x4 covariance matrices in
// (I_S, Q_S, I_I, Q_I) order.

#include "twpa/gaussian_cv.hpp"

#include <Eigen/Dense>

namespace twpa::propagation {

struct PropagationParams {
  double kappa = 0.0;   // distributed loss rate, 1/s
  double chi = 0.0;     // parametric interaction strength, 1/s
  double v = 1.0;       // group velocity, m/s
  double length = 0.0;  // m
  double omega = 0.0;   // signal detuning, rad/s (common phase only)
  double pump_phase = 0.0;  // phase of chi, rad

  void validate() const;
  double loss_exponent() const { return kappa * length / v; }  // kappa L / v
  double squeeze_parameter() const { return chi * length / v; }  // r = chi L / v
};

// S11 = S22 = exp(-kappa x / 2v + i omega x / v) cosh(chi x / v),
// S12 = S21 = exp(-kappa x / 2v + i omega x / v) sinh(chi x / v).
Eigen::Matrix2cd scattering_matrix(double x, const PropagationParams& params);

struct IdealGain {
  double r = 0.0;          // chi L / v
  double amplitude = 1.0;  // cosh r
  double power = 1.0;      // cosh^2 r
};

// Lossless gain; throws InvalidArgument if kappa != 0.
IdealGain ideal_gain(const PropagationParams& params);

// Lumped input-output summary of the line.
struct IoChannel {
  double g_signal = 1.0;  // direct power gain at the signal frequency
  double g_idler = 1.0;   // direct power gain at the idler frequency
  double eta = 1.0;       // power transmissivity, (0, 1]

  double net_gain() const { return eta * g_signal; }  // G_T = eta G_S
};

// Mean thermal photon number of the loss-port noise modes.
struct NoiseOccupations {
  double signal = 0.0;
  double idler = 0.0;
};

// V -> T V T^T + N
class GaussianChannel {
 public:
  GaussianChannel();
  GaussianChannel(Eigen::Matrix4d transfer, Eigen::Matrix4d noise);

  const Eigen::Matrix4d& transfer() const { return transfer_; }
  const Eigen::Matrix4d& noise() const { return noise_; }

  cv::CovarianceMatrix apply(const cv::CovarianceMatrix& input) const;
  // Vacuum input.
  cv::CovarianceMatrix output() const;
  // This channel followed by `next`.
  GaussianChannel then(const GaussianChannel& next) const;
  // Direct power gain of mode 0 (signal) implied by the transfer matrix.
  double signal_gain() const;

 private:
  Eigen::Matrix4d transfer_;
  Eigen::Matrix4d noise_;
};

// Two-mode parametric gain G = cosh^2 r followed by loss eta with thermal
// noise at the given occupations. The gains must be equal: a two-mode
// parametric process amplifies signal and idler identically.
GaussianChannel lumped_channel(const IoChannel& channel, const NoiseOccupations& noise = {},
                               double pump_phase = 0.0);

// Output covariance of the lumped channel for vacuum input. With eta = 1
// this is the two-mode squeezed vacuum with cosh^2 r = G.
cv::CovarianceMatrix output_covariance(const IoChannel& channel,
                                       const NoiseOccupations& noise = {});

struct LossEstimate {
  double transmissivity = 1.0;
  double db = 0.0;
};

// Dielectric loss exp(-tan_delta * theta) for electrical length theta.
LossEstimate loss_from_tan_delta(double tan_delta, double electrical_length);

struct DistributedOutput {
  IoChannel channel;
  GaussianChannel line;
};

// Segment composition over n_segments equal pieces of the line.
DistributedOutput distributed_output(const PropagationParams& params, int n_segments,
                                     const NoiseOccupations& noise = {});

// Closed-form solution of the distributed model.
GaussianChannel distributed_channel_exact(const PropagationParams& params,
                                          const NoiseOccupations& noise = {});

// (kappa / v) * integral_0^x (|S11(x - x')|^2 - |S12(x - x')|^2) dx'
// by composite Simpson with n_intervals (rounded up to even) panels.
double noise_commutator_weight(const PropagationParams& params, double x, int n_intervals);

// Smallest chi >= 0 for which the exact line output (vacuum input) reaches
// the requested partially-transposed symplectic eigenvalue. Throws
// NumericFailure when the gain needed is too large to resolve the
// squeezed quadrature in double precision.
double chi_for_target_nu_min(const PropagationParams& params, double target_nu_min,
                             const NoiseOccupations& noise = {});

}  // namespace twpa::propagation
