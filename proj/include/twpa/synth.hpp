#pragma once

// Synthetic pump-on / pump-off quadrature records for a known amplifier
// output state, passed through a chain with gain G_sys = G_OFF / eta and
// phase-insensitive added noise.

#include "twpa/calibration.hpp"
#include "twpa/gaussian_cv.hpp"
#include "twpa/propagation.hpp"
#include "twpa/records.hpp"
#include "twpa/statistics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace twpa::synth {

// Mid-tread uniform quantizer, saturating at +-full_scale_v.
struct Quantizer {
  int bits = 14;
  double full_scale_v = 1.0;

  double step() const;
  double apply(double x) const;
};

struct ChainScenario {
  cv::CovarianceMatrix target_state = cv::CovarianceMatrix::vacuum(2);
  calibration::MeasurementChain chain;
  std::uint64_t n_samples = 1;
  std::uint64_t rng_seed = 0;
  std::optional<Quantizer> quantizer;
  double sample_rate = 1e6;  // Hz, recorded in the headers only
  // Thermal occupation of the added-noise modes; derived from
  // chain.t_sys_k when unset.
  std::optional<double> amplifier_occupation;

  // Throws InvalidArgument for n_samples = 0 or a bad chain/quantizer and
  // InvalidState for an unphysical target.
  void validate() const;
};

// n_h with (G_sys - 1)(2 n_h + 1) = 2 G_sys k_B T_sys / (h f), clipped at 0
// (a phase-insensitive amplifier adds at least vacuum noise).
double amplifier_occupation(const calibration::MeasurementChain& chain);

// Covariance of the digitized quadratures in V^2:
//   ON:  u [G_sys V_out + (G_sys - 1)(2 n_h + 1) I]
//   OFF: u [G_sys I     + (G_sys - 1)(2 n_h + 1) I]
// with u = Z0 h f BW / 4.
Eigen::MatrixXd measured_covariance(const ChainScenario& scenario, records::PumpState state);

inline constexpr std::size_t kChunkRows = 1 << 16;

using RowSink = std::function<void(const Eigen::Ref<const stats::RowMatrix>&)>;

// Streams n_samples rows in chunks of kChunkRows. Chunk k is drawn from its
// own generator seeded by (rng_seed, pump state, k), so the output does not
// depend on how chunks are scheduled.
void generate_rows(const ChainScenario& scenario, records::PumpState state, const RowSink& sink);

struct RecordPair {
  records::RecordSet on;
  records::RecordSet off;
};

RecordPair sample_records(const ChainScenario& scenario);

struct StatisticsPair {
  stats::QuadratureStatistics on;
  stats::QuadratureStatistics off;
};

// Same samples as sample_records, reduced on the fly.
StatisticsPair sample_statistics(const ChainScenario& scenario);

// Excess noise added to the true output state, coefficient (chi/chi_ref)^exponent
// vacuum units on every quadrature.
struct SaturationHook {
  double coefficient = 0.0;
  double chi_ref = 1.0;
  double exponent = 4.0;

  double excess(double chi) const;
};

// Line output for vacuum input at the given chi from the closed-form
// distributed model, plus the saturation excess when a hook is given.
cv::CovarianceMatrix line_output(const propagation::PropagationParams& line,
                                 const propagation::NoiseOccupations& line_noise, double chi,
                                 const std::optional<SaturationHook>& saturation = {});

struct SweepPoint {
  std::string label;
  double chi = 0.0;
};

struct SweepEntry {
  std::string label;
  double chi = 0.0;
  cv::CovarianceMatrix v_out_true = cv::CovarianceMatrix::vacuum(2);
  ChainScenario scenario;
  std::optional<RecordPair> records;
};

// One scenario per point: the line output from the closed-form distributed
// model at that chi (plus saturation excess), the base scenario's chain and
// sample count, and a seed derived from the base seed and the point index.
// Throws InvalidArgument on duplicate labels.
std::vector<SweepEntry> pump_power_sweep(const std::vector<SweepPoint>& points,
                                         const propagation::PropagationParams& line,
                                         const propagation::NoiseOccupations& line_noise,
                                         const ChainScenario& base,
                                         const std::optional<SaturationHook>& saturation = {},
                                         bool with_records = false);

// Seed of sweep point `index` derived from a base seed.
std::uint64_t point_seed(std::uint64_t base_seed, std::size_t index);

}  // namespace twpa::synth
