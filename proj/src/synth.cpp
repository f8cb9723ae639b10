#include "twpa/synth.hpp"

#include "twpa/errors.hpp"
#include "twpa/units.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace twpa::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 chunk_engine(std::uint64_t seed, records::PumpState state, std::uint64_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(state), static_cast<std::uint32_t>(chunk),
                    static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

stats::QuadratureStatistics make_accumulator(const ChainScenario& s) {
  std::vector<std::string> labels;
  for (std::size_t c = 0; c < s.target_state.n_modes(); ++c) {
    labels.push_back(records::channel_label(c));
  }
  return stats::QuadratureStatistics(labels);
}

}  // namespace

double Quantizer::step() const { return 2.0 * full_scale_v / std::ldexp(1.0, bits); }

double Quantizer::apply(double x) const {
  const double q = step();
  const double top = full_scale_v - q;
  return std::clamp(std::round(x / q) * q, -full_scale_v, top);
}

void ChainScenario::validate() const {
  chain.validate();
  if (n_samples == 0) {
    throw InvalidArgument("scenario needs at least one sample");
  }
  if (!(sample_rate > 0.0)) {
    throw InvalidArgument("scenario sample rate must be positive");
  }
  if (quantizer && (quantizer->bits < 1 || quantizer->bits > 52 || !(quantizer->full_scale_v > 0.0))) {
    throw InvalidArgument("quantizer needs 1..52 bits and a positive full scale");
  }
  if (amplifier_occupation && !(*amplifier_occupation >= 0.0)) {
    throw InvalidArgument("amplifier occupation must be >= 0");
  }
  if (!target_state.is_physical()) {
    throw InvalidState("scenario target state is not physical");
  }
}

double amplifier_occupation(const calibration::MeasurementChain& chain) {
  chain.validate();
  const double g = chain.system_gain();
  if (g <= 1.0) {
    return 0.0;
  }
  const double noise = 2.0 * g * units::kBoltzmann * chain.t_sys_k / (units::kPlanck * chain.f_hz);
  return std::max(0.5 * (noise / (g - 1.0) - 1.0), 0.0);
}

Eigen::MatrixXd measured_covariance(const ChainScenario& s, records::PumpState state) {
  s.validate();
  const double u = calibration::vacuum_unit(s.chain);
  const double g = s.chain.system_gain();
  const double n_h = s.amplifier_occupation ? *s.amplifier_occupation : amplifier_occupation(s.chain);
  const Eigen::Index dim = s.target_state.dimension();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim, dim);
  const Eigen::MatrixXd input = state == records::PumpState::On ? s.target_state.data() : id;
  const double added = std::max(g - 1.0, 0.0) * (2.0 * n_h + 1.0);
  return u * (g * input + added * id);
}

void generate_rows(const ChainScenario& s, records::PumpState state, const RowSink& sink) {
  const Eigen::MatrixXd cov = measured_covariance(s, state);
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidState("measured covariance implied by the scenario is not positive definite");
  }
  const Eigen::MatrixXd lt = llt.matrixL().transpose();
  const Eigen::Index dim = cov.rows();

  stats::RowMatrix z;
  stats::RowMatrix rows;
  const std::uint64_t n_chunks = (s.n_samples + kChunkRows - 1) / kChunkRows;
  for (std::uint64_t k = 0; k < n_chunks; ++k) {
    const std::uint64_t start = k * kChunkRows;
    const auto n = static_cast<Eigen::Index>(std::min<std::uint64_t>(kChunkRows, s.n_samples - start));
    auto engine = chunk_engine(s.rng_seed, state, k);
    std::normal_distribution<double> normal(0.0, 1.0);
    z.resize(n, dim);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        z(r, c) = normal(engine);
      }
    }
    rows.noalias() = z * lt;
    if (s.quantizer) {
      rows = rows.unaryExpr([&](double x) { return s.quantizer->apply(x); });
    }
    sink(rows);
  }
}

RecordPair sample_records(const ChainScenario& s) {
  auto build = [&](records::PumpState state) {
    records::RecordSet set;
    for (std::size_t c = 0; c < s.target_state.n_modes(); ++c) {
      records::QuadratureRecord r;
      r.channel = records::channel_label(c);
      r.sample_rate = s.sample_rate;
      r.pump_state = state;
      r.samples.reserve(s.n_samples);
      set.records.push_back(std::move(r));
    }
    generate_rows(s, state, [&](const Eigen::Ref<const stats::RowMatrix>& rows) {
      for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (std::size_t c = 0; c < set.records.size(); ++c) {
          const auto col = static_cast<Eigen::Index>(2 * c);
          set.records[c].samples.push_back({rows(r, col), rows(r, col + 1)});
        }
      }
    });
    return set;
  };
  return {build(records::PumpState::On), build(records::PumpState::Off)};
}

StatisticsPair sample_statistics(const ChainScenario& s) {
  StatisticsPair out{make_accumulator(s), make_accumulator(s)};
  generate_rows(s, records::PumpState::On,
                [&](const Eigen::Ref<const stats::RowMatrix>& rows) { out.on.add_rows(rows); });
  generate_rows(s, records::PumpState::Off,
                [&](const Eigen::Ref<const stats::RowMatrix>& rows) { out.off.add_rows(rows); });
  return out;
}

double SaturationHook::excess(double chi) const {
  if (!(chi_ref > 0.0) || !(coefficient >= 0.0)) {
    throw InvalidArgument("saturation hook needs chi_ref > 0 and coefficient >= 0");
  }
  return coefficient * std::pow(std::abs(chi) / chi_ref, exponent);
}

cv::CovarianceMatrix line_output(const propagation::PropagationParams& line,
                                 const propagation::NoiseOccupations& line_noise, double chi,
                                 const std::optional<SaturationHook>& saturation) {
  propagation::PropagationParams params = line;
  params.chi = chi;
  Eigen::MatrixXd v = propagation::distributed_channel_exact(params, line_noise).output().data();
  if (saturation) {
    v += saturation->excess(chi) * Eigen::MatrixXd::Identity(v.rows(), v.cols());
  }
  return cv::CovarianceMatrix(v);
}

std::uint64_t point_seed(std::uint64_t base_seed, std::size_t index) {
  return splitmix64(base_seed ^ splitmix64(static_cast<std::uint64_t>(index) + 1));
}

std::vector<SweepEntry> pump_power_sweep(const std::vector<SweepPoint>& points,
                                         const propagation::PropagationParams& line,
                                         const propagation::NoiseOccupations& line_noise,
                                         const ChainScenario& base,
                                         const std::optional<SaturationHook>& saturation,
                                         bool with_records) {
  std::set<std::string> seen;
  for (const auto& p : points) {
    if (!seen.insert(p.label).second) {
      throw InvalidArgument("pump_power_sweep: duplicate label '" + p.label + "'");
    }
  }
  std::vector<SweepEntry> out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    SweepEntry e;
    e.label = points[k].label;
    e.chi = points[k].chi;
    e.v_out_true = line_output(line, line_noise, points[k].chi, saturation);
    e.scenario = base;
    e.scenario.target_state = e.v_out_true;
    e.scenario.rng_seed = point_seed(base.rng_seed, k);
    if (with_records) {
      e.records = sample_records(e.scenario);
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace twpa::synth
