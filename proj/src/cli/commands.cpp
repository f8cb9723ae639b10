#include "commands.hpp"

#include "table.hpp"

#include "twpa/calibration.hpp"
#include "twpa/covariance_io.hpp"
#include "twpa/errors.hpp"
#include "twpa/propagation.hpp"
#include "twpa/records.hpp"
#include "twpa/snail.hpp"
#include "twpa/synth.hpp"
#include "twpa/units.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace twpa::cli {

namespace {

const std::vector<std::size_t> kIdlerPartition = {1};

cv::QuadratureSelector two_mode_selector() { return cv::QuadratureSelector::principal({0, 1}); }

json report_to_json(const cv::EntanglementReport& r) {
  return json{{"E", r.log_negativity},
              {"nu_min", r.nu_min},
              {"purity", r.purity},
              {"E_F", r.entropy_of_formation},
              {"S_plus_db", r.squeeze_plus_db},
              {"S_minus_db", r.squeeze_minus_db},
              {"physical", r.physical}};
}

json range_to_json(const calibration::MetricRange& r) {
  return json{{"value", r.value}, {"lower", r.lower}, {"upper", r.upper}, {"err", r.err()}};
}

void require_two_modes(const cv::CovarianceMatrix& v, const std::string& label) {
  if (v.n_modes() != 2) {
    throw InvalidArgument("point '" + label + "': signal/idler analysis needs exactly two modes");
  }
}

std::string record_extension(records::RecordFormat f) {
  return f == records::RecordFormat::Binary ? ".twpa" : ".csv";
}

std::vector<double> linear_grid(double lo, double hi, long long n) {
  std::vector<double> g;
  for (long long i = 0; i < n; ++i) {
    if (n > 1 && i == n - 1) {
      g.push_back(hi);
    } else {
      g.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
  }
  return g;
}

std::vector<Cell> snail_row(double alpha, double flux, const snail::CoefficientSet& single,
                            const snail::ArrayCoefficientSet& array) {
  return {alpha,
          flux,
          single.phi_min,
          single.coefficient(2),
          single.coefficient(3),
          single.coefficient(4),
          array.c2,
          array.c3,
          array.c4,
          array.p};
}

std::optional<synth::SaturationHook> saturation_from_config(const json& sec, const std::string& w) {
  if (!sec.contains("saturation")) {
    return std::nullopt;
  }
  const json& s = sec.at("saturation");
  const std::string where = w + ".saturation";
  synth::SaturationHook h;
  h.coefficient = get_double(s, where, "coefficient", 0.0);
  h.chi_ref = get_double(s, where, "chi_ref", 1.0);
  h.exponent = get_double(s, where, "exponent", 4.0);
  h.excess(0.0);  // validates
  return h;
}

}  // namespace

void Context::info(const std::string& line) const {
  if (log != nullptr) {
    *log << line << "\n";
  }
}

// ---------------------------------------------------------------------------

void cmd_snail_sweep(const Context& ctx, const SnailSweepFlags& flags) {
  const std::string w = "snail_sweep";
  const json& sec = ctx.config.section(w);
  std::vector<double> alphas = get_doubles(sec, w, "alphas", {0.29});
  if (!flags.alphas.empty()) {
    alphas = flags.alphas;
  }
  const double flux_min = flags.flux_min.value_or(get_double(sec, w, "flux_min", -0.5));
  const double flux_max = flags.flux_max.value_or(get_double(sec, w, "flux_max", 0.5));
  const long long points = flags.points.value_or(get_int(sec, w, "points", 101));
  const int n_large = static_cast<int>(get_int(sec, w, "n_large", 2));
  const double e_j = get_double(sec, w, "e_j", 1.0);
  const int m_snails = static_cast<int>(get_int(sec, w, "m_snails", 1));
  const double ratio =
      get_double(sec, w, "inductance_ratio", std::numeric_limits<double>::infinity());
  const bool kerr_free = get_bool(sec, w, "kerr_free", true);
  const long long kerr_grid = get_int(sec, w, "kerr_free_grid", 2001);

  if (!(flux_min < flux_max)) {
    throw InvalidArgument("snail-sweep: empty flux range [" + format_double(flux_min) + ", " +
                          format_double(flux_max) + "]");
  }
  if (flux_min < -0.5 || flux_max > 0.5) {
    throw InvalidArgument("snail-sweep: flux range must lie inside [-0.5, 0.5]");
  }
  if (points < 2) {
    throw InvalidArgument("snail-sweep: points must be >= 2");
  }
  if (alphas.empty()) {
    throw InvalidArgument("snail-sweep: no alpha values");
  }

  const std::vector<std::string> columns = {"alpha", "flux_over_phi0", "phi_min", "c2", "c3",
                                            "c4",    "c2t",            "c3t",     "c4t", "p"};
  Table sweep(columns);
  Table roots(columns);
  const auto grid = linear_grid(flux_min, flux_max, points);
  for (double alpha : alphas) {
    for (double flux : grid) {
      const snail::SnailParams p{alpha, units::reduced_flux(flux), n_large, e_j};
      const auto single = snail::taylor_coefficients(p, 4);
      const auto array = snail::array_coefficients(single, m_snails, ratio);
      sweep.add_row(snail_row(alpha, flux, single, array));
    }
    if (kerr_free) {
      snail::KerrFreeQuery q;
      q.alpha = alpha;
      q.n_large = n_large;
      q.e_j = e_j;
      q.m_snails = m_snails;
      q.inductance_ratio = ratio;
      // The search needs an open interval.
      q.flux_min = std::max(flux_min, -0.5 + 1e-6);
      q.flux_max = std::min(flux_max, 0.5 - 1e-6);
      q.grid_points = static_cast<int>(kerr_grid);
      for (const auto& r : snail::kerr_free_search(q)) {
        roots.add_row(snail_row(alpha, r.flux_over_phi0, r.single, r.array));
      }
    }
  }
  const auto path = sweep.write(ctx.global.out_dir, "snail_sweep", ctx.global.format);
  ctx.info("snail-sweep: " + std::to_string(sweep.rows().size()) + " rows -> " + path.string());
  if (kerr_free) {
    const auto rp = roots.write(ctx.global.out_dir, "kerr_free", ctx.global.format);
    ctx.info("snail-sweep: " + std::to_string(roots.rows().size()) + " Kerr-free points -> " +
             rp.string());
  }
}

// ---------------------------------------------------------------------------

namespace {

struct SimPoint {
  std::string label;
  std::string kind;
  std::optional<double> chi;
  cv::CovarianceMatrix v = cv::CovarianceMatrix::vacuum(2);
};

}  // namespace

void cmd_simulate(const Context& ctx) {
  const std::string w = "simulate";
  const json& sec = ctx.config.section(w);
  const auto cal = calibration_from_config(ctx.config.section("calibration"));

  const std::string fmt_name = get_string(sec, w, "record_format", "binary");
  if (fmt_name != "binary" && fmt_name != "csv") {
    throw InvalidArgument("config: simulate.record_format must be binary or csv");
  }
  const auto rec_format =
      fmt_name == "binary" ? records::RecordFormat::Binary : records::RecordFormat::Csv;

  synth::ChainScenario base;
  base.chain = cal.chain;
  base.n_samples = get_u64(sec, w, "n_samples", 1000000);
  base.sample_rate = get_double(sec, w, "sample_rate_hz", cal.chain.bw_hz);
  base.rng_seed = ctx.global.seed.value_or(
      get_u64(sec, w, "seed", get_u64(ctx.config.root(), "<root>", "seed", 1)));
  if (sec.contains("amplifier_occupation")) {
    base.amplifier_occupation = get_double(sec, w, "amplifier_occupation", 0.0);
  }
  if (sec.contains("quantizer")) {
    const json& q = sec.at("quantizer");
    synth::Quantizer quant;
    quant.bits = static_cast<int>(get_int(q, w + ".quantizer", "bits", 14));
    quant.full_scale_v = require_double(q, w + ".quantizer", "full_scale_v");
    base.quantizer = quant;
  }

  const auto line = line_from_config(sec.contains("line") ? sec.at("line") : json::object(),
                                     w + ".line");
  const auto saturation = saturation_from_config(sec, w);

  std::vector<SimPoint> points;
  if (sec.contains("points")) {
    if (!sec.at("points").is_array()) {
      throw InvalidArgument("config: simulate.points must be an array");
    }
    for (const auto& p : sec.at("points")) {
      const std::string where = w + ".points[]";
      SimPoint sp;
      sp.label = get_string(p, where, "label", "");
      sp.kind = get_string(p, where, "kind", "");
      if (sp.label.empty()) {
        throw InvalidArgument("config: every simulate point needs a label");
      }
      if (sp.kind == "vacuum") {
        sp.v = cv::CovarianceMatrix::vacuum(2);
      } else if (sp.kind == "tmsv") {
        sp.v = cv::two_mode_squeezed_vacuum(require_double(p, where, "r"),
                                            get_double(p, where, "phase", 0.0));
      } else if (sp.kind == "line") {
        sp.chi = require_double(p, where, "chi");
        sp.v = synth::line_output(line.params, line.noise, *sp.chi, saturation);
      } else if (sp.kind == "line_nu_min") {
        sp.chi = propagation::chi_for_target_nu_min(line.params, require_double(p, where, "nu_min"),
                                                    line.noise);
        sp.v = synth::line_output(line.params, line.noise, *sp.chi, saturation);
      } else if (sp.kind == "covariance") {
        if (!p.contains("covariance")) {
          throw InvalidArgument("config: covariance point '" + sp.label + "' lacks 'covariance'");
        }
        sp.v = cv::covariance_from_json(p.at("covariance"));
      } else {
        throw InvalidArgument("config: unknown simulate point kind '" + sp.kind +
                              "' (vacuum, tmsv, line, line_nu_min, covariance)");
      }
      points.push_back(std::move(sp));
    }
  }
  if (sec.contains("sweep")) {
    const json& s = sec.at("sweep");
    const auto chis = get_doubles(s, w + ".sweep", "chi", {});
    std::vector<std::string> labels;
    if (s.contains("labels")) {
      labels = s.at("labels").get<std::vector<std::string>>();
      if (labels.size() != chis.size()) {
        throw InvalidArgument("config: simulate.sweep.labels must match simulate.sweep.chi");
      }
    }
    for (std::size_t k = 0; k < chis.size(); ++k) {
      SimPoint sp;
      sp.label = labels.empty() ? "chi_" + std::to_string(k) : labels[k];
      sp.kind = "line";
      sp.chi = chis[k];
      sp.v = synth::line_output(line.params, line.noise, chis[k], saturation);
      points.push_back(std::move(sp));
    }
  }
  if (points.empty()) {
    throw InvalidArgument("config: simulate needs 'points' or 'sweep'");
  }
  std::set<std::string> seen;
  for (const auto& p : points) {
    if (!seen.insert(p.label).second) {
      throw InvalidArgument("config: duplicate simulate label '" + p.label + "'");
    }
    require_two_modes(p.v, p.label);
  }

  json manifest;
  manifest["version"] = 1;
  manifest["calibration"] = calibration_to_json(cal);
  manifest["n_samples"] = base.n_samples;
  manifest["base_seed"] = base.rng_seed;
  manifest["record_format"] = fmt_name;
  manifest["amplifier_occupation"] =
      base.amplifier_occupation ? *base.amplifier_occupation : synth::amplifier_occupation(base.chain);
  manifest["normalization_v2"] = calibration::normalization_coefficient(base.chain);
  if (base.quantizer) {
    manifest["quantizer"] = {{"bits", base.quantizer->bits},
                             {"full_scale_v", base.quantizer->full_scale_v}};
  }
  manifest["points"] = json::array();

  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& p = points[k];
    synth::ChainScenario s = base;
    s.target_state = p.v;
    s.rng_seed = synth::point_seed(base.rng_seed, k);
    s.validate();

    json files;
    for (auto state : {records::PumpState::On, records::PumpState::Off}) {
      const std::string name =
          p.label + (state == records::PumpState::On ? "_on" : "_off") + record_extension(rec_format);
      records::RecordHeader h;
      h.channel_count = static_cast<std::uint32_t>(p.v.n_modes());
      h.sample_rate = s.sample_rate;
      h.pump_state = state;
      records::RecordWriter writer(ctx.global.out_dir / name, rec_format, h);
      synth::generate_rows(s, state, [&](const Eigen::Ref<const stats::RowMatrix>& rows) {
        writer.write_rows(rows);
      });
      writer.close();
      files[state == records::PumpState::On ? "on" : "off"] = name;
    }

    json entry;
    entry["label"] = p.label;
    entry["kind"] = p.kind;
    entry["chi"] = p.chi ? json(*p.chi) : json(nullptr);
    entry["seed"] = s.rng_seed;
    entry["on"] = files["on"];
    entry["off"] = files["off"];
    entry["v_out_true"] = cv::covariance_to_json(p.v);
    entry["truth"] = report_to_json(cv::analyze_state(p.v, kIdlerPartition, two_mode_selector()));
    manifest["points"].push_back(std::move(entry));
    ctx.info("simulate: " + p.label + " (" + std::to_string(s.n_samples) + " samples)");
  }
  const auto path = ctx.global.out_dir / "manifest.json";
  write_json_file(path, manifest);
  ctx.info("simulate: manifest -> " + path.string());
}

// ---------------------------------------------------------------------------

namespace {

struct AnalyzeInput {
  std::string label;
  std::filesystem::path on;
  std::filesystem::path off;
  std::optional<cv::CovarianceMatrix> truth;
};

json gaussianity_to_json(const std::vector<calibration::GaussianityResult>& results,
                         const std::vector<std::string>& channels) {
  json arr = json::array();
  for (std::size_t c = 0; c < results.size(); ++c) {
    const auto& g = results[c];
    arr.push_back({{"channel", channels[c]},
                   {"skewness_i", g.i.skewness},
                   {"kurtosis_i", g.i.kurtosis},
                   {"skewness_q", g.q.skewness},
                   {"kurtosis_q", g.q.kurtosis},
                   {"pass", g.pass}});
  }
  return arr;
}

}  // namespace

void cmd_analyze(const Context& ctx, const AnalyzeFlags& flags) {
  const std::string w = "analyze";
  const json& sec = ctx.config.section(w);
  if (!ctx.config.root().contains("calibration")) {
    throw UsageError("analyze needs a 'calibration' section in the config");
  }
  const auto cal = calibration_from_config(ctx.config.section("calibration"));
  const double rate_delta = get_double(sec, w, "rate_delta_hz", 0.0);
  const double rate_bw = get_double(sec, w, "rate_bandwidth_hz", cal.chain.bw_hz);

  std::vector<AnalyzeInput> inputs;
  std::optional<std::filesystem::path> manifest_path;
  if (flags.manifest) {
    manifest_path = *flags.manifest;
  } else if (sec.contains("manifest")) {
    manifest_path = ctx.config.resolve(get_string(sec, w, "manifest", ""));
  } else if (!sec.contains("points")) {
    manifest_path = ctx.global.out_dir / "manifest.json";
  }
  if (manifest_path) {
    std::ifstream in(*manifest_path);
    if (!in) {
      throw IoError("cannot open manifest '" + manifest_path->string() + "'");
    }
    json m;
    try {
      m = json::parse(in);
    } catch (const json::parse_error& e) {
      throw IoError("manifest '" + manifest_path->string() + "': " + e.what());
    }
    const auto dir = manifest_path->parent_path();
    if (!m.contains("points") || !m.at("points").is_array()) {
      throw InvalidArgument("manifest '" + manifest_path->string() + "' has no points array");
    }
    for (const auto& p : m.at("points")) {
      AnalyzeInput a;
      a.label = get_string(p, "manifest.points[]", "label", "");
      a.on = dir / get_string(p, "manifest.points[]", "on", "");
      a.off = dir / get_string(p, "manifest.points[]", "off", "");
      if (p.contains("v_out_true")) {
        a.truth = cv::covariance_from_json(p.at("v_out_true"));
      }
      inputs.push_back(std::move(a));
    }
  } else {
    for (const auto& p : sec.at("points")) {
      AnalyzeInput a;
      a.label = get_string(p, w + ".points[]", "label", "");
      a.on = ctx.config.resolve(get_string(p, w + ".points[]", "on", ""));
      a.off = ctx.config.resolve(get_string(p, w + ".points[]", "off", ""));
      inputs.push_back(std::move(a));
    }
  }
  if (inputs.empty()) {
    throw InvalidArgument("analyze: no points to analyze");
  }

  const double n_coeff = calibration::normalization_coefficient(cal.chain);
  Table table({"label", "E", "E_err", "purity", "S_plus_db", "S_minus_db", "nu_min", "E_F", "R_E",
               "E_lower", "E_upper", "nu_err", "physical", "gaussian", "E_true", "E_abs_error"});
  json report;
  report["calibration"] = calibration_to_json(cal);
  report["normalization_v2"] = n_coeff;
  report["points"] = json::array();
  double max_abs_error = 0.0;
  bool any_truth = false;

  for (const auto& in : inputs) {
    const auto on = records::file_statistics(in.on);
    const auto off = records::file_statistics(in.off);

    // Second pass over the ON record for the shape moments.
    std::vector<calibration::GaussianityResult> gauss;
    std::vector<std::string> warnings;
    bool gaussian = true;
    if (on.count() >= calibration::kMinGaussianitySamples) {
      stats::CentralMomentAccumulator shape(on.mean());
      records::RecordReader reader(in.on);
      stats::RowMatrix block;
      while (reader.read_rows(block, 1 << 16) > 0) {
        shape.add_rows(block);
      }
      for (Eigen::Index c = 0; c < on.dimension() / 2; ++c) {
        gauss.push_back(calibration::gaussianity_from_moments(shape.moments(2 * c),
                                                              shape.moments(2 * c + 1),
                                                              shape.count()));
        if (!gauss.back().pass) {
          gaussian = false;
          warnings.push_back("gaussianity test failed on " + on.channels()[static_cast<std::size_t>(c)]);
        }
      }
    } else {
      gaussian = false;
      warnings.push_back("too few samples for the gaussianity test");
    }

    const auto v = calibration::scaled_covariance(on, off, n_coeff);
    require_two_modes(v, in.label);
    const auto unc = calibration::propagate_uncertainty(cal.chain, cal.factors, v, kIdlerPartition,
                                                        two_mode_selector(), cal.e0_baseline);
    const auto& nom = unc.nominal;
    if (!nom.physical) {
      warnings.push_back("reconstructed covariance violates V + i Omega >= 0");
    }
    const double rate = cv::entanglement_rate(v(0, 0), nom.entropy_of_formation, rate_delta,
                                              rate_bw, cv::FrequencyUnit::Hertz);

    double e_true = std::numeric_limits<double>::quiet_NaN();
    double abs_err = std::numeric_limits<double>::quiet_NaN();
    json entry;
    entry["label"] = in.label;
    entry["metrics"] = report_to_json(nom);
    entry["R_E"] = rate;
    entry["ranges"] = {{"E", range_to_json(unc.log_negativity)},
                       {"nu_min", range_to_json(unc.nu_min)},
                       {"purity", range_to_json(unc.purity)},
                       {"E_F", range_to_json(unc.entropy_of_formation)},
                       {"S_plus_db", range_to_json(unc.squeeze_plus_db)},
                       {"S_minus_db", range_to_json(unc.squeeze_minus_db)},
                       {"normalization_v2", range_to_json(unc.normalization)}};
    entry["covariance"] = cv::covariance_to_json(v);
    entry["samples"] = {{"on", on.count()}, {"off", off.count()}};
    entry["gaussianity"] = gaussianity_to_json(gauss, on.channels());
    if (in.truth) {
      const auto t = cv::analyze_state(*in.truth, kIdlerPartition, two_mode_selector());
      e_true = std::max(t.log_negativity - cal.e0_baseline, 0.0);
      abs_err = std::abs(nom.log_negativity - e_true);
      max_abs_error = std::max(max_abs_error, abs_err);
      any_truth = true;
      entry["truth"] = report_to_json(t);
      entry["E_abs_error"] = abs_err;
    }
    entry["status"] = warnings.empty() ? "ok" : "warning";
    entry["warnings"] = warnings;
    report["points"].push_back(std::move(entry));

    table.add_row({in.label, nom.log_negativity, unc.log_negativity.err(), nom.purity,
                   nom.squeeze_plus_db, nom.squeeze_minus_db, nom.nu_min, nom.entropy_of_formation,
                   rate, unc.log_negativity.lower, unc.log_negativity.upper, unc.nu_min.err(),
                   static_cast<long long>(nom.physical), static_cast<long long>(gaussian), e_true,
                   abs_err});
    std::ostringstream line;
    line << "analyze: " << in.label << " E=" << format_double(nom.log_negativity)
         << (warnings.empty() ? "" : " [warning]");
    ctx.info(line.str());
    for (const auto& msg : warnings) {
      ctx.info("  warning: " + msg);
    }
  }
  if (any_truth) {
    report["max_E_abs_error"] = max_abs_error;
  }
  table.write(ctx.global.out_dir, "analysis", ctx.global.format);
  write_json_file(ctx.global.out_dir / "report.json", report);
}

// ---------------------------------------------------------------------------

void cmd_propagation_profile(const Context& ctx) {
  const std::string w = "propagation_profile";
  const json& sec = ctx.config.section(w);
  const auto line = line_from_config(sec, w);
  const std::string grid = get_string(sec, w, "grid", "chi");
  const long long n = get_int(sec, w, "points", 21);
  const auto segments = get_doubles(sec, w, "segments", {1000.0, 2000.0});
  if (n < 1) {
    throw InvalidArgument("propagation-profile: points must be >= 1");
  }
  if (segments.size() != 2 || segments[0] < 1 || segments[1] < 1) {
    throw InvalidArgument("propagation-profile: segments must be two counts >= 1");
  }

  std::vector<double> chis;
  std::vector<double> freqs;
  const double f_center = get_double(sec, w, "f_center_hz", 0.0);
  if (grid == "chi") {
    const double lo = get_double(sec, w, "chi_min", 0.0);
    const double hi = get_double(sec, w, "chi_max", line.params.chi);
    if (lo > hi || lo < 0.0) {
      throw InvalidArgument("propagation-profile: need 0 <= chi_min <= chi_max");
    }
    chis = linear_grid(lo, hi, n);
    freqs.assign(chis.size(), f_center);
  } else if (grid == "frequency") {
    const double lo = require_double(sec, w, "f_min_hz");
    const double hi = require_double(sec, w, "f_max_hz");
    if (!(lo <= hi)) {
      throw InvalidArgument("propagation-profile: need f_min_hz <= f_max_hz");
    }
    freqs = linear_grid(lo, hi, n);
    chis.assign(freqs.size(), line.params.chi);
  } else {
    throw InvalidArgument("propagation-profile: grid must be chi or frequency");
  }

  const int n1 = static_cast<int>(segments[0]);
  const int n2 = static_cast<int>(segments[1]);
  Table table({"frequency_hz", "chi", "gain_db", "net_gain_db", "eta_db", "cosh2_db", "nu_min", "E",
               "nu_min_n1", "nu_min_n2", "segment_diff"});
  auto nu_of = [](const cv::CovarianceMatrix& v) {
    return cv::symplectic_eigenvalues(cv::partial_transpose(v, kIdlerPartition)).min();
  };
  for (std::size_t k = 0; k < chis.size(); ++k) {
    propagation::PropagationParams p = line.params;
    p.chi = chis[k];
    p.omega = units::kTwoPi * (freqs[k] - f_center);
    const auto exact = propagation::distributed_channel_exact(p, line.noise);
    const auto seg1 = propagation::distributed_output(p, n1, line.noise);
    const auto seg2 = propagation::distributed_output(p, n2, line.noise);
    const double eta = std::exp(-p.loss_exponent());
    const double g_s = exact.signal_gain() / eta;
    const double nu = nu_of(exact.output());
    const double nu1 = nu_of(seg1.line.output());
    const double nu2 = nu_of(seg2.line.output());
    const double r = p.squeeze_parameter();
    table.add_row({freqs[k], chis[k], units::linear_to_db(g_s),
                   units::linear_to_db(exact.signal_gain()), units::linear_to_db(eta),
                   units::linear_to_db(std::cosh(r) * std::cosh(r)), nu,
                   cv::log_negativity_from_nu(nu), nu1, nu2, std::abs(nu1 - nu2)});
  }
  const auto path = table.write(ctx.global.out_dir, "propagation_profile", ctx.global.format);
  ctx.info("propagation-profile: " + std::to_string(table.rows().size()) + " rows -> " +
           path.string());
}

// ---------------------------------------------------------------------------

void cmd_johnson_fit(const Context& ctx) {
  const std::string w = "johnson_fit";
  const json& sec = ctx.config.section(w);
  const double bw = get_double(sec, w, "bw_hz",
                               get_double(ctx.config.section("calibration"), "calibration", "bw_hz", 1e6));
  std::vector<calibration::TemperaturePower> points;
  if (sec.contains("input")) {
    const auto path = ctx.config.resolve(get_string(sec, w, "input", ""));
    std::ifstream in(path);
    if (!in) {
      throw IoError("cannot open '" + path.string() + "'");
    }
    std::string line;
    std::getline(in, line);  // header: kelvin,watts
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty() || line[0] == '#') {
        continue;
      }
      std::istringstream fields(line);
      std::string t;
      std::string pw;
      if (!std::getline(fields, t, ',') || !std::getline(fields, pw)) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected kelvin,watts");
      }
      try {
        points.push_back({std::stod(t), std::stod(pw)});
      } catch (const std::exception&) {
        throw IoError(path.string() + ":" + std::to_string(lineno) + ": cannot parse numbers");
      }
    }
  } else if (sec.contains("points") && sec.at("points").is_array()) {
    for (const auto& p : sec.at("points")) {
      if (p.is_array() && p.size() == 2 && p[0].is_number() && p[1].is_number()) {
        points.push_back({p[0].get<double>(), p[1].get<double>()});
      } else {
        points.push_back({require_double(p, w + ".points[]", "kelvin"),
                          require_double(p, w + ".points[]", "watts")});
      }
    }
  } else {
    throw InvalidArgument("config: johnson_fit needs 'points' or 'input'");
  }

  const auto fit = calibration::johnson_nyquist_fit(points, bw);
  const std::string formatted = calibration::format_db_with_error(fit.gain_db(), fit.gain_db_err());
  if (ctx.global.format == "json") {
    json j = {{"gain", fit.gain},         {"gain_err", fit.gain_err},
              {"gain_db", fit.gain_db()}, {"gain_db_err", fit.gain_db_err()},
              {"t_n_k", fit.t_n_k},       {"t_n_err", fit.t_n_err},
              {"slope", fit.slope},       {"intercept", fit.intercept},
              {"dof", fit.dof},           {"residuals", fit.residuals},
              {"gain_text", formatted}};
    write_json_file(ctx.global.out_dir / "johnson_fit.json", j);
  } else {
    Table t({"gain", "gain_err", "gain_db", "gain_db_err", "t_n_k", "t_n_err", "slope", "intercept",
             "dof", "gain_text"});
    t.add_row({fit.gain, fit.gain_err, fit.gain_db(), fit.gain_db_err(), fit.t_n_k, fit.t_n_err,
               fit.slope, fit.intercept, static_cast<long long>(fit.dof), "\"" + formatted + "\""});
    t.write(ctx.global.out_dir, "johnson_fit", "csv");
  }
  if (ctx.out != nullptr && ctx.log != nullptr) {
    *ctx.out << "G_sys = " << formatted << ", T_N = " << format_double(fit.t_n_k) << " K\n";
  }
}

}  // namespace twpa::cli
