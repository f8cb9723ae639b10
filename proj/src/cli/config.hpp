#pragma once

#include "twpa/calibration.hpp"
#include "twpa/propagation.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace twpa::cli {

using nlohmann::json;

// Usage problems (bad flags, missing sections) map to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

// Parsed config file. Missing file -> UsageError, malformed JSON -> IoError.
class Config {
 public:
  Config() = default;
  static Config load(const std::filesystem::path& path);
  static Config from_json(json root, std::filesystem::path base_dir = ".");

  // Object stored under `name`, or an empty object.
  const json& section(const std::string& name) const;
  const json& root() const { return root_; }
  // Relative paths in the config are resolved against the config's folder.
  std::filesystem::path resolve(const std::filesystem::path& p) const;

 private:
  json root_ = json::object();
  std::filesystem::path base_dir_ = ".";
};

// Typed lookups; a present value of the wrong type raises InvalidArgument
// naming `where.key`.
double get_double(const json& sec, const std::string& where, const std::string& key, double fallback);
double require_double(const json& sec, const std::string& where, const std::string& key);
std::int64_t get_int(const json& sec, const std::string& where, const std::string& key,
                     std::int64_t fallback);
std::uint64_t get_u64(const json& sec, const std::string& where, const std::string& key,
                      std::uint64_t fallback);
std::string get_string(const json& sec, const std::string& where, const std::string& key,
                       const std::string& fallback);
bool get_bool(const json& sec, const std::string& where, const std::string& key, bool fallback);
std::vector<double> get_doubles(const json& sec, const std::string& where, const std::string& key,
                                const std::vector<double>& fallback);

// "calibration" section: g_off_db, g_off_db_err, eta_db, eta_db_err,
// z0_ohm, f_hz, bw_hz, t_sys_k, e0_baseline.
struct CalibrationConfig {
  calibration::MeasurementChain chain;
  calibration::UncertaintyFactors factors;
  double g_off_db = 0.0;
  double g_off_db_err = 0.0;
  double eta_db = 0.0;
  double eta_db_err = 0.0;
  double e0_baseline = 0.0;
};

CalibrationConfig calibration_from_config(const json& sec);
json calibration_to_json(const CalibrationConfig& cal);

// Line description shared by simulate and propagation-profile: kappa, chi,
// v, length, omega, pump_phase, noise_signal, noise_idler, and optionally
// tan_delta + electrical_length which fix kappa L / v.
struct LineConfig {
  propagation::PropagationParams params;
  propagation::NoiseOccupations noise;
};

LineConfig line_from_config(const json& sec, const std::string& where);

}  // namespace twpa::cli
