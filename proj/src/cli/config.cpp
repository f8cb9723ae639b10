#include "config.hpp"

#include "twpa/errors.hpp"
#include "twpa/units.hpp"

#include <cmath>
#include <fstream>

namespace twpa::cli {

namespace {

[[noreturn]] void type_error(const std::string& where, const std::string& key, const char* expected) {
  throw InvalidArgument("config: " + where + "." + key + " must be " + expected);
}

const json* find(const json& sec, const std::string& key) {
  if (!sec.is_object()) {
    return nullptr;
  }
  const auto it = sec.find(key);
  return it == sec.end() || it->is_null() ? nullptr : &*it;
}

}  // namespace

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("cannot open config file '" + path.string() + "'");
  }
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("config file '" + path.string() + "': " + e.what());
  }
  return from_json(std::move(root), path.parent_path().empty() ? "." : path.parent_path());
}

Config Config::from_json(json root, std::filesystem::path base_dir) {
  if (!root.is_object()) {
    throw InvalidArgument("config: top level must be an object");
  }
  Config c;
  c.root_ = std::move(root);
  c.base_dir_ = std::move(base_dir);
  return c;
}

const json& Config::section(const std::string& name) const {
  static const json empty = json::object();
  const json* s = find(root_, name);
  if (s == nullptr) {
    return empty;
  }
  if (!s->is_object()) {
    type_error("<root>", name, "an object");
  }
  return *s;
}

std::filesystem::path Config::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir_ / p;
}

double get_double(const json& sec, const std::string& where, const std::string& key, double fallback) {
  const json* v = find(sec, key);
  if (v == nullptr) {
    return fallback;
  }
  if (!v->is_number()) {
    type_error(where, key, "a number");
  }
  return v->get<double>();
}

double require_double(const json& sec, const std::string& where, const std::string& key) {
  if (find(sec, key) == nullptr) {
    throw InvalidArgument("config: " + where + "." + key + " is required");
  }
  return get_double(sec, where, key, 0.0);
}

std::int64_t get_int(const json& sec, const std::string& where, const std::string& key,
                     std::int64_t fallback) {
  const json* v = find(sec, key);
  if (v == nullptr) {
    return fallback;
  }
  if (!v->is_number_integer()) {
    type_error(where, key, "an integer");
  }
  return v->get<std::int64_t>();
}

std::uint64_t get_u64(const json& sec, const std::string& where, const std::string& key,
                      std::uint64_t fallback) {
  const json* v = find(sec, key);
  if (v == nullptr) {
    return fallback;
  }
  if (v->is_number_unsigned()) {
    return v->get<std::uint64_t>();
  }
  // Large counts are often written as 1e7.
  if (v->is_number_float() && v->get<double>() >= 0.0 && v->get<double>() < 1.8e19 &&
      v->get<double>() == std::floor(v->get<double>())) {
    return static_cast<std::uint64_t>(v->get<double>());
  }
  type_error(where, key, "a non-negative integer");
}

std::string get_string(const json& sec, const std::string& where, const std::string& key,
                       const std::string& fallback) {
  const json* v = find(sec, key);
  if (v == nullptr) {
    return fallback;
  }
  if (!v->is_string()) {
    type_error(where, key, "a string");
  }
  return v->get<std::string>();
}

bool get_bool(const json& sec, const std::string& where, const std::string& key, bool fallback) {
  const json* v = find(sec, key);
  if (v == nullptr) {
    return fallback;
  }
  if (!v->is_boolean()) {
    type_error(where, key, "true or false");
  }
  return v->get<bool>();
}

std::vector<double> get_doubles(const json& sec, const std::string& where, const std::string& key,
                                const std::vector<double>& fallback) {
  const json* v = find(sec, key);
  if (v == nullptr) {
    return fallback;
  }
  if (v->is_number()) {
    return {v->get<double>()};
  }
  if (!v->is_array()) {
    type_error(where, key, "a number or an array of numbers");
  }
  std::vector<double> out;
  for (const auto& x : *v) {
    if (!x.is_number()) {
      type_error(where, key, "an array of numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

CalibrationConfig calibration_from_config(const json& sec) {
  const std::string w = "calibration";
  CalibrationConfig c;
  c.g_off_db = get_double(sec, w, "g_off_db", 0.0);
  c.g_off_db_err = get_double(sec, w, "g_off_db_err", 0.0);
  c.eta_db = get_double(sec, w, "eta_db", 0.0);
  c.eta_db_err = get_double(sec, w, "eta_db_err", 0.0);
  c.e0_baseline = get_double(sec, w, "e0_baseline", 0.0);
  if (c.eta_db > 0.0) {
    throw InvalidArgument("config: calibration.eta_db must be <= 0");
  }
  if (c.g_off_db_err < 0.0 || c.eta_db_err < 0.0 || c.e0_baseline < 0.0) {
    throw InvalidArgument("config: calibration uncertainties and e0_baseline must be >= 0");
  }
  c.chain.g_off = units::db_to_linear(c.g_off_db);
  c.chain.eta = units::db_to_linear(c.eta_db);
  c.chain.t_sys_k = get_double(sec, w, "t_sys_k", 0.0);
  c.chain.z0_ohm = get_double(sec, w, "z0_ohm", 50.0);
  c.chain.f_hz = get_double(sec, w, "f_hz", 4.8e9);
  c.chain.bw_hz = get_double(sec, w, "bw_hz", 1e6);
  c.chain.validate();
  c.factors.g_off = units::db_to_linear(c.g_off_db_err);
  c.factors.eta = units::db_to_linear(c.eta_db_err);
  return c;
}

json calibration_to_json(const CalibrationConfig& c) {
  return json{{"g_off_db", c.g_off_db},         {"g_off_db_err", c.g_off_db_err},
              {"eta_db", c.eta_db},             {"eta_db_err", c.eta_db_err},
              {"z0_ohm", c.chain.z0_ohm},       {"f_hz", c.chain.f_hz},
              {"bw_hz", c.chain.bw_hz},         {"t_sys_k", c.chain.t_sys_k},
              {"e0_baseline", c.e0_baseline},   {"g_off", c.chain.g_off},
              {"eta", c.chain.eta},             {"system_gain", c.chain.system_gain()}};
}

LineConfig line_from_config(const json& sec, const std::string& w) {
  LineConfig l;
  auto& p = l.params;
  p.v = get_double(sec, w, "v", 1.0);
  p.length = get_double(sec, w, "length", 1.0);
  p.chi = get_double(sec, w, "chi", 0.0);
  p.omega = get_double(sec, w, "omega", 0.0);
  p.pump_phase = get_double(sec, w, "pump_phase", 0.0);
  p.kappa = get_double(sec, w, "kappa", 0.0);
  if (sec.contains("tan_delta") || sec.contains("electrical_length")) {
    const double tan_delta = require_double(sec, w, "tan_delta");
    const double theta = require_double(sec, w, "electrical_length");
    if (!(p.length > 0.0)) {
      throw InvalidArgument("config: " + w + ".length must be > 0 when tan_delta is given");
    }
    // exp(-kappa L / v) = exp(-tan_delta theta)
    p.kappa = tan_delta * theta * p.v / p.length;
  }
  l.noise.signal = get_double(sec, w, "noise_signal", 0.0);
  l.noise.idler = get_double(sec, w, "noise_idler", 0.0);
  p.validate();
  return l;
}

}  // namespace twpa::cli
