#pragma once

#include "config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace twpa::cli {

struct Context {
  GlobalOptions global;
  Config config;
  std::ostream* out = nullptr;
  std::ostream* log = nullptr;  // null when --quiet

  void info(const std::string& line) const;
};

struct SnailSweepFlags {
  std::vector<double> alphas;
  std::optional<double> flux_min;
  std::optional<double> flux_max;
  std::optional<long long> points;
};

struct AnalyzeFlags {
  std::optional<std::string> manifest;
};

void cmd_snail_sweep(const Context& ctx, const SnailSweepFlags& flags);
void cmd_simulate(const Context& ctx);
void cmd_analyze(const Context& ctx, const AnalyzeFlags& flags);
void cmd_propagation_profile(const Context& ctx);
void cmd_johnson_fit(const Context& ctx);

}  // namespace twpa::cli
