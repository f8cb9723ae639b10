#include "twpa/cli.hpp"

#include "commands.hpp"

#include "twpa/errors.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <ostream>
#include <vector>

namespace twpa::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"TWPA entanglement analysis toolkit", "twpa"};
  app.require_subcommand(1);

  GlobalOptions global;
  std::string config_path;
  std::string out_dir;
  std::string format;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "output directory (default: current directory)");
  app.add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "base RNG seed (overrides the config)");
  app.add_flag("--quiet", global.quiet, "suppress progress messages");

  SnailSweepFlags snail_flags;
  double flux_min = 0.0;
  double flux_max = 0.0;
  long long points = 0;
  auto* snail = app.add_subcommand("snail-sweep", "SNAIL and array Taylor coefficients vs. flux");
  snail->add_option("--alpha", snail_flags.alphas, "asymmetry values (repeatable)");
  auto* fmin_opt = snail->add_option("--flux-min", flux_min, "lowest Phi/Phi0");
  auto* fmax_opt = snail->add_option("--flux-max", flux_max, "highest Phi/Phi0");
  auto* points_opt = snail->add_option("--points", points, "flux grid points");

  auto* simulate = app.add_subcommand("simulate", "synthetic ON/OFF records and a truth manifest");

  AnalyzeFlags analyze_flags;
  std::string manifest;
  auto* analyze = app.add_subcommand("analyze", "calibrate records and report entanglement metrics");
  auto* manifest_opt = analyze->add_option("--manifest", manifest, "manifest written by simulate");

  auto* profile = app.add_subcommand("propagation-profile", "gain, loss and nu_min along a grid");
  auto* johnson = app.add_subcommand("johnson-fit", "system gain and noise temperature fit");

  for (auto* sub : {snail, simulate, analyze, profile, johnson}) {
    sub->fallthrough();
  }

  std::vector<std::string> args;
  for (int i = argc - 1; i > 0; --i) {
    args.emplace_back(argv[i]);
  }
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  if (*fmin_opt) snail_flags.flux_min = flux_min;
  if (*fmax_opt) snail_flags.flux_max = flux_max;
  if (*points_opt) snail_flags.points = points;
  if (*manifest_opt) analyze_flags.manifest = manifest;

  try {
    Context ctx;
    ctx.out = &out;
    ctx.log = global.quiet ? nullptr : &err;
    if (!config_path.empty()) {
      ctx.config = Config::load(config_path);
    }
    const auto& root = ctx.config.root();
    global.config_path = config_path;
    global.out_dir = !out_dir.empty() ? out_dir : get_string(root, "<root>", "out", ".");
    global.format = !format.empty() ? format : get_string(root, "<root>", "format", "csv");
    if (global.format != "csv" && global.format != "json") {
      throw InvalidArgument("config: format must be csv or json");
    }
    if (*seed_opt) {
      global.seed = seed;
    }
    std::error_code ec;
    std::filesystem::create_directories(global.out_dir, ec);
    if (ec || !std::filesystem::is_directory(global.out_dir)) {
      throw IoError("cannot create output directory '" + global.out_dir.string() + "'");
    }
    ctx.global = global;

    if (*snail) {
      cmd_snail_sweep(ctx, snail_flags);
    } else if (*simulate) {
      cmd_simulate(ctx);
    } else if (*analyze) {
      cmd_analyze(ctx, analyze_flags);
    } else if (*profile) {
      cmd_propagation_profile(ctx);
    } else if (*johnson) {
      cmd_johnson_fit(ctx);
    }
  } catch (const UsageError& e) {
    err << "twpa: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericFailure& e) {
    err << "twpa: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    err << "twpa: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& e) {
    err << "twpa: invalid data: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace twpa::cli
