#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "run_config.hpp"
#include "sqsd/error.hpp"

using namespace sqsd::cli;

namespace {

const std::map<std::string, std::string> kHelp{
    {"scenario", "binary | trine | ensemble"},
    {"theta", "binary state overlap angle in (0, pi/2)"},
    {"prior", "binary prior probability of the first hypothesis"},
    {"insert-optimal", "binary: add the angle theta/2 + pi/4 to the library (true|false)"},
    {"grid", "belief-grid resolution N"},
    {"library", "number of library measurements (angles)"},
    {"cost", "per-measurement cost"},
    {"horizon", "planning horizon H"},
    {"mode", "projection mode: memoized | raw"},
    {"threads", "worker threads"},
    {"seed", "seed for Monte Carlo and sampled constants"},
    {"ensemble", "ensemble definition file (JSON) for scenario 'ensemble'"},
    {"samples", "samples for sampled constants (delta_B, posterior Lipschitz)"},
    {"out", "output directory (relative paths resolve under SQSD_OUTPUT_ROOT)"},
    {"episodes", "Monte Carlo episodes"},
    {"traces", "number of episode traces to write"},
    {"tables", "directory written by 'plan' to reuse instead of planning"},
    {"case", "routing case A..E or all"},
    {"oracle-grid", "resolution of the exact 1-D reference (multiple of --grid)"},
    {"grids", "comma-separated resolutions"},
};

const std::map<std::string, std::string> kCommands{
    {"plan", "plan value and policy tables"},
    {"simulate", "Monte Carlo execution of a planned policy"},
    {"maps", "one-step and finite-horizon maps for the case studies"},
    {"routing", "trine routing reports for the representative beliefs"},
    {"bounds", "error budget and comparison with an exact reference"},
    {"scaling", "projection-count scaling over several grid resolutions"},
};

// Horizons that commands fall back to when none is given; plan, simulate and
// bounds have none and require the flag.
const std::map<std::string, std::size_t> kDefaultHorizon{{"maps", 2}, {"routing", 1}, {"scaling", 1}};

int run_command(const RunConfig& cfg) {
  if (cfg.command == "plan") return cmd_plan(cfg);
  if (cfg.command == "simulate") return cmd_simulate(cfg);
  if (cfg.command == "maps") return cmd_maps(cfg);
  if (cfg.command == "routing") return cmd_routing(cfg);
  if (cfg.command == "bounds") return cmd_bounds(cfg);
  return cmd_scaling(cfg);
}

int exit_code_for(sqsd::ErrorCode code) {
  using sqsd::ErrorCode;
  switch (code) {
    case ErrorCode::SizeOverflow: return kExitSizeOverflow;
    case ErrorCode::ZeroProbabilityOutcome:
    case ErrorCode::AllDegenerate:
    case ErrorCode::EtaNonPositive:
    case ErrorCode::CountersEmpty: return kExitFailure;
    default: return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential quantum state discrimination: planning, simulation and bounds"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app;
    std::map<std::string, std::string> raw;
    std::string config;
  };
  std::map<std::string, Sub> subs;
  for (const auto& [name, help] : kCommands) {
    auto& s = subs[name];
    s.app = app.add_subcommand(name, help);
    for (const auto& key : command_keys(name)) s.app->add_option("--" + key, s.raw[key], kHelp.at(key));
    s.app->add_option("--config", s.config, "key = value file; its entries override flags");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig cfg;
    for (auto& [name, s] : subs) {
      if (!s.app->parsed()) continue;
      cfg.command = name;
      for (const auto& key : command_keys(name)) {
        if (s.app->count("--" + key) == 0) continue;
        try {
          apply_setting(cfg, key, s.raw[key]);
        } catch (const std::invalid_argument& e) {
          throw CliError(kExitConfig, fmt::format("--{}: {}", key, e.what()));
        }
      }
      if (!s.config.empty()) {
        for (const auto& [key, value] : read_config_file(s.config, name)) apply_setting(cfg, key, value);
      }
    }
    if (!cfg.horizon) {
      const auto it = kDefaultHorizon.find(cfg.command);
      if (it == kDefaultHorizon.end()) {
        throw CliError(kExitConfig, fmt::format("--horizon is required for '{}'", cfg.command));
      }
      cfg.horizon = it->second;
    }
    resolve(cfg);
    return run_command(cfg);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code();
  } catch (const sqsd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}
