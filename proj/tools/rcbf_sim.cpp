#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rcbf/mesh.hpp"
#include "rcbf/scenario.hpp"
#include "rcbf/sim.hpp"

namespace {

// Exit codes: 0 ok, 1 configuration or usage error, 2 keep-out violation.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSafety = 2;

struct RunOptions {
  std::string scenario_path;
  std::string preset;
  std::optional<uint64_t> seed;
  std::optional<double> duration;
  std::optional<double> dt;
  std::optional<std::string> mode;
  std::optional<std::string> safety;
  std::string outdir;
  bool no_csv = false;
  bool serial = false;
  std::string sweep;  // "A..B" inclusive seed range
};

rcbf::ScenarioConfig load_base(const std::string& scenario_path, const std::string& preset) {
  if (!scenario_path.empty() && !preset.empty())
    throw rcbf::ConfigError("pass either --scenario or --preset, not both");
  if (!scenario_path.empty()) return rcbf::load_scenario(scenario_path);
  if (!preset.empty()) return rcbf::preset_by_name(preset);
  throw rcbf::ConfigError("one of --scenario or --preset is required");
}

std::pair<uint64_t, uint64_t> parse_sweep(const std::string& s) {
  const auto pos = s.find("..");
  if (pos == std::string::npos)
    throw rcbf::ConfigError("--sweep expects A..B, got \"" + s + "\"");
  try {
    const uint64_t a = std::stoull(s.substr(0, pos));
    const uint64_t b = std::stoull(s.substr(pos + 2));
    if (b < a) throw rcbf::ConfigError("--sweep range is empty: " + s);
    return {a, b};
  } catch (const std::invalid_argument&) {
    throw rcbf::ConfigError("--sweep expects integers A..B, got \"" + s + "\"");
  }
}

int do_run(const RunOptions& opt) {
  rcbf::ScenarioConfig cfg = load_base(opt.scenario_path, opt.preset);
  if (opt.duration) cfg.duration = *opt.duration;
  if (opt.dt) cfg.dt = *opt.dt;
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.serial) cfg.parallel_bank = false;
  if (opt.mode) {
    if (*opt.mode == "zero") cfg.disturbance_mode = rcbf::DisturbanceProcess::Mode::Zero;
    else if (*opt.mode == "uniform") cfg.disturbance_mode = rcbf::DisturbanceProcess::Mode::UniformBall;
    else if (*opt.mode == "worst") cfg.disturbance_mode = rcbf::DisturbanceProcess::Mode::WorstCase;
    else if (*opt.mode == "best") cfg.disturbance_mode = rcbf::DisturbanceProcess::Mode::BestCase;
    else throw rcbf::ConfigError("--mode must be zero, uniform, worst or best");
  }
  if (opt.safety) {
    if (*opt.safety == "assert") cfg.safety_mode = rcbf::ScenarioConfig::SafetyMode::Assert;
    else if (*opt.safety == "log") cfg.safety_mode = rcbf::ScenarioConfig::SafetyMode::Log;
    else throw rcbf::ConfigError("--safety must be assert or log");
  }

  std::vector<uint64_t> seeds{cfg.seed};
  if (!opt.sweep.empty()) {
    const auto [a, b] = parse_sweep(opt.sweep);
    seeds.clear();
    for (uint64_t s = a; s <= b; ++s) seeds.push_back(s);
  }

  // Authority resolution does not depend on the seed, so resolve once.
  rcbf::ResolvedScenario base = rcbf::resolve_scenario(cfg);

  int exit_code = kExitOk;
  for (uint64_t seed : seeds) {
    rcbf::ResolvedScenario rs = base;
    rs.config.seed = seed;
    try {
      const rcbf::RunResult result = rcbf::run_simulation(rs);
      const std::string stem =
          opt.outdir + "/" + rs.config.name + "-seed" + std::to_string(seed);
      if (!opt.no_csv) rcbf::write_csv(stem + ".csv", result);
      rcbf::write_summary(stem + ".summary.json", rs, result);
      if (seeds.size() == 1) {
        std::cout << rcbf::summary_json(rs, result);
      } else {
        std::printf("%s seed=%llu min_distance=%.6g max_H=%.6g violations=%llu\n",
                    rs.config.name.c_str(), static_cast<unsigned long long>(seed),
                    result.min_distance, result.max_H,
                    static_cast<unsigned long long>(result.safety_violations));
      }
      if (result.safety_violations > 0) exit_code = kExitSafety;
    } catch (const rcbf::SafetyViolationError& e) {
      std::fprintf(stderr, "%s seed=%llu aborted: %s\n", rs.config.name.c_str(),
                   static_cast<unsigned long long>(seed), e.what());
      exit_code = kExitSafety;
    }
  }
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keep-out safety filter simulator"};
  app.require_subcommand(1);

  RunOptions opt;
  const char* env_outdir = std::getenv("RCBF_OUT_DIR");
  opt.outdir = env_outdir ? env_outdir : ".";

  CLI::App* run = app.add_subcommand("run", "Run a closed-loop scenario");
  run->add_option("--scenario", opt.scenario_path, "Scenario JSON file");
  run->add_option("--preset", opt.preset, "Built-in preset name");
  run->add_option("--seed", opt.seed, "Disturbance seed override");
  run->add_option("--duration", opt.duration, "Duration override, seconds");
  run->add_option("--dt", opt.dt, "Control period override, seconds");
  run->add_option("--mode", opt.mode, "Disturbance mode: zero|uniform|worst|best");
  run->add_option("--safety", opt.safety, "Safety mode: assert|log");
  run->add_option("--outdir", opt.outdir, "Output directory (default $RCBF_OUT_DIR or .)");
  run->add_flag("--no-csv", opt.no_csv, "Skip the per-step CSV trace");
  run->add_flag("--serial", opt.serial, "Force the serial bank kernel");
  run->add_option("--sweep", opt.sweep, "Seed range A..B, one run per seed");

  std::string preset_name;
  std::string preset_write;
  bool preset_list = false;
  CLI::App* preset = app.add_subcommand("preset", "Inspect built-in presets");
  preset->add_flag("--list", preset_list, "List preset names");
  preset->add_option("name", preset_name, "Preset to print as scenario JSON");
  preset->add_option("--write", preset_write, "Write the JSON to a file instead of stdout");

  int mesh_count = 500;
  std::vector<double> mesh_axes{8000.0, 4000.0, 4000.0};
  std::string mesh_out;
  CLI::App* mesh = app.add_subcommand("mesh", "Generate an ellipsoid vertex file");
  mesh->add_option("--count", mesh_count, "Vertex count")->check(CLI::PositiveNumber);
  mesh->add_option("--semi-axes", mesh_axes, "Semi-axes in meters")->expected(3);
  mesh->add_option("--out", mesh_out, "Output path")->required();

  std::string oracle_scenario, oracle_preset;
  CLI::App* oracle = app.add_subcommand("oracle", "Print resolved authorities for a scenario");
  oracle->add_option("--scenario", oracle_scenario, "Scenario JSON file");
  oracle->add_option("--preset", oracle_preset, "Built-in preset name");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(opt);

    if (preset->parsed()) {
      if (preset_list) {
        for (const auto& n : rcbf::preset_names()) std::cout << n << "\n";
        return kExitOk;
      }
      if (preset_name.empty())
        throw rcbf::ConfigError("preset: pass a name or --list");
      const rcbf::ScenarioConfig cfg = rcbf::preset_by_name(preset_name);
      if (preset_write.empty())
        std::cout << rcbf::scenario_to_json(cfg);
      else
        rcbf::save_scenario(preset_write, cfg);
      return kExitOk;
    }

    if (mesh->parsed()) {
      const rcbf::Vec3 axes(mesh_axes[0], mesh_axes[1], mesh_axes[2]);
      const auto verts = rcbf::generate_ellipsoid_mesh(axes, mesh_count);
      rcbf::save_mesh(mesh_out, verts);
      std::printf("wrote %zu vertices to %s (max nn spacing %.3f m)\n", verts.size(),
                  mesh_out.c_str(), rcbf::max_nearest_neighbor_spacing(verts));
      return kExitOk;
    }

    if (oracle->parsed()) {
      const rcbf::ScenarioConfig cfg = load_base(oracle_scenario, oracle_preset);
      const rcbf::ResolvedScenario rs = rcbf::resolve_scenario(cfg);
      std::printf("scenario %s: %zu constraints\n", rs.config.name.c_str(), rs.bank.size());
      for (const auto& [label, value] : rs.resolved_a_max) {
        std::printf("  a_max %s = %.12g m/s^2\n", label.c_str(), value);
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
