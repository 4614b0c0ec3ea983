#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcbf/bank.hpp"
#include "rcbf/dynamics.hpp"
#include "rcbf/types.hpp"

namespace rcbf {

// Guidance command fed to the safety filter each step.
struct NominalLaw {
  enum class Kind { None, Flyby, Prox } kind = Kind::None;
  double kp = 0.0;
  double kd = 0.0;
  Vec3 r_target = Vec3::Zero();  // Prox only
};

Vec3 nominal_control(const NominalLaw& law, const GravityModel& g, double t, const SimState& x);

// Full description of a run. Mirrors the JSON scenario schema (schema = 1).
struct ScenarioConfig {
  std::string name;
  double t0 = 0.0;
  double duration = 0.0;
  double dt = 0.0;
  SimState x0;

  GravityModel gravity;
  ControlBounds control;
  DisturbanceBounds disturbance;
  DisturbanceProcess::Mode disturbance_mode = DisturbanceProcess::Mode::Zero;
  uint64_t seed = 0;

  HysteresisParams hysteresis;
  AlphaChoice alpha;
  NominalLaw nominal;

  // Violation of any raw constraint at a step either aborts the run (Assert)
  // or is recorded and the run continues (Log).
  enum class SafetyMode { Assert, Log } safety_mode = SafetyMode::Assert;
  bool parallel_bank = true;

  // Explicit keep-out list. auto_a_max defers the authority constant of a
  // constant (or linear variable) spec to resolve_scenario.
  struct ConstraintEntry {
    KeepOutConstraint constraint;
    RcbfSpec spec;
    bool auto_a_max = false;
  };
  std::vector<ConstraintEntry> constraints;

  // Rotating-body vertex bank, one keep-out ball per vertex, shared spec.
  struct MeshBank {
    enum class Source { None, Generate, File } source = Source::None;
    Vec3 semi_axes = Vec3::Zero();  // Generate
    int count = 0;                  // Generate
    std::string path;               // File
    Vec3 omega = Vec3::Zero();
    double rho = 0.0;
    RcbfSpec spec = ConstantAuthoritySpec{};
    bool auto_a_max = false;
  } mesh;

  void validate() const;  // throws ConfigError with the offending field
};

// Scenario with specs resolved into a runnable bank: potentials constructed,
// auto authorities computed from safe-region samples.
struct ResolvedScenario {
  ScenarioConfig config;
  std::vector<BankEntry> bank;
  std::vector<std::pair<std::string, double>> resolved_a_max;  // label -> value
};

ResolvedScenario resolve_scenario(const ScenarioConfig& cfg);

// JSON round trip. scenario_from_json accepts exactly schema 1 and rejects
// unknown keys so typos fail loudly.
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const std::string& path, const ScenarioConfig& cfg);

// Built-in mission presets:
//   ceres-flyby-1  constant authority, rho 3.63e7 m
//   ceres-flyby-2  gravity-potential variable authority, rho 3.21e7 m
//   ceres-flyby-3  predictive, radial evasion, rho 2.50e7 m
//   ceres-flyby-4  predictive, tangential evasion, rho 4.76e5 m
//   eros-proxops   rotating 500-vertex ellipsoid bank, constant authority
ScenarioConfig ceres_flyby_preset(int variant);
ScenarioConfig eros_proxops_preset();
std::vector<std::string> preset_names();
ScenarioConfig preset_by_name(const std::string& name);

}  // namespace rcbf
