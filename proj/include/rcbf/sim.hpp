#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcbf/qp.hpp"
#include "rcbf/scenario.hpp"

namespace rcbf {

// One control step: state and command at time t, plus filter diagnostics.
struct StepRecord {
  double t = 0.0;
  SimState x;
  Vec3 u = Vec3::Zero();
  double max_H = 0.0;  // over the bank; 0 when the bank is empty
  double max_h = 0.0;
  double min_distance = 0.0;  // to the nearest keep-out center
  int active_count = 0;
  QpStatus solver_status = QpStatus::Optimal;
  bool used_fallback = false;
  double step_ms = 0.0;  // wall time of the full control step
};

struct RunResult {
  std::vector<StepRecord> steps;
  double t_final = 0.0;
  SimState x_final;
  bool completed = false;
  std::string abort_reason;

  double min_distance = 0.0;
  double max_h = 0.0;
  double max_H = 0.0;
  uint64_t switches_on = 0;
  uint64_t switches_off = 0;
  std::vector<uint64_t> active_histogram;  // index = simultaneously active count
  uint64_t fallback_steps = 0;
  uint64_t safety_violations = 0;  // steps with a violated raw constraint (Log mode)

  double step_ms_p50 = 0.0;
  double step_ms_p90 = 0.0;
  double step_ms_p99 = 0.0;
  double step_ms_max = 0.0;
};

// Closed loop: evaluate the bank, update hysteresis, filter the nominal
// command through the QP, draw the disturbance, integrate one step. In
// Assert safety mode a violated raw constraint throws SafetyViolationError;
// in Log mode it increments safety_violations and the run continues.
RunResult run_simulation(const ResolvedScenario& rs);

// Per-step trace. Header:
//   t,rx,ry,rz,vx,vy,vz,ux,uy,uz,maxH,active_count,solver_status,step_ms
void write_csv(const std::string& path, const RunResult& result);

// Aggregates as JSON, including the resolved authorities of the scenario.
std::string summary_json(const ResolvedScenario& rs, const RunResult& result);
void write_summary(const std::string& path, const ResolvedScenario& rs,
                   const RunResult& result);

}  // namespace rcbf
