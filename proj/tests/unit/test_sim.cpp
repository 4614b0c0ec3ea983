#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "rcbf/sim.hpp"

using namespace rcbf;

namespace {

// Single fixed keep-out ball, no gravity, no nominal control.
ScenarioConfig quiet_scenario() {
  ScenarioConfig cfg;
  cfg.name = "quiet";
  cfg.duration = 100.0;
  cfg.dt = 1.0;
  Vec6 x0;
  x0 << 1.0e6, 0.0, 0.0, 0.0, 0.0, 0.0;
  cfg.x0 = SimState::unpack(x0);
  cfg.control.u_max = 1.0;
  cfg.hysteresis = {1.0, 3.0};
  cfg.alpha = {AlphaChoice::Kind::Rate, 1.0, 0.0};
  ScenarioConfig::ConstraintEntry e;
  e.constraint.rho = 10.0;
  e.constraint.center = CenterTrajectory::fixed(Vec3::Zero());
  e.spec = ConstantAuthoritySpec{0.5};
  cfg.constraints.push_back(e);
  return cfg;
}

ScenarioConfig short_flyby(uint64_t seed, double duration = 14400.0) {
  ScenarioConfig cfg = ceres_flyby_preset(1);
  cfg.duration = duration;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("far from every constraint the filter passes zero control through") {
  const ResolvedScenario rs = resolve_scenario(quiet_scenario());
  const RunResult res = run_simulation(rs);
  CHECK(res.completed);
  CHECK(res.steps.size() == 100);
  CHECK(res.max_H < 0.0);
  CHECK(res.max_h == doctest::Approx(-(1.0e6 - 10.0)).epsilon(1e-12));
  CHECK(res.min_distance == doctest::Approx(1.0e6).epsilon(1e-12));
  CHECK(res.switches_on == 0);
  CHECK(res.safety_violations == 0);
  for (const auto& s : res.steps) {
    CHECK(s.u.norm() == 0.0);
    CHECK(s.active_count == 0);
    CHECK(s.solver_status == QpStatus::Optimal);
  }
  // All mass of the activity histogram sits at zero active constraints.
  REQUIRE(res.active_histogram.size() == 1);
  CHECK(res.active_histogram[0] == 100);
}

TEST_CASE("identical configuration and seed reproduce the trajectory bit for bit") {
  const ResolvedScenario rs = resolve_scenario(short_flyby(7));
  const RunResult a = run_simulation(rs);
  const RunResult b = run_simulation(rs);
  REQUIRE(a.steps.size() == b.steps.size());
  CHECK(a.x_final.r == b.x_final.r);
  CHECK(a.x_final.v == b.x_final.v);
  for (std::size_t k = 0; k < a.steps.size(); ++k) {
    CHECK(a.steps[k].x.r == b.steps[k].x.r);
    CHECK(a.steps[k].x.v == b.steps[k].x.v);
    CHECK(a.steps[k].u == b.steps[k].u);
    CHECK(a.steps[k].max_H == b.steps[k].max_H);
  }

  const RunResult c = run_simulation(resolve_scenario(short_flyby(8)));
  CHECK(c.x_final.r != a.x_final.r);  // different seed, different disturbance draws
}

TEST_CASE("a start inside the keep-out ball aborts in assert mode") {
  ScenarioConfig cfg = ceres_flyby_preset(1);
  Vec6 x0;
  x0 << 3.0e7, 0.0, 0.0, 0.0, 0.0, 0.0;  // rho is 3.63e7: inside
  cfg.x0 = SimState::unpack(x0);
  const ResolvedScenario rs = resolve_scenario(cfg);
  CHECK_THROWS_AS(run_simulation(rs), SafetyViolationError);
}

TEST_CASE("log mode records violations and keeps running") {
  ScenarioConfig cfg = ceres_flyby_preset(1);
  cfg.duration = 600.0;  // ten steps
  cfg.safety_mode = ScenarioConfig::SafetyMode::Log;
  Vec6 x0;
  x0 << 3.0e7, 0.0, 0.0, 0.0, 0.0, 0.0;
  cfg.x0 = SimState::unpack(x0);
  const RunResult res = run_simulation(resolve_scenario(cfg));
  CHECK(res.completed);
  CHECK(res.safety_violations > 0);
  CHECK(res.steps.size() == 10);
}

TEST_CASE("per-step trace file has the pinned header and one row per step") {
  const ResolvedScenario rs = resolve_scenario(quiet_scenario());
  const RunResult res = run_simulation(rs);
  const std::string path = "/tmp/rcbf_test_trace.csv";
  write_csv(path, res);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "t,rx,ry,rz,vx,vy,vz,ux,uy,uz,maxH,active_count,solver_status,step_ms");
  std::size_t rows = 0;
  double prev_t = -1.0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string field;
    std::size_t fields = 0;
    double t0 = 0.0;
    while (std::getline(ss, field, ',')) {
      if (fields == 0) t0 = std::stod(field);
      ++fields;
    }
    CHECK(fields == 14);
    CHECK(t0 > prev_t);
    prev_t = t0;
  }
  CHECK(rows == res.steps.size());
  std::remove(path.c_str());
}

TEST_CASE("run summary is valid JSON with a consistent activity histogram") {
  const ResolvedScenario rs = resolve_scenario(short_flyby(3, 3600.0));
  const RunResult res = run_simulation(rs);
  const auto j = nlohmann::json::parse(summary_json(rs, res));
  CHECK(j.at("scenario") == "ceres-flyby-1");
  CHECK(j.at("steps").get<std::size_t>() == res.steps.size());
  CHECK(j.at("completed").get<bool>());
  CHECK(j.at("safety_violations").get<uint64_t>() == 0);
  CHECK(j.at("resolved_a_max").size() == 1);
  uint64_t mass = 0;
  for (const auto& c : j.at("active_histogram")) mass += c.get<uint64_t>();
  CHECK(mass == res.steps.size());
  CHECK(j.at("step_ms").at("p50").get<double>() >= 0.0);
}

TEST_CASE("adversarial disturbance alignment still never breaches the ball") {
  ScenarioConfig cfg = ceres_flyby_preset(1);
  cfg.disturbance_mode = DisturbanceProcess::Mode::WorstCase;
  const ResolvedScenario rs = resolve_scenario(cfg);
  const RunResult res = run_simulation(rs);  // Assert mode would throw on violation
  CHECK(res.completed);
  CHECK(res.safety_violations == 0);
  CHECK(res.min_distance >= cfg.constraints[0].constraint.rho * (1.0 - 1e-6));
  CHECK(res.max_h <= 1e-6 * cfg.constraints[0].constraint.rho);
}
