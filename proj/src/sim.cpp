#include "rcbf/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "rcbf/switching.hpp"

namespace rcbf {

namespace {

constexpr double kSafetyRelTol = 1e-6;  // violation threshold, relative to rho

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t idx = static_cast<size_t>(q * (v.size() - 1) + 0.5);
  return v[std::min(idx, v.size() - 1)];
}

}  // namespace

RunResult run_simulation(const ResolvedScenario& rs) {
  const ScenarioConfig& cfg = rs.config;
  const auto& bank = rs.bank;

  RunResult out;
  out.min_distance = std::numeric_limits<double>::infinity();
  out.max_h = -std::numeric_limits<double>::infinity();
  out.max_H = -std::numeric_limits<double>::infinity();

  const int n_steps = static_cast<int>(std::llround(cfg.duration / cfg.dt));
  out.steps.reserve(n_steps);

  HysteresisBank hysteresis(bank.size());
  DisturbanceProcess disturbance(cfg.disturbance_mode, cfg.disturbance, cfg.seed);

  double t = cfg.t0;
  SimState x = cfg.x0;

  for (int k = 0; k < n_steps; ++k) {
    const auto tic = std::chrono::steady_clock::now();

    std::vector<RcbfEvaluation> evals =
        evaluate_bank(bank, t, x, cfg.gravity, cfg.control, cfg.disturbance, cfg.alpha,
                      cfg.parallel_bank);

    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.min_distance = std::numeric_limits<double>::infinity();
    rec.max_H = evals.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
    rec.max_h = rec.max_H;
    int worst = -1;  // disturbance alignment target: deepest active, else deepest overall
    bool violated = false;
    for (size_t i = 0; i < evals.size(); ++i) {
      rec.max_H = std::max(rec.max_H, evals[i].H);
      rec.max_h = std::max(rec.max_h, evals[i].h);
      rec.min_distance = std::min(rec.min_distance, bank[i].constraint.rho - evals[i].h);
      violated |= evals[i].h > kSafetyRelTol * bank[i].constraint.rho;
    }
    if (violated) ++out.safety_violations;
    if (violated && cfg.safety_mode == ScenarioConfig::SafetyMode::Assert) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "keep-out violation at t = %.6g s (max h = %.6g m)", t,
                    rec.max_h);
      out.abort_reason = buf;
      out.t_final = t;
      out.x_final = x;
      throw SafetyViolationError(buf);
    }

    hysteresis.update(evals, cfg.hysteresis);
    const std::vector<Halfspace> hs = active_halfspaces(evals, hysteresis.sigma());
    for (size_t i = 0; i < evals.size(); ++i) {
      if (hysteresis.sigma()[i] == 1 && (worst < 0 || evals[i].H > evals[worst].H)) {
        worst = static_cast<int>(i);
      }
    }
    if (worst < 0) {
      for (size_t i = 0; i < evals.size(); ++i) {
        if (worst < 0 || evals[i].H > evals[worst].H) worst = static_cast<int>(i);
      }
    }

    QpProblem qp;
    qp.u_nom = nominal_control(cfg.nominal, cfg.gravity, t, x);
    qp.u_max = cfg.control.u_max;
    qp.rows.reserve(hs.size());
    qp.bounds.reserve(hs.size());
    for (const auto& h : hs) {
      qp.rows.push_back(h.row);
      qp.bounds.push_back(h.bound);
    }
    const QpSolution sol = solve_qp(qp);
    rec.solver_status = sol.status;
    rec.active_count = hysteresis.active_count();
    if (sol.status == QpStatus::Optimal) {
      rec.u = sol.u;
    } else {
      rec.u = solve_min_violation(qp).u;
      rec.used_fallback = true;
      ++out.fallback_steps;
    }

    DisturbanceSample w =
        worst >= 0 ? disturbance.next(evals[worst].grad_H.tail<3>(), evals[worst].grad_H.head<3>())
                   : disturbance.next(Vec3::Zero(), Vec3::Zero());

    x = rk4_step(t, x, cfg.dt, rec.u, w.w_u, w.w_x, cfg.gravity);
    t = cfg.t0 + (k + 1) * cfg.dt;

    rec.step_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tic).count();

    out.min_distance = std::min(out.min_distance, rec.min_distance);
    out.max_h = std::max(out.max_h, rec.max_h);
    out.max_H = std::max(out.max_H, rec.max_H);
    if (out.active_histogram.size() <= static_cast<size_t>(rec.active_count)) {
      out.active_histogram.resize(rec.active_count + 1, 0);
    }
    ++out.active_histogram[rec.active_count];
    out.steps.push_back(std::move(rec));
  }

  out.switches_on = hysteresis.switches_on();
  out.switches_off = hysteresis.switches_off();
  out.t_final = t;
  out.x_final = x;
  out.completed = true;

  std::vector<double> ms;
  ms.reserve(out.steps.size());
  for (const auto& s : out.steps) ms.push_back(s.step_ms);
  out.step_ms_p50 = quantile(ms, 0.50);
  out.step_ms_p90 = quantile(ms, 0.90);
  out.step_ms_p99 = quantile(ms, 0.99);
  out.step_ms_max = ms.empty() ? 0.0 : *std::max_element(ms.begin(), ms.end());
  return out;
}

void write_csv(const std::string& path, const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_csv: cannot open " + path);
  out << "t,rx,ry,rz,vx,vy,vz,ux,uy,uz,maxH,active_count,solver_status,step_ms\n";
  char buf[512];
  for (const auto& s : result.steps) {
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%s,%.17g\n",
                  s.t, s.x.r.x(), s.x.r.y(), s.x.r.z(), s.x.v.x(), s.x.v.y(), s.x.v.z(),
                  s.u.x(), s.u.y(), s.u.z(), s.max_H, s.active_count,
                  s.solver_status == QpStatus::Optimal ? "optimal" : "infeasible", s.step_ms);
    out << buf;
  }
  if (!out) throw ConfigError("write_csv: write failed for " + path);
}

std::string summary_json(const ResolvedScenario& rs, const RunResult& result) {
  nlohmann::json j;
  j["scenario"] = rs.config.name;
  j["steps"] = result.steps.size();
  j["completed"] = result.completed;
  if (!result.abort_reason.empty()) j["abort_reason"] = result.abort_reason;
  j["min_distance"] = result.min_distance;
  j["max_h"] = result.max_h;
  j["max_H"] = result.max_H;
  j["switches_on"] = result.switches_on;
  j["switches_off"] = result.switches_off;
  j["active_histogram"] = result.active_histogram;
  j["fallback_steps"] = result.fallback_steps;
  j["safety_violations"] = result.safety_violations;
  j["t_final"] = result.t_final;
  const Vec6 xf = result.x_final.packed();
  j["x_final"] = nlohmann::json::array();
  for (int i = 0; i < 6; ++i) j["x_final"].push_back(xf(i));
  j["step_ms"] = {{"p50", result.step_ms_p50},
                  {"p90", result.step_ms_p90},
                  {"p99", result.step_ms_p99},
                  {"max", result.step_ms_max}};
  nlohmann::json ja = nlohmann::json::object();
  for (const auto& [label, value] : rs.resolved_a_max) ja[label] = value;
  j["resolved_a_max"] = std::move(ja);
  return j.dump(2) + "\n";
}

void write_summary(const std::string& path, const ResolvedScenario& rs,
                   const RunResult& result) {
  std::ofstream out(path);
  if (!out) throw ConfigError("write_summary: cannot open " + path);
  out << summary_json(rs, result);
  if (!out) throw ConfigError("write_summary: write failed for " + path);
}

}  // namespace rcbf
