#include "rcbf/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rcbf/mesh.hpp"
#include "rcbf/qp.hpp"

namespace rcbf {

using nlohmann::json;

namespace {

// Surrogate point-mass strength for the proximity-ops primary, sized so the
// residual thrust authority after gravity at the keep-out envelope matches
// the mission's quoted deceleration budget.
constexpr double kErosMu = 6.7e5;  // m^3/s^2

void check_keys(const json& j, const std::string& ctx, std::set<std::string> allowed) {
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError("scenario: unknown key \"" + item.key() + "\" in " + ctx);
    }
  }
}

Vec3 read_vec3(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 3) throw ConfigError("scenario: " + ctx + " must be [x, y, z]");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json write_vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

// a_max style fields accept a number or the string "auto".
double read_a_max(const json& j, const std::string& ctx, bool& auto_flag) {
  if (j.is_string()) {
    if (j.get<std::string>() != "auto")
      throw ConfigError("scenario: " + ctx + " must be a number or \"auto\"");
    auto_flag = true;
    return 0.0;
  }
  auto_flag = false;
  return j.get<double>();
}

Maneuver read_maneuver(const std::string& s) {
  if (s == "opt") return Maneuver::Opt;
  if (s == "rad") return Maneuver::Rad;
  if (s == "orth") return Maneuver::Orth;
  throw ConfigError("scenario: maneuver must be opt, rad or orth, got \"" + s + "\"");
}

const char* maneuver_name(Maneuver m) {
  switch (m) {
    case Maneuver::Opt: return "opt";
    case Maneuver::Rad: return "rad";
    case Maneuver::Orth: return "orth";
  }
  return "?";
}

RcbfSpec read_spec(const json& j, bool& auto_flag) {
  const std::string kind = j.at("kind").get<std::string>();
  auto_flag = false;
  if (kind == "constant") {
    check_keys(j, "rcbf", {"kind", "a_max"});
    ConstantAuthoritySpec s;
    s.a_max = read_a_max(j.at("a_max"), "rcbf.a_max", auto_flag);
    return s;
  }
  if (kind == "variable") {
    check_keys(j, "rcbf", {"kind", "family", "a_max"});
    const std::string family = j.at("family").get<std::string>();
    VariableAuthoritySpec s;
    if (family == "gravity") {
      s.family = VariableAuthoritySpec::Family::Gravity;
    } else if (family == "linear") {
      s.family = VariableAuthoritySpec::Family::Linear;
      s.a_max = read_a_max(j.at("a_max"), "rcbf.a_max", auto_flag);
    } else {
      throw ConfigError("scenario: rcbf.family must be gravity or linear, got \"" + family + "\"");
    }
    return s;
  }
  if (kind == "predictive") {
    check_keys(j, "rcbf",
               {"kind", "maneuver", "horizon", "ode_dt", "refine_tol", "early_stop_drop",
                "ambiguity_tol", "sign_width"});
    PredictiveSpec s;
    s.maneuver = read_maneuver(j.at("maneuver").get<std::string>());
    s.horizon = j.at("horizon").get<double>();
    s.ode_dt = j.at("ode_dt").get<double>();
    s.refine_tol = j.value("refine_tol", s.refine_tol);
    s.early_stop_drop = j.value("early_stop_drop", s.early_stop_drop);
    s.ambiguity_tol = j.value("ambiguity_tol", s.ambiguity_tol);
    s.sign_width = j.value("sign_width", s.sign_width);
    return s;
  }
  throw ConfigError("scenario: rcbf.kind must be constant, variable or predictive, got \"" +
                    kind + "\"");
}

json write_spec(const RcbfSpec& spec, bool auto_flag) {
  json j;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantAuthoritySpec>) {
          j["kind"] = "constant";
          if (auto_flag)
            j["a_max"] = "auto";
          else
            j["a_max"] = s.a_max;
        } else if constexpr (std::is_same_v<T, VariableAuthoritySpec>) {
          j["kind"] = "variable";
          switch (s.family) {
            case VariableAuthoritySpec::Family::Gravity:
              j["family"] = "gravity";
              break;
            case VariableAuthoritySpec::Family::Linear:
              j["family"] = "linear";
              if (auto_flag)
                j["a_max"] = "auto";
              else
                j["a_max"] = s.a_max;
              break;
            case VariableAuthoritySpec::Family::Custom:
              throw ConfigError("scenario: custom potentials cannot be serialized");
          }
        } else {
          j["kind"] = "predictive";
          j["maneuver"] = maneuver_name(s.maneuver);
          j["horizon"] = s.horizon;
          j["ode_dt"] = s.ode_dt;
          j["refine_tol"] = s.refine_tol;
          j["early_stop_drop"] = s.early_stop_drop;
          j["ambiguity_tol"] = s.ambiguity_tol;
          j["sign_width"] = s.sign_width;
        }
      },
      spec);
  return j;
}

CenterTrajectory read_center(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fixed") {
    check_keys(j, "center", {"kind", "r0"});
    return CenterTrajectory::fixed(read_vec3(j.at("r0"), "center.r0"));
  }
  if (kind == "rotating") {
    check_keys(j, "center", {"kind", "r0", "omega", "t0"});
    return CenterTrajectory::rotating(read_vec3(j.at("r0"), "center.r0"),
                                      read_vec3(j.at("omega"), "center.omega"),
                                      j.value("t0", 0.0));
  }
  throw ConfigError("scenario: center.kind must be fixed or rotating, got \"" + kind + "\"");
}

json write_center(const CenterTrajectory& c) {
  json j;
  if (c.kind == CenterTrajectory::Kind::Fixed) {
    j["kind"] = "fixed";
    j["r0"] = write_vec3(c.r0);
  } else {
    j["kind"] = "rotating";
    j["r0"] = write_vec3(c.r0);
    j["omega"] = write_vec3(c.omega);
    j["t0"] = c.t0;
  }
  return j;
}

DisturbanceProcess::Mode read_mode(const std::string& s) {
  if (s == "zero") return DisturbanceProcess::Mode::Zero;
  if (s == "uniform") return DisturbanceProcess::Mode::UniformBall;
  if (s == "worst") return DisturbanceProcess::Mode::WorstCase;
  if (s == "best") return DisturbanceProcess::Mode::BestCase;
  throw ConfigError("scenario: disturbance.mode must be zero, uniform, worst or best, got \"" +
                    s + "\"");
}

const char* mode_name(DisturbanceProcess::Mode m) {
  switch (m) {
    case DisturbanceProcess::Mode::Zero: return "zero";
    case DisturbanceProcess::Mode::UniformBall: return "uniform";
    case DisturbanceProcess::Mode::WorstCase: return "worst";
    case DisturbanceProcess::Mode::BestCase: return "best";
  }
  return "?";
}

// Unit Fibonacci directions, reusing the mesh generator on the unit sphere.
std::vector<Vec3> fib_directions(int n) { return generate_ellipsoid_mesh(Vec3::Ones(), n); }

// Boundary samples of one keep-out ball: the worst field strength over the
// safe exterior sits on the boundary when the singularity is inside the ball.
std::vector<std::pair<double, Vec3>> keepout_boundary_samples(const KeepOutConstraint& c,
                                                              const GravityModel& g,
                                                              double t0) {
  std::vector<double> times{t0};
  if (c.center.kind == CenterTrajectory::Kind::Rotating && c.center.omega.norm() > 0.0) {
    const double period = 2.0 * M_PI / c.center.omega.norm();
    times.clear();
    for (int k = 0; k < 8; ++k) times.push_back(t0 + period * k / 8.0);
  }
  std::vector<std::pair<double, Vec3>> samples;
  for (double t : times) {
    const Vec3 rc = center_state(c.center, t).r;
    if (g.kind == GravityModel::Kind::PointMass && (g.center - rc).norm() >= c.rho) {
      throw ConfigError(
          "scenario: a_max auto needs the gravity center inside the keep-out ball; "
          "set a_max explicitly");
    }
    for (const Vec3& d : fib_directions(200)) {
      samples.emplace_back(t, rc + c.rho * d);
    }
  }
  return samples;
}

// Outer envelope of the union of vertex balls, sampled along rays from the
// body origin. Rays missing every ball (coverage gaps near high curvature)
// fall back to the outermost vertex projection, which is conservative.
std::vector<std::pair<double, Vec3>> mesh_envelope_samples(const std::vector<Vec3>& verts,
                                                           const Vec3& omega, double rho,
                                                           double t0, double duration) {
  std::vector<double> times{t0};
  if (omega.norm() > 0.0) {
    const double window = std::min(duration, 2.0 * M_PI / omega.norm());
    times.clear();
    for (int k = 0; k < 4; ++k) times.push_back(t0 + window * k / 4.0);
  }
  const std::vector<Vec3> dirs = fib_directions(800);
  std::vector<std::pair<double, Vec3>> samples;
  samples.reserve(times.size() * dirs.size());
  for (double t : times) {
    std::vector<Vec3> vt(verts.size());
    if (omega.norm() > 0.0) {
      const Mat3 R = Eigen::AngleAxisd(omega.norm() * (t - t0), omega.normalized()).matrix();
      for (size_t i = 0; i < verts.size(); ++i) vt[i] = R * verts[i];
    } else {
      vt = verts;
    }
    for (const Vec3& d : dirs) {
      double envelope = 0.0;
      double fallback = 0.0;
      for (const Vec3& v : vt) {
        const double s = d.dot(v);
        fallback = std::max(fallback, s);
        const double disc = s * s - v.squaredNorm() + rho * rho;
        if (disc >= 0.0) envelope = std::max(envelope, s + std::sqrt(disc));
      }
      const double radius = envelope > 0.0 ? envelope : fallback;
      if (radius > 0.0) samples.emplace_back(t, radius * d);
    }
  }
  return samples;
}

RcbfSpec resolve_spec(const RcbfSpec& spec, bool auto_flag, const KeepOutConstraint& c,
                      const ScenarioConfig& cfg,
                      const std::vector<std::pair<double, Vec3>>* shared_samples,
                      std::optional<double>* resolved_out) {
  return std::visit(
      [&](const auto& s) -> RcbfSpec {
        using T = std::decay_t<decltype(s)>;
        const auto resolve_a_max = [&]() {
          const auto samples = shared_samples
                                   ? *shared_samples
                                   : keepout_boundary_samples(c, cfg.gravity, cfg.t0);
          const auto a = compute_a_max0(c, cfg.gravity, cfg.control, cfg.disturbance, samples);
          if (!a) {
            throw ConfigError(
                "scenario: no residual authority at the keep-out boundary, a_max auto failed");
          }
          if (resolved_out) *resolved_out = *a;
          return *a;
        };
        if constexpr (std::is_same_v<T, ConstantAuthoritySpec>) {
          ConstantAuthoritySpec r = s;
          if (auto_flag) r.a_max = resolve_a_max();
          return r;
        } else if constexpr (std::is_same_v<T, VariableAuthoritySpec>) {
          switch (s.family) {
            case VariableAuthoritySpec::Family::Gravity: {
              if (cfg.gravity.kind != GravityModel::Kind::PointMass)
                throw ConfigError("scenario: gravity potential needs point-mass gravity");
              if (c.center.kind != CenterTrajectory::Kind::Fixed ||
                  (c.center.r0 - cfg.gravity.center).norm() > 1e-9 * std::max(1.0, c.rho)) {
                throw ConfigError(
                    "scenario: gravity potential needs the keep-out ball centered on the "
                    "gravity source");
              }
              return gravity_phi(cfg.gravity.mu, c.rho, cfg.control.u_max,
                                 cfg.disturbance.w_u_max);
            }
            case VariableAuthoritySpec::Family::Linear:
              return linear_phi(auto_flag ? resolve_a_max() : s.a_max);
            case VariableAuthoritySpec::Family::Custom:
              if (!s.phi || !s.Phi || !s.Phi_inv)
                throw ConfigError("scenario: custom potential is missing its functions");
              return s;
          }
          throw ConfigError("scenario: unreachable potential family");
        } else {
          return s;
        }
      },
      spec);
}

}  // namespace

Vec3 nominal_control(const NominalLaw& law, const GravityModel& g, double t, const SimState& x) {
  (void)t;
  switch (law.kind) {
    case NominalLaw::Kind::None:
      return Vec3::Zero();
    case NominalLaw::Kind::Flyby:
      return nominal_flyby(x.r, x.v, law.kp, law.kd, g.mu);
    case NominalLaw::Kind::Prox:
      return nominal_prox(x.r, x.v, law.r_target, law.kp, law.kd);
  }
  return Vec3::Zero();
}

void ScenarioConfig::validate() const {
  if (name.empty()) throw ConfigError("scenario: name is required");
  if (duration <= 0.0) throw ConfigError("scenario: duration must be positive");
  if (dt <= 0.0 || dt > duration) throw ConfigError("scenario: dt must be in (0, duration]");
  if (control.u_max <= 0.0) throw ConfigError("scenario: control.u_max must be positive");
  if (disturbance.w_u_max < 0.0 || disturbance.w_x_max < 0.0)
    throw ConfigError("scenario: disturbance bounds must be nonnegative");
  if (disturbance.w_u_max >= control.u_max)
    throw ConfigError("scenario: w_u_max must be below u_max");

  const bool any = !constraints.empty() || mesh.source != MeshBank::Source::None;
  if (any) {
    if (hysteresis.eps1 <= 0.0 || hysteresis.eps2 <= hysteresis.eps1)
      throw ConfigError("scenario: need 0 < eps1 < eps2");
  }
  switch (alpha.kind) {
    case AlphaChoice::Kind::Rate:
      if (any && alpha.eps1 <= 0.0) throw ConfigError("scenario: rate alpha needs eps1 > 0");
      break;
    case AlphaChoice::Kind::Linear:
      if (alpha.k <= 0.0) throw ConfigError("scenario: linear alpha needs k > 0");
      break;
  }

  const auto check_spec = [&](const RcbfSpec& s, const std::string& ctx) {
    if (const auto* p = std::get_if<PredictiveSpec>(&s)) {
      if (p->horizon <= 0.0) throw ConfigError("scenario: " + ctx + ".horizon must be positive");
      if (p->ode_dt <= 0.0) throw ConfigError("scenario: " + ctx + ".ode_dt must be positive");
      if (p->refine_tol <= 0.0)
        throw ConfigError("scenario: " + ctx + ".refine_tol must be positive");
      if (p->sign_width <= 0.0 || p->sign_width > 0.1)
        throw ConfigError("scenario: " + ctx + ".sign_width must be in (0, 0.1]");
      if (disturbance.w_x_max != 0.0)
        throw ConfigError("scenario: predictive constructions require w_x_max = 0");
    }
  };
  for (size_t i = 0; i < constraints.size(); ++i) {
    const std::string ctx = "constraints[" + std::to_string(i) + "]";
    if (constraints[i].constraint.rho <= 0.0)
      throw ConfigError("scenario: " + ctx + ".rho must be positive");
    check_spec(constraints[i].spec, ctx);
  }
  if (mesh.source != MeshBank::Source::None) {
    if (mesh.rho <= 0.0) throw ConfigError("scenario: mesh.rho must be positive");
    if (mesh.source == MeshBank::Source::Generate) {
      if (mesh.count < 1) throw ConfigError("scenario: mesh.count must be positive");
      if (mesh.semi_axes.minCoeff() <= 0.0)
        throw ConfigError("scenario: mesh.semi_axes must be positive");
    } else if (mesh.path.empty()) {
      throw ConfigError("scenario: mesh.path is required for file meshes");
    }
    check_spec(mesh.spec, "mesh");
  }
}

ResolvedScenario resolve_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ResolvedScenario rs;
  rs.config = cfg;

  for (size_t i = 0; i < cfg.constraints.size(); ++i) {
    const auto& e = cfg.constraints[i];
    std::optional<double> got;
    RcbfSpec spec = resolve_spec(e.spec, e.auto_a_max, e.constraint, cfg, nullptr, &got);
    if (got) rs.resolved_a_max.emplace_back("constraints[" + std::to_string(i) + "]", *got);
    rs.bank.push_back({e.constraint, std::move(spec)});
  }

  if (cfg.mesh.source != ScenarioConfig::MeshBank::Source::None) {
    const std::vector<Vec3> verts =
        cfg.mesh.source == ScenarioConfig::MeshBank::Source::Generate
            ? generate_ellipsoid_mesh(cfg.mesh.semi_axes, cfg.mesh.count)
            : load_mesh(cfg.mesh.path);
    const auto samples =
        mesh_envelope_samples(verts, cfg.mesh.omega, cfg.mesh.rho, cfg.t0, cfg.duration);
    // Shared authority: the weakest vertex governs, so take the minimum of
    // the per-vertex resolutions.
    std::optional<double> shared;
    std::vector<BankEntry> entries =
        make_rotating_bank(verts, cfg.mesh.omega, cfg.mesh.rho, cfg.mesh.spec);
    for (auto& entry : entries) {
      std::optional<double> got;
      entry.spec =
          resolve_spec(cfg.mesh.spec, cfg.mesh.auto_a_max, entry.constraint, cfg, &samples, &got);
      if (got) shared = shared ? std::min(*shared, *got) : *got;
    }
    if (shared) {
      // Re-broadcast the min so every vertex uses the same constant.
      for (auto& entry : entries) {
        if (auto* c = std::get_if<ConstantAuthoritySpec>(&entry.spec)) c->a_max = *shared;
        if (auto* v = std::get_if<VariableAuthoritySpec>(&entry.spec);
            v && v->family == VariableAuthoritySpec::Family::Linear) {
          entry.spec = linear_phi(*shared);
        }
      }
      rs.resolved_a_max.emplace_back("mesh", *shared);
    }
    rs.bank.insert(rs.bank.end(), std::make_move_iterator(entries.begin()),
                   std::make_move_iterator(entries.end()));
  }
  return rs;
}

ScenarioConfig scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  check_keys(j, "scenario",
             {"schema", "name", "t0", "duration", "dt", "x0", "gravity", "control",
              "disturbance", "hysteresis", "alpha", "nominal", "safety_mode", "parallel_bank",
              "constraints", "mesh"});
  if (j.value("schema", 0) != 1) throw ConfigError("scenario: schema must be 1");

  ScenarioConfig cfg;
  cfg.name = j.at("name").get<std::string>();
  cfg.t0 = j.value("t0", 0.0);
  cfg.duration = j.at("duration").get<double>();
  cfg.dt = j.at("dt").get<double>();

  const json& jx = j.at("x0");
  if (!jx.is_array() || jx.size() != 6)
    throw ConfigError("scenario: x0 must be [rx, ry, rz, vx, vy, vz]");
  Vec6 x0;
  for (int i = 0; i < 6; ++i) x0(i) = jx[i].get<double>();
  cfg.x0 = SimState::unpack(x0);

  {
    const json& jg = j.at("gravity");
    const std::string kind = jg.at("kind").get<std::string>();
    if (kind == "zero") {
      check_keys(jg, "gravity", {"kind"});
      cfg.gravity = GravityModel::zero();
    } else if (kind == "point_mass") {
      check_keys(jg, "gravity", {"kind", "mu", "center"});
      cfg.gravity = GravityModel::point_mass(
          jg.at("mu").get<double>(),
          jg.contains("center") ? read_vec3(jg.at("center"), "gravity.center") : Vec3::Zero());
    } else {
      throw ConfigError("scenario: gravity.kind must be zero or point_mass, got \"" + kind +
                        "\"");
    }
  }
  {
    const json& jc = j.at("control");
    check_keys(jc, "control", {"u_max"});
    cfg.control.u_max = jc.at("u_max").get<double>();
  }
  {
    const json& jd = j.at("disturbance");
    check_keys(jd, "disturbance", {"w_u_max", "w_x_max", "mode", "seed"});
    cfg.disturbance.w_u_max = jd.at("w_u_max").get<double>();
    cfg.disturbance.w_x_max = jd.at("w_x_max").get<double>();
    cfg.disturbance_mode = read_mode(jd.value("mode", "zero"));
    cfg.seed = jd.value("seed", uint64_t{0});
  }
  {
    const json& jh = j.at("hysteresis");
    check_keys(jh, "hysteresis", {"eps1", "eps2"});
    cfg.hysteresis.eps1 = jh.at("eps1").get<double>();
    cfg.hysteresis.eps2 = jh.at("eps2").get<double>();
  }
  {
    const json& ja = j.at("alpha");
    const std::string kind = ja.at("kind").get<std::string>();
    if (kind == "rate") {
      check_keys(ja, "alpha", {"kind", "eps1"});
      cfg.alpha.kind = AlphaChoice::Kind::Rate;
      cfg.alpha.eps1 = ja.value("eps1", cfg.hysteresis.eps1);
    } else if (kind == "linear") {
      check_keys(ja, "alpha", {"kind", "k"});
      cfg.alpha.kind = AlphaChoice::Kind::Linear;
      cfg.alpha.k = ja.at("k").get<double>();
    } else {
      throw ConfigError("scenario: alpha.kind must be rate or linear, got \"" + kind + "\"");
    }
  }
  {
    const json& jn = j.at("nominal");
    const std::string kind = jn.at("kind").get<std::string>();
    if (kind == "none") {
      check_keys(jn, "nominal", {"kind"});
      cfg.nominal.kind = NominalLaw::Kind::None;
    } else if (kind == "flyby") {
      check_keys(jn, "nominal", {"kind", "kp", "kd"});
      cfg.nominal.kind = NominalLaw::Kind::Flyby;
      cfg.nominal.kp = jn.at("kp").get<double>();
      cfg.nominal.kd = jn.at("kd").get<double>();
    } else if (kind == "prox") {
      check_keys(jn, "nominal", {"kind", "kp", "kd", "r_target"});
      cfg.nominal.kind = NominalLaw::Kind::Prox;
      cfg.nominal.kp = jn.at("kp").get<double>();
      cfg.nominal.kd = jn.at("kd").get<double>();
      cfg.nominal.r_target = read_vec3(jn.at("r_target"), "nominal.r_target");
    } else {
      throw ConfigError("scenario: nominal.kind must be none, flyby or prox, got \"" + kind +
                        "\"");
    }
  }
  {
    const std::string sm = j.value("safety_mode", "assert");
    if (sm == "assert")
      cfg.safety_mode = ScenarioConfig::SafetyMode::Assert;
    else if (sm == "log")
      cfg.safety_mode = ScenarioConfig::SafetyMode::Log;
    else
      throw ConfigError("scenario: safety_mode must be assert or log, got \"" + sm + "\"");
  }
  cfg.parallel_bank = j.value("parallel_bank", true);

  if (j.contains("constraints")) {
    for (const json& je : j.at("constraints")) {
      check_keys(je, "constraints[]", {"rho", "center", "rcbf"});
      ScenarioConfig::ConstraintEntry e;
      e.constraint.rho = je.at("rho").get<double>();
      e.constraint.center = read_center(je.at("center"));
      e.spec = read_spec(je.at("rcbf"), e.auto_a_max);
      cfg.constraints.push_back(std::move(e));
    }
  }
  if (j.contains("mesh")) {
    const json& jm = j.at("mesh");
    check_keys(jm, "mesh", {"source", "semi_axes", "count", "path", "omega", "rho", "rcbf"});
    const std::string src = jm.at("source").get<std::string>();
    if (src == "generate")
      cfg.mesh.source = ScenarioConfig::MeshBank::Source::Generate;
    else if (src == "file")
      cfg.mesh.source = ScenarioConfig::MeshBank::Source::File;
    else
      throw ConfigError("scenario: mesh.source must be generate or file, got \"" + src + "\"");
    if (cfg.mesh.source == ScenarioConfig::MeshBank::Source::Generate) {
      cfg.mesh.semi_axes = read_vec3(jm.at("semi_axes"), "mesh.semi_axes");
      cfg.mesh.count = jm.at("count").get<int>();
    } else {
      cfg.mesh.path = jm.at("path").get<std::string>();
    }
    cfg.mesh.omega = read_vec3(jm.at("omega"), "mesh.omega");
    cfg.mesh.rho = jm.at("rho").get<double>();
    cfg.mesh.spec = read_spec(jm.at("rcbf"), cfg.mesh.auto_a_max);
  }

  cfg.validate();
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema"] = 1;
  j["name"] = cfg.name;
  j["t0"] = cfg.t0;
  j["duration"] = cfg.duration;
  j["dt"] = cfg.dt;
  const Vec6 x0 = cfg.x0.packed();
  j["x0"] = json::array();
  for (int i = 0; i < 6; ++i) j["x0"].push_back(x0(i));

  if (cfg.gravity.kind == GravityModel::Kind::Zero) {
    j["gravity"] = {{"kind", "zero"}};
  } else {
    j["gravity"] = {{"kind", "point_mass"},
                    {"mu", cfg.gravity.mu},
                    {"center", write_vec3(cfg.gravity.center)}};
  }
  j["control"] = {{"u_max", cfg.control.u_max}};
  j["disturbance"] = {{"w_u_max", cfg.disturbance.w_u_max},
                      {"w_x_max", cfg.disturbance.w_x_max},
                      {"mode", mode_name(cfg.disturbance_mode)},
                      {"seed", cfg.seed}};
  j["hysteresis"] = {{"eps1", cfg.hysteresis.eps1}, {"eps2", cfg.hysteresis.eps2}};
  if (cfg.alpha.kind == AlphaChoice::Kind::Rate) {
    j["alpha"] = {{"kind", "rate"}, {"eps1", cfg.alpha.eps1}};
  } else {
    j["alpha"] = {{"kind", "linear"}, {"k", cfg.alpha.k}};
  }
  switch (cfg.nominal.kind) {
    case NominalLaw::Kind::None:
      j["nominal"] = {{"kind", "none"}};
      break;
    case NominalLaw::Kind::Flyby:
      j["nominal"] = {{"kind", "flyby"}, {"kp", cfg.nominal.kp}, {"kd", cfg.nominal.kd}};
      break;
    case NominalLaw::Kind::Prox:
      j["nominal"] = {{"kind", "prox"},
                      {"kp", cfg.nominal.kp},
                      {"kd", cfg.nominal.kd},
                      {"r_target", write_vec3(cfg.nominal.r_target)}};
      break;
  }
  j["safety_mode"] = cfg.safety_mode == ScenarioConfig::SafetyMode::Assert ? "assert" : "log";
  j["parallel_bank"] = cfg.parallel_bank;

  if (!cfg.constraints.empty()) {
    j["constraints"] = json::array();
    for (const auto& e : cfg.constraints) {
      json je;
      je["rho"] = e.constraint.rho;
      je["center"] = write_center(e.constraint.center);
      je["rcbf"] = write_spec(e.spec, e.auto_a_max);
      j["constraints"].push_back(std::move(je));
    }
  }
  if (cfg.mesh.source != ScenarioConfig::MeshBank::Source::None) {
    json jm;
    if (cfg.mesh.source == ScenarioConfig::MeshBank::Source::Generate) {
      jm["source"] = "generate";
      jm["semi_axes"] = write_vec3(cfg.mesh.semi_axes);
      jm["count"] = cfg.mesh.count;
    } else {
      jm["source"] = "file";
      jm["path"] = cfg.mesh.path;
    }
    jm["omega"] = write_vec3(cfg.mesh.omega);
    jm["rho"] = cfg.mesh.rho;
    jm["rcbf"] = write_spec(cfg.mesh.spec, cfg.mesh.auto_a_max);
    j["mesh"] = std::move(jm);
  }
  return j.dump(2) + "\n";
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return scenario_from_json(ss.str());
}

void save_scenario(const std::string& path, const ScenarioConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ConfigError("scenario: cannot open " + path + " for writing");
  out << scenario_to_json(cfg);
  if (!out) throw ConfigError("scenario: write failed for " + path);
}

ScenarioConfig ceres_flyby_preset(int variant) {
  if (variant < 1 || variant > 4) throw ConfigError("ceres_flyby_preset: variant must be 1..4");
  ScenarioConfig cfg;
  cfg.name = "ceres-flyby-" + std::to_string(variant);
  cfg.t0 = 0.0;
  cfg.duration = 864000.0;  // ten days
  cfg.dt = 60.0;
  Vec6 x0;
  x0 << -6.0e7, -1.0e6, 0.0, 20.0, -2.0, 0.0;
  cfg.x0 = SimState::unpack(x0);
  cfg.gravity = GravityModel::point_mass(6.26325e10);
  cfg.control.u_max = 1.0e-4;
  cfg.disturbance.w_u_max = 5.0e-6;
  cfg.disturbance.w_x_max = (variant <= 2) ? 2.0e-6 : 0.0;  // predictive needs exact position
  cfg.disturbance_mode = DisturbanceProcess::Mode::UniformBall;
  cfg.seed = 1;
  cfg.hysteresis = {5.0e4, 1.5e5};
  cfg.alpha = {AlphaChoice::Kind::Rate, cfg.hysteresis.eps1, 0.0};
  cfg.nominal.kind = NominalLaw::Kind::Flyby;
  cfg.nominal.kp = 1.2e-11;
  cfg.nominal.kd = 6.0e-5;

  ScenarioConfig::ConstraintEntry e;
  e.constraint.center = CenterTrajectory::fixed(Vec3::Zero());
  switch (variant) {
    case 1:
      e.constraint.rho = 3.63e7;
      e.spec = ConstantAuthoritySpec{};
      e.auto_a_max = true;
      break;
    case 2: {
      e.constraint.rho = 3.21e7;
      VariableAuthoritySpec v;
      v.family = VariableAuthoritySpec::Family::Gravity;
      e.spec = v;
      break;
    }
    case 3: {
      e.constraint.rho = 2.50e7;
      PredictiveSpec p;
      p.maneuver = Maneuver::Opt;
      p.horizon = 4.0e6;
      p.ode_dt = 3.0e4;
      p.refine_tol = 0.1;
      p.early_stop_drop = 5.0e4;
      e.spec = p;
      break;
    }
    case 4: {
      e.constraint.rho = 4.76e5;
      PredictiveSpec p;
      p.maneuver = Maneuver::Orth;
      p.horizon = 8.0e6;
      p.ode_dt = 3.0e4;
      p.refine_tol = 0.1;
      p.early_stop_drop = 5.0e4;
      e.spec = p;
      break;
    }
  }
  cfg.constraints.push_back(std::move(e));
  return cfg;
}

ScenarioConfig eros_proxops_preset() {
  ScenarioConfig cfg;
  cfg.name = "eros-proxops";
  cfg.t0 = 0.0;
  cfg.duration = 7200.0;
  cfg.dt = 0.5;
  Vec6 x0;
  x0 << -2.0e4, -4.0e3, 0.0, 1.0, 1.0, 0.0;
  cfg.x0 = SimState::unpack(x0);
  cfg.gravity = GravityModel::point_mass(kErosMu);
  cfg.control.u_max = 0.1;
  cfg.disturbance.w_u_max = 5.0e-3;
  cfg.disturbance.w_x_max = 1.0e-3;
  cfg.disturbance_mode = DisturbanceProcess::Mode::UniformBall;
  cfg.seed = 1;
  cfg.hysteresis = {100.0, 300.0};
  cfg.alpha = {AlphaChoice::Kind::Rate, cfg.hysteresis.eps1, 0.0};
  cfg.nominal.kind = NominalLaw::Kind::Prox;
  cfg.nominal.kp = 3.0e-5;
  cfg.nominal.kd = 0.03;
  cfg.nominal.r_target = Vec3(2.0e4, 0.0, 0.0);

  cfg.mesh.source = ScenarioConfig::MeshBank::Source::Generate;
  cfg.mesh.semi_axes = Vec3(8.0e3, 4.0e3, 4.0e3);
  cfg.mesh.count = 500;
  cfg.mesh.omega = Vec3(3.101e-4, 6.232e-5, 9.810e-5);
  cfg.mesh.rho = 500.0;
  cfg.mesh.spec = ConstantAuthoritySpec{};
  cfg.mesh.auto_a_max = true;
  return cfg;
}

std::vector<std::string> preset_names() {
  return {"ceres-flyby-1", "ceres-flyby-2", "ceres-flyby-3", "ceres-flyby-4", "eros-proxops"};
}

ScenarioConfig preset_by_name(const std::string& name) {
  for (int v = 1; v <= 4; ++v) {
    if (name == "ceres-flyby-" + std::to_string(v)) return ceres_flyby_preset(v);
  }
  if (name == "eros-proxops") return eros_proxops_preset();
  throw ConfigError("unknown preset \"" + name + "\"; see `rcbf_sim preset --list`");
}

}  // namespace rcbf
