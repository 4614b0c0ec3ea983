#include "rcbf/rcbf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rcbf/switching.hpp"

namespace rcbf {

namespace {

double alpha_value(const AlphaChoice& alpha, double lambda, double W) {
  switch (alpha.kind) {
    case AlphaChoice::Kind::Rate:
      return alpha_r(lambda, W, alpha.eps1);
    case AlphaChoice::Kind::Linear:
      return alpha.k * lambda;
  }
  return 0.0;
}

// Shared tail of every construction: margin, enforcement row and bound.
void finish_eval(RcbfEvaluation& e, const AlphaChoice& alpha, double t, const SimState& x,
                 const GravityModel& g, const DisturbanceBounds& b) {
  e.W = disturbance_margin_W(e.grad_H, b);
  e.row = e.grad_H.tail<3>();
  Vec6 f;
  f << x.v, gravity_accel(g, t, x.r);
  e.bound = alpha_value(alpha, -e.H, e.W) - e.W - e.dH_dt - e.grad_H.dot(f);
}

}  // namespace

double disturbance_margin_W(const Vec6& grad_H, const DisturbanceBounds& b) {
  return grad_H.tail<3>().norm() * b.w_u_max + grad_H.norm() * b.w_x_max;
}

bool in_restricted_safe_set(const RcbfEvaluation& e) { return e.H <= 0.0 && e.h <= 0.0; }

// ---------------------------------------------------------------------------
// Constant authority
// ---------------------------------------------------------------------------

RcbfEvaluation eval_constant_authority(const KeepOutConstraint& c,
                                       const ConstantAuthoritySpec& spec, double t,
                                       const SimState& x, const GravityModel& g,
                                       const DisturbanceBounds& b, const AlphaChoice& alpha) {
  if (spec.a_max <= 0.0)
    throw PreconditionError("eval_constant_authority: a_max must be positive");
  const ConstraintDerivatives d = constraint_derivatives(c, t, x, b.w_x_max);
  const double s = d.hdot_w;
  const double scale = std::abs(s) / spec.a_max;  // d/ds of |s|s/(2a)

  RcbfEvaluation e;
  e.h = d.h;
  e.H = d.h + std::abs(s) * s / (2.0 * spec.a_max);
  e.dH_dt = d.dh_dt + scale * d.dhw_dt;
  e.grad_H.head<3>() = d.dh_dr + scale * d.dhw_dr;
  e.grad_H.tail<3>() = scale * d.dhw_dv;  // dh/dv = 0
  finish_eval(e, alpha, t, x, g, b);
  return e;
}

std::optional<double> compute_a_max0(const KeepOutConstraint& c, const GravityModel& g,
                                     const ControlBounds& u, const DisturbanceBounds& b,
                                     const std::vector<std::pair<double, Vec3>>& samples) {
  if (samples.empty()) throw ConfigError("compute_a_max0: empty sample set");
  double worst = 0.0;
  for (const auto& [t, r] : samples) {
    const Vec3 f = gravity_accel(g, t, r);
    const Vec3 uc = center_state(c.center, t).a;
    worst = std::max(worst, (f - uc).norm());
  }
  const double a = u.u_max - b.w_u_max - worst;
  if (a <= 0.0) return std::nullopt;
  return a;
}

// ---------------------------------------------------------------------------
// Variable authority
// ---------------------------------------------------------------------------

VariableAuthoritySpec gravity_phi(double mu, double rho, double u_max, double w_u_max) {
  if (mu <= 0.0 || rho <= 0.0) throw ConfigError("gravity_phi: mu and rho must be positive");
  const double c2 = w_u_max - u_max;
  if (mu / (rho * rho) + c2 > 0.0) {
    throw PreconditionError(
        "gravity_phi: thrust cannot dominate gravity at the boundary "
        "(mu/rho^2 - u_max + w_u_max > 0)");
  }
  // Phi is monotone decreasing for lambda <= lambda_crit; the safe set lives
  // on that branch because phi(0) <= 0.
  const double lambda_crit = rho - std::sqrt(mu / (-c2));

  VariableAuthoritySpec spec;
  spec.family = VariableAuthoritySpec::Family::Gravity;
  spec.mu = mu;
  spec.rho = rho;
  spec.u_max = u_max;
  spec.w_u_max = w_u_max;
  spec.Phi = [mu, rho, c2](double l) {
    if (rho - l <= 0.0) throw PhiDomainError("gravity Phi: lambda >= rho");
    return mu / (rho - l) + c2 * l;
  };
  spec.phi = [mu, rho, c2](double l) {
    if (rho - l <= 0.0) throw PhiDomainError("gravity phi: lambda >= rho");
    const double s = rho - l;
    return mu / (s * s) + c2;
  };
  spec.Phi_inv = [mu, rho, c2, lambda_crit, Phi = spec.Phi](double y) {
    // c2 l^2 - (c2 rho + y) l + (y rho - mu) = 0 on the branch l <= lambda_crit.
    const double B = -(c2 * rho + y);
    const double C = y * rho - mu;
    const double disc = B * B - 4.0 * c2 * C;
    if (disc < 0.0) throw PhiDomainError("gravity Phi_inv: argument below the branch range");
    const double sq = std::sqrt(disc);
    const double qs = -0.5 * (B + (B >= 0.0 ? sq : -sq));
    const double l1 = qs / c2;
    const double l2 = (qs != 0.0) ? C / qs : l1;
    const double tol = 1e-9 * (1.0 + std::abs(lambda_crit));
    const bool ok1 = l1 <= lambda_crit + tol;
    const bool ok2 = l2 <= lambda_crit + tol;
    double l;
    if (ok1 && ok2)
      l = std::min(l1, l2);
    else if (ok1)
      l = l1;
    else if (ok2)
      l = l2;
    else
      throw PhiDomainError("gravity Phi_inv: no root on the monotone branch");
    // Closed form is exact in theory; fall back to bisection when the
    // discriminant cancels badly.
    if (std::abs(Phi(l) - y) > 1e-9 * std::max(1.0, std::abs(y))) {
      double hi = lambda_crit;
      double step = std::max(1.0, std::abs(lambda_crit));
      double lo = hi - step;
      while (Phi(lo) < y) {
        step *= 2.0;
        lo = hi - step;
        if (!std::isfinite(lo)) throw PhiDomainError("gravity Phi_inv: bisection bracket failed");
      }
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (Phi(mid) >= y ? lo : hi) = mid;
      }
      l = 0.5 * (lo + hi);
    }
    return l;
  };
  return spec;
}

VariableAuthoritySpec linear_phi(double a_max) {
  if (a_max <= 0.0) throw ConfigError("linear_phi: a_max must be positive");
  VariableAuthoritySpec spec;
  spec.family = VariableAuthoritySpec::Family::Linear;
  spec.a_max = a_max;
  spec.Phi = [a_max](double l) { return -a_max * l; };
  spec.phi = [a_max](double) { return -a_max; };
  spec.Phi_inv = [a_max](double y) { return -y / a_max; };
  return spec;
}

RcbfEvaluation eval_variable_authority(const KeepOutConstraint& c,
                                       const VariableAuthoritySpec& spec, double t,
                                       const SimState& x, const GravityModel& g,
                                       const DisturbanceBounds& b, const AlphaChoice& alpha) {
  if (!spec.phi || !spec.Phi || !spec.Phi_inv)
    throw ConfigError("eval_variable_authority: phi/Phi/Phi_inv must all be set");
  const ConstraintDerivatives d = constraint_derivatives(c, t, x, b.w_x_max);
  const double s = d.hdot_w;
  const double arg = spec.Phi(d.h) - 0.5 * s * std::abs(s);

  RcbfEvaluation e;
  e.h = d.h;
  e.H = spec.Phi_inv(arg);
  if (std::abs(spec.Phi(e.H) - arg) > 1e-6 * std::max(1.0, std::abs(arg))) {
    throw PhiDomainError("eval_variable_authority: Phi_inv round trip failed");
  }
  const double phi_h = spec.phi(d.h);
  const double phi_H = spec.phi(e.H);
  if (!std::isfinite(phi_H) || phi_H == 0.0 || std::abs(phi_H) < 1e-12 * std::abs(phi_h)) {
    throw DegenerateSlopeError("eval_variable_authority: phi vanishes at H");
  }
  e.dH_dt = (phi_h * d.dh_dt - std::abs(s) * d.dhw_dt) / phi_H;
  e.grad_H.head<3>() = (phi_h * d.dh_dr - std::abs(s) * d.dhw_dr) / phi_H;
  e.grad_H.tail<3>() = (-std::abs(s) * d.dhw_dv) / phi_H;
  finish_eval(e, alpha, t, x, g, b);
  return e;
}

// ---------------------------------------------------------------------------
// Evasion maneuvers
// ---------------------------------------------------------------------------

namespace {

struct UStarJac {
  Vec3 u;
  Mat3 du_dr = Mat3::Zero();
  Mat3 du_dv = Mat3::Zero();
  Vec3 du_dt = Vec3::Zero();
};

// Maximizes coeff . u over the per-axis shrunk box, smoothing the sign so the
// flow stays differentiable. need_jac skips the Jacobian assembly.
UStarJac u_star_core(Maneuver m, double t, const SimState& x, const KeepOutConstraint& c,
                     const ControlBounds& ub, const DisturbanceBounds& db, double sign_width,
                     bool need_jac) {
  const double ubar = ub.u_max - db.w_u_max;
  if (ubar <= 0.0)
    throw PreconditionError("u_star: no control authority once shrunk by w_u_max");

  const CenterState cs = center_state(c.center, t);
  const Vec3 d = x.r - cs.r;
  const double dist = d.norm();
  if (dist < 1e-6) throw SingularityError("u_star: state within 1e-6 m of the keep-out center");

  Vec3 coeff;
  Mat3 dc_dr = Mat3::Zero(), dc_dv = Mat3::Zero();
  Vec3 dc_dt = Vec3::Zero();
  switch (m) {
    case Maneuver::Opt:
    case Maneuver::Rad: {
      // The control coefficient of hddot_w is -n_hat, so the minimizer pushes
      // straight away from the center.
      coeff = d;
      dc_dr = Mat3::Identity();
      dc_dt = -cs.v;
      break;
    }
    case Maneuver::Orth: {
      const Vec3 nu = x.v - cs.v;
      const double d2 = dist * dist;
      const double q = d.dot(nu) / d2;
      coeff = nu - q * d;
      if (coeff.norm() < 1e-9)
        throw ManeuverSingularityError("u_star: tangential velocity below 1e-9 m/s");
      if (need_jac) {
        dc_dr = -(d * nu.transpose() + d.dot(nu) * Mat3::Identity()) / d2 +
                2.0 * d.dot(nu) / (d2 * d2) * (d * d.transpose());
        dc_dv = Mat3::Identity() - d * d.transpose() / d2;
        const Vec3 ddot = -cs.v;
        const Vec3 nudot = -cs.a;
        dc_dt = nudot - ((ddot.dot(nu) + d.dot(nudot)) / d2) * d - q * ddot +
                2.0 * d.dot(nu) * d.dot(ddot) / (d2 * d2) * d;
      }
      break;
    }
  }

  const double cn = coeff.norm();
  UStarJac out;
  const Vec3 z = coeff / (sign_width * cn);
  Vec3 th;
  for (int i = 0; i < 3; ++i) th(i) = std::tanh(z(i));
  out.u = ubar * th;
  if (!need_jac) return out;

  // z is scale invariant in coeff, so dz/dc is the projector away from coeff.
  const Mat3 dz_dc =
      (Mat3::Identity() - coeff * coeff.transpose() / (cn * cn)) / (sign_width * cn);
  Mat3 S = Mat3::Zero();
  for (int i = 0; i < 3; ++i) S(i, i) = ubar * (1.0 - th(i) * th(i));
  const Mat3 du_dc = S * dz_dc;
  out.du_dr = du_dc * dc_dr;
  out.du_dv = du_dc * dc_dv;
  out.du_dt = du_dc * dc_dt;
  return out;
}

}  // namespace

Vec3 u_star(Maneuver m, double t, const SimState& x, const KeepOutConstraint& c,
            const ControlBounds& u, const DisturbanceBounds& b, double sign_width) {
  return u_star_core(m, t, x, c, u, b, sign_width, false).u;
}

// ---------------------------------------------------------------------------
// Predictive propagation
// ---------------------------------------------------------------------------

namespace {

constexpr double kStepFrac = 0.1;  // fraction of the local orbital timescale sqrt(d^3/mu)

using Vec48 = Eigen::Matrix<double, 48, 1>;  // y(6), theta(6), Theta(36)

double local_step(const GravityModel& g, const Vec3& r, double ode_dt) {
  if (g.kind != GravityModel::Kind::PointMass) return ode_dt;
  const double dist = (r - g.center).norm();
  const double tau = std::sqrt(dist * dist * dist / g.mu);
  return std::max(std::min(ode_dt, kStepFrac * tau), 1e-9 * ode_dt);
}

struct ChiContext {
  double t0;
  Maneuver maneuver;
  const KeepOutConstraint& c;
  const GravityModel& g;
  const ControlBounds& ub;
  const DisturbanceBounds& db;
  double sign_width;
};

Vec48 chi_derivative(const ChiContext& ctx, double beta, const Vec48& Z) {
  const double t = ctx.t0 + beta;
  const SimState x{Z.head<3>(), Z.segment<3>(3)};
  const UStarJac uj =
      u_star_core(ctx.maneuver, t, x, ctx.c, ctx.ub, ctx.db, ctx.sign_width, true);
  const Vec3 f = gravity_accel(ctx.g, t, x.r);
  const Mat3 G = gravity_gradient(ctx.g, t, x.r);

  Mat6 A = Mat6::Zero();
  A.topRightCorner<3, 3>() = Mat3::Identity();
  A.bottomLeftCorner<3, 3>() = G + uj.du_dr;
  A.bottomRightCorner<3, 3>() = uj.du_dv;

  Vec48 dZ;
  dZ.head<3>() = x.v;
  dZ.segment<3>(3) = f + uj.u;
  const Vec6 theta = Z.segment<6>(6);
  Vec6 dtheta = A * theta;
  dtheta.tail<3>() += uj.du_dt;  // explicit t0 dependence enters the control only
  dZ.segment<6>(6) = dtheta;
  const Eigen::Map<const Mat6> Theta(Z.data() + 12);
  Eigen::Map<Mat6> dTheta(dZ.data() + 12);
  dTheta = A * Theta;
  return dZ;
}

Vec48 rk4_chi(const ChiContext& ctx, double beta, const Vec48& Z, double dbeta) {
  const Vec48 k1 = chi_derivative(ctx, beta, Z);
  const Vec48 k2 = chi_derivative(ctx, beta + 0.5 * dbeta, Z + 0.5 * dbeta * k1);
  const Vec48 k3 = chi_derivative(ctx, beta + 0.5 * dbeta, Z + 0.5 * dbeta * k2);
  const Vec48 k4 = chi_derivative(ctx, beta + dbeta, Z + dbeta * k3);
  return Z + dbeta / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// State-only derivative for refinement probes, where sensitivities are not
// needed.
Vec6 chi_derivative_y(const ChiContext& ctx, double beta, const Vec6& y) {
  const double t = ctx.t0 + beta;
  const SimState x{y.head<3>(), y.tail<3>()};
  Vec6 dy;
  dy.head<3>() = x.v;
  dy.tail<3>() = gravity_accel(ctx.g, t, x.r) +
                 u_star_core(ctx.maneuver, t, x, ctx.c, ctx.ub, ctx.db, ctx.sign_width, false).u;
  return dy;
}

Vec6 rk4_chi_y(const ChiContext& ctx, double beta, const Vec6& y, double dbeta) {
  const Vec6 k1 = chi_derivative_y(ctx, beta, y);
  const Vec6 k2 = chi_derivative_y(ctx, beta + 0.5 * dbeta, y + 0.5 * dbeta * k1);
  const Vec6 k3 = chi_derivative_y(ctx, beta + 0.5 * dbeta, y + 0.5 * dbeta * k2);
  const Vec6 k4 = chi_derivative_y(ctx, beta + dbeta, y + dbeta * k3);
  return y + dbeta / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

ChiContext make_context(const PropagationResult& pr) {
  return {pr.t0, pr.maneuver, pr.constraint, pr.gravity, pr.control, pr.bounds, pr.sign_width};
}

// h at a probe point, integrating the state from the nearest stored sample at
// or before beta.
double probe_h(const PropagationResult& pr, const ChiContext& ctx, int left, double beta) {
  double b = pr.betas[left];
  Vec6 y = pr.y[left];
  const double span = beta - b;
  if (span > 0.0) {
    const double cap = 0.5 * local_step(pr.gravity, y.head<3>(), pr.ode_dt);
    const int nsub = std::max(1, static_cast<int>(std::ceil(span / std::max(cap, 1e-12))));
    const double dbeta = span / nsub;
    for (int i = 0; i < nsub; ++i) {
      y = rk4_chi_y(ctx, b, y, dbeta);
      b += dbeta;
    }
  }
  return h(pr.constraint, pr.t0 + beta, SimState::unpack(y));
}

struct RefinedMax {
  double beta_c = 0.0;
  double H = 0.0;
  Vec6 y = Vec6::Zero();
  Vec6 theta = Vec6::Zero();
  Mat6 Theta = Mat6::Identity();
};

RefinedMax refine_maximizer(const PropagationResult& pr, double refine_tol,
                            double ambiguity_tol) {
  const int n = static_cast<int>(pr.betas.size());
  if (n < 1) throw ConfigError("find_maximizer: empty propagation");
  int k = 0;
  for (int i = 1; i < n; ++i) {
    if (pr.h_samples[i] > pr.h_samples[k]) k = i;
  }
  if (k == n - 1 && n >= 2 && pr.h_samples[n - 1] > pr.h_samples[n - 2]) {
    throw NoMaximizerError("find_maximizer: h still increasing at the horizon");
  }
  if (k == 0) {
    // beta = 0 can only be a maximizer when h starts out nonincreasing. A
    // rising slope means the peak hides inside the first sample interval, so
    // fall through and refine there instead.
    const SimState x0 = SimState::unpack(pr.y[0]);
    const ConstraintDerivatives d0 = constraint_derivatives(pr.constraint, pr.t0, x0, 0.0);
    const double s0 = d0.dh_dt + d0.dh_dr.dot(x0.v);
    if (s0 <= 0.0 || n < 2) {
      RefinedMax r;
      r.H = pr.h_samples[0];
      r.y = pr.y[0];
      r.theta = pr.theta[0];
      r.Theta = pr.Theta[0];
      return r;
    }
  }

  const ChiContext ctx = make_context(pr);
  // Golden-section maximization on the bracketing interval; every probe
  // re-integrates from the stored left sample.
  double a = pr.betas[std::max(k - 1, 0)];
  double b = pr.betas[std::min(k + 1, n - 1)];
  const int left = std::max(k - 1, 0);
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = probe_h(pr, ctx, left, x1);
  double f2 = probe_h(pr, ctx, left, x2);
  double best_beta = pr.betas[k];
  double best_h = pr.h_samples[k];
  const auto consider = [&](double beta, double val) {
    if (val > best_h) {
      best_h = val;
      best_beta = beta;
    }
  };
  consider(x1, f1);
  consider(x2, f2);
  while (b - a > refine_tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = probe_h(pr, ctx, left, x2);
      consider(x2, f2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = probe_h(pr, ctx, left, x1);
      consider(x1, f1);
    }
  }

  // Re-integrate the full sensitivity state to the refined maximizer.
  RefinedMax r;
  r.beta_c = best_beta;
  double beta0 = pr.betas[left];
  Vec48 Z;
  Z.head<6>() = pr.y[left];
  Z.segment<6>(6) = pr.theta[left];
  Eigen::Map<Mat6>(Z.data() + 12) = pr.Theta[left];
  const double span = best_beta - beta0;
  if (span > 0.0) {
    const double cap = 0.25 * local_step(pr.gravity, Z.head<3>(), pr.ode_dt);
    const int nsub = std::max(4, static_cast<int>(std::ceil(span / std::max(cap, 1e-12))));
    const double dbeta = span / nsub;
    for (int i = 0; i < nsub; ++i) {
      Z = rk4_chi(ctx, beta0, Z, dbeta);
      beta0 += dbeta;
    }
  }
  r.y = Z.head<6>();
  r.theta = Z.segment<6>(6);
  r.Theta = Eigen::Map<Mat6>(Z.data() + 12);
  r.H = h(pr.constraint, pr.t0 + best_beta, SimState::unpack(r.y));

  // Distinct nonzero sample-level peaks tying the refined maximum mean the
  // gradient is not well defined.
  for (int i = 1; i + 1 < n; ++i) {
    if (std::abs(i - k) < 2) continue;
    if (pr.h_samples[i] >= pr.h_samples[i - 1] && pr.h_samples[i] >= pr.h_samples[i + 1] &&
        pr.h_samples[i] >= r.H - ambiguity_tol) {
      throw AmbiguousMaximizerError("find_maximizer: two peaks within ambiguity tolerance");
    }
  }
  return r;
}

}  // namespace

PropagationResult propagate_chi(double t0, const SimState& x0, Maneuver m,
                                const KeepOutConstraint& c, const GravityModel& g,
                                const ControlBounds& u, const DisturbanceBounds& b,
                                double horizon, double ode_dt, double early_stop_drop,
                                double sign_width) {
  if (horizon <= 0.0) throw ConfigError("propagate_chi: horizon must be positive");
  if (ode_dt <= 0.0) throw ConfigError("propagate_chi: ode_dt must be positive");
  if (sign_width <= 0.0) throw ConfigError("propagate_chi: sign_width must be positive");

  PropagationResult pr;
  pr.t0 = t0;
  pr.maneuver = m;
  pr.constraint = c;
  pr.gravity = g;
  pr.control = u;
  pr.bounds = b;
  pr.ode_dt = ode_dt;
  pr.sign_width = sign_width;

  const ChiContext ctx{t0, m, c, g, u, b, sign_width};
  Vec48 Z;
  Z.head<6>() = x0.packed();
  Z.segment<6>(6).setZero();
  Eigen::Map<Mat6>(Z.data() + 12) = Mat6::Identity();

  const auto push = [&](double beta) {
    pr.betas.push_back(beta);
    pr.y.push_back(Z.head<6>());
    pr.theta.push_back(Z.segment<6>(6));
    pr.Theta.push_back(Eigen::Map<Mat6>(Z.data() + 12));
    pr.h_samples.push_back(h(c, t0 + beta, SimState::unpack(Z.head<6>())));
  };
  push(0.0);

  double beta = 0.0;
  double best = pr.h_samples[0];
  bool early_stopped = false;
  while (beta < horizon) {
    double dbeta = std::min(local_step(g, Z.head<3>(), ode_dt), horizon - beta);
    Z = rk4_chi(ctx, beta, Z, dbeta);
    beta += dbeta;
    push(beta);
    const double hk = pr.h_samples.back();
    best = std::max(best, hk);
    if (early_stop_drop > 0.0 && pr.betas.size() >= 8 && hk <= best - early_stop_drop) {
      early_stopped = true;
      break;
    }
  }
  if (!early_stopped) {
    const int n = static_cast<int>(pr.h_samples.size());
    int k = 0;
    for (int i = 1; i < n; ++i) {
      if (pr.h_samples[i] > pr.h_samples[k]) k = i;
    }
    if (k == n - 1 && n >= 2 && pr.h_samples[n - 1] > pr.h_samples[n - 2]) {
      throw NoMaximizerError("propagate_chi: h still increasing when the horizon was reached");
    }
  }
  return pr;
}

double find_maximizer(const PropagationResult& pr, double refine_tol, double ambiguity_tol) {
  return refine_maximizer(pr, refine_tol, ambiguity_tol).beta_c;
}

RcbfEvaluation eval_predictive(const KeepOutConstraint& c, const PredictiveSpec& spec,
                               double t, const SimState& x, const GravityModel& g,
                               const ControlBounds& u, const DisturbanceBounds& b,
                               const AlphaChoice& alpha) {
  if (b.w_x_max != 0.0) {
    throw PreconditionError(
        "eval_predictive: construction requires an exact position channel (w_x_max = 0)");
  }
  const PropagationResult pr =
      propagate_chi(t, x, spec.maneuver, c, g, u, b, spec.horizon, spec.ode_dt,
                    spec.early_stop_drop, spec.sign_width);
  const RefinedMax r = refine_maximizer(pr, spec.refine_tol, spec.ambiguity_tol);

  RcbfEvaluation e;
  e.h = pr.h_samples[0];
  e.H = r.H;
  if (r.beta_c == 0.0) {
    const ConstraintDerivatives d0 = constraint_derivatives(c, t, x, 0.0);
    e.grad_H.head<3>() = d0.dh_dr;
    e.dH_dt = d0.dh_dt;
    e.control_independent = true;  // velocity block of grad h is zero
  } else {
    const ConstraintDerivatives d1 =
        constraint_derivatives(c, t + r.beta_c, SimState::unpack(r.y), 0.0);
    Vec6 grad_h1 = Vec6::Zero();
    grad_h1.head<3>() = d1.dh_dr;
    e.grad_H = r.Theta.transpose() * grad_h1;
    e.dH_dt = d1.dh_dt + grad_h1.dot(r.theta);
  }
  finish_eval(e, alpha, t, x, g, b);
  return e;
}

RcbfEvaluation evaluate_rcbf(const KeepOutConstraint& c, const RcbfSpec& spec, double t,
                             const SimState& x, const GravityModel& g, const ControlBounds& u,
                             const DisturbanceBounds& b, const AlphaChoice& alpha) {
  return std::visit(
      [&](const auto& s) -> RcbfEvaluation {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantAuthoritySpec>) {
          return eval_constant_authority(c, s, t, x, g, b, alpha);
        } else if constexpr (std::is_same_v<T, VariableAuthoritySpec>) {
          return eval_variable_authority(c, s, t, x, g, b, alpha);
        } else {
          return eval_predictive(c, s, t, x, g, u, b, alpha);
        }
      },
      spec);
}

}  // namespace rcbf
