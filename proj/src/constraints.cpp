#include "rcbf/constraints.hpp"

#include <cmath>

namespace rcbf {

namespace {
constexpr double kSingularRadius = 1e-6;  // meters

Mat3 rodrigues(const Vec3& axis_times_angle) {
  const double angle = axis_times_angle.norm();
  if (angle < 1e-300) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, axis_times_angle / angle).toRotationMatrix();
}
}  // namespace

CenterState center_state(const CenterTrajectory& c, double t) {
  CenterState s;
  if (c.kind == CenterTrajectory::Kind::Fixed) {
    s.r = c.r0;
    return s;
  }
  s.r = rodrigues(c.omega * (t - c.t0)) * c.r0;
  s.v = c.omega.cross(s.r);
  s.a = c.omega.cross(s.v);
  return s;
}

ConstraintDerivatives constraint_derivatives(const KeepOutConstraint& c, double t,
                                             const SimState& x, double w_x_max) {
  const CenterState cs = center_state(c.center, t);
  ConstraintDerivatives d;
  const Vec3 dvec = x.r - cs.r;
  d.dist = dvec.norm();
  if (d.dist < kSingularRadius) {
    throw SingularityError("constraint_derivatives: state within 1e-6 m of a keep-out center");
  }
  d.n_hat = dvec / d.dist;
  d.nu = x.v - cs.v;
  d.nu_perp = d.nu - d.n_hat.dot(d.nu) * d.n_hat;

  d.h = c.rho - d.dist;
  d.dh_dt = d.n_hat.dot(cs.v);
  d.dh_dr = -d.n_hat;

  d.hdot_w = -d.n_hat.dot(d.nu) + w_x_max;
  d.dhw_dt = (cs.v.dot(d.nu) + dvec.dot(cs.a)) / d.dist -
             dvec.dot(d.nu) * d.n_hat.dot(cs.v) / (d.dist * d.dist);
  d.dhw_dr = -d.nu_perp / d.dist;
  d.dhw_dv = -d.n_hat;
  return d;
}

double h(const KeepOutConstraint& c, double t, const SimState& x) {
  const CenterState cs = center_state(c.center, t);
  return c.rho - (x.r - cs.r).norm();
}

double hdot_w(const KeepOutConstraint& c, double t, const SimState& x, double w_x_max) {
  return constraint_derivatives(c, t, x, w_x_max).hdot_w;
}

HddotTerms hddot_w_terms(const KeepOutConstraint& c, double t, const SimState& x,
                         const GravityModel& g) {
  const ConstraintDerivatives d = constraint_derivatives(c, t, x, 0.0);
  const CenterState cs = center_state(c.center, t);
  const Vec3 f_mu = gravity_accel(g, t, x.r);
  HddotTerms out;
  // Radial deceleration minus the centripetal relief; w_x_max enters hdot_w
  // as a constant and so drops out of the derivative.
  out.drift = -d.n_hat.dot(f_mu - cs.a) - d.nu_perp.squaredNorm() / d.dist;
  out.control_row = -d.n_hat;
  return out;
}

}  // namespace rcbf
