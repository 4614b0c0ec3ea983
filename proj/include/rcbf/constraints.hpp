#pragma once

#include "rcbf/dynamics.hpp"
#include "rcbf/types.hpp"

namespace rcbf {

// Keep-out center. Either a fixed inertial point or a point rigidly rotating
// about the origin with constant angular velocity (surface vertex of a
// spinning body).
struct CenterTrajectory {
  enum class Kind { Fixed, Rotating } kind = Kind::Fixed;
  Vec3 r0 = Vec3::Zero();     // position, at epoch t0 when rotating
  Vec3 omega = Vec3::Zero();  // rad/s, Rotating only
  double t0 = 0.0;

  static CenterTrajectory fixed(const Vec3& r) { return {Kind::Fixed, r, Vec3::Zero(), 0.0}; }
  static CenterTrajectory rotating(const Vec3& r0, const Vec3& omega, double t0 = 0.0) {
    return {Kind::Rotating, r0, omega, t0};
  }
};

struct CenterState {
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();  // u_c, acceleration of the center
};

CenterState center_state(const CenterTrajectory& c, double t);

// h = rho - |r - r_c(t)|, safe set is h <= 0 (outside the ball).
struct KeepOutConstraint {
  double rho = 0.0;  // meters
  CenterTrajectory center;
};

// Geometry and first-derivative data of one keep-out constraint at (t, x).
// hdot_w upper-bounds dh/dt along any disturbed flow: since |grad h| = 1 the
// velocity-channel error contributes exactly w_x_max.
struct ConstraintDerivatives {
  double dist = 0.0;  // |r - r_c|
  Vec3 n_hat;         // (r - r_c)/dist
  Vec3 nu;            // v - v_c
  Vec3 nu_perp;       // component of nu orthogonal to n_hat

  double h = 0.0;
  double dh_dt = 0.0;
  Vec3 dh_dr;  // dh/dv = 0

  double hdot_w = 0.0;
  double dhw_dt = 0.0;
  Vec3 dhw_dr;
  Vec3 dhw_dv;
};

ConstraintDerivatives constraint_derivatives(const KeepOutConstraint& c, double t,
                                             const SimState& x, double w_x_max);

double h(const KeepOutConstraint& c, double t, const SimState& x);
double hdot_w(const KeepOutConstraint& c, double t, const SimState& x, double w_x_max);

// Second robust derivative split as hddot_w = drift + control_row . (u + w_u).
struct HddotTerms {
  double drift = 0.0;
  Vec3 control_row;
};

HddotTerms hddot_w_terms(const KeepOutConstraint& c, double t, const SimState& x,
                         const GravityModel& g);

}  // namespace rcbf
