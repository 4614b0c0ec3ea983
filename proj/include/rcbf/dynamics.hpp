#pragma once

#include <random>

#include "rcbf/types.hpp"

namespace rcbf {

// Central point-mass field or no gravity at all. The center is fixed in the
// inertial frame; moving primaries are out of scope.
struct GravityModel {
  enum class Kind { Zero, PointMass } kind = Kind::Zero;
  double mu = 0.0;  // m^3/s^2
  Vec3 center = Vec3::Zero();

  static GravityModel zero() { return {}; }
  static GravityModel point_mass(double mu, const Vec3& center = Vec3::Zero()) {
    return {Kind::PointMass, mu, center};
  }
};

// Acceleration of the field at r. Throws SingularityError within 1e-6 m of
// the center.
Vec3 gravity_accel(const GravityModel& g, double t, const Vec3& r);

// Jacobian d(accel)/dr, needed by the sensitivity propagation.
Mat3 gravity_gradient(const GravityModel& g, double t, const Vec3& r);

// rdot = v + w_x, vdot = f_mu + u + w_u.
Vec6 state_derivative(double t, const SimState& x, const Vec3& u,
                      const Vec3& w_u, const Vec3& w_x, const GravityModel& g);

// Classic RK4 with zero-order hold: u and the disturbance realization are
// frozen over the step, gravity is re-evaluated at each stage.
SimState rk4_step(double t, const SimState& x, double dt, const Vec3& u,
                  const Vec3& w_u, const Vec3& w_x, const GravityModel& g);

struct DisturbanceSample {
  Vec3 w_u = Vec3::Zero();
  Vec3 w_x = Vec3::Zero();
};

// Per-step disturbance realization, held constant over the step.
//   Zero        no disturbance
//   UniformBall independent draws, uniform in the ball of each bound
//   WorstCase   aligned with the barrier gradient (worst for safety)
//   BestCase    anti-aligned (maximally helpful)
// WorstCase/BestCase need the gradient of the currently binding barrier; the
// caller passes the matched-channel row and the full state gradient.
class DisturbanceProcess {
 public:
  enum class Mode { Zero, UniformBall, WorstCase, BestCase };

  DisturbanceProcess() = default;
  DisturbanceProcess(Mode mode, DisturbanceBounds bounds, uint64_t seed)
      : mode_(mode), bounds_(bounds), rng_(seed) {}

  DisturbanceSample next(const Vec3& grad_H_v, const Vec3& grad_H_r);

  Mode mode() const { return mode_; }
  const DisturbanceBounds& bounds() const { return bounds_; }

 private:
  Vec3 uniform_in_ball(double radius);

  Mode mode_ = Mode::Zero;
  DisturbanceBounds bounds_;
  std::mt19937_64 rng_{0};
};

}  // namespace rcbf
