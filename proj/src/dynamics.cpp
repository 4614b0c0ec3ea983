#include "rcbf/dynamics.hpp"

#include <cmath>

namespace rcbf {

namespace {
constexpr double kSingularRadius = 1e-6;  // meters
}

Vec3 gravity_accel(const GravityModel& g, double /*t*/, const Vec3& r) {
  if (g.kind == GravityModel::Kind::Zero) return Vec3::Zero();
  const Vec3 d = r - g.center;
  const double dist = d.norm();
  if (dist < kSingularRadius) {
    throw SingularityError("gravity_accel: state within 1e-6 m of the field center");
  }
  return -g.mu / (dist * dist * dist) * d;
}

Mat3 gravity_gradient(const GravityModel& g, double /*t*/, const Vec3& r) {
  if (g.kind == GravityModel::Kind::Zero) return Mat3::Zero();
  const Vec3 d = r - g.center;
  const double dist = d.norm();
  if (dist < kSingularRadius) {
    throw SingularityError("gravity_gradient: state within 1e-6 m of the field center");
  }
  const double d3 = dist * dist * dist;
  const double d5 = d3 * dist * dist;
  return -g.mu * (Mat3::Identity() / d3 - 3.0 / d5 * (d * d.transpose()));
}

Vec6 state_derivative(double t, const SimState& x, const Vec3& u,
                      const Vec3& w_u, const Vec3& w_x, const GravityModel& g) {
  Vec6 dydt;
  dydt.head<3>() = x.v + w_x;
  dydt.tail<3>() = gravity_accel(g, t, x.r) + u + w_u;
  return dydt;
}

SimState rk4_step(double t, const SimState& x, double dt, const Vec3& u,
                  const Vec3& w_u, const Vec3& w_x, const GravityModel& g) {
  const Vec6 y0 = x.packed();
  const Vec6 k1 = state_derivative(t, x, u, w_u, w_x, g);
  const Vec6 k2 =
      state_derivative(t + 0.5 * dt, SimState::unpack(y0 + 0.5 * dt * k1), u, w_u, w_x, g);
  const Vec6 k3 =
      state_derivative(t + 0.5 * dt, SimState::unpack(y0 + 0.5 * dt * k2), u, w_u, w_x, g);
  const Vec6 k4 = state_derivative(t + dt, SimState::unpack(y0 + dt * k3), u, w_u, w_x, g);
  return SimState::unpack(y0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

Vec3 DisturbanceProcess::uniform_in_ball(double radius) {
  if (radius <= 0.0) return Vec3::Zero();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 dir;
  do {
    dir = Vec3(gauss(rng_), gauss(rng_), gauss(rng_));
  } while (dir.norm() < 1e-12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return radius * std::cbrt(unit(rng_)) * dir.normalized();
}

DisturbanceSample DisturbanceProcess::next(const Vec3& grad_H_v, const Vec3& grad_H_r) {
  DisturbanceSample s;
  switch (mode_) {
    case Mode::Zero:
      break;
    case Mode::UniformBall:
      s.w_u = uniform_in_ball(bounds_.w_u_max);
      s.w_x = uniform_in_ball(bounds_.w_x_max);
      break;
    case Mode::WorstCase:
    case Mode::BestCase: {
      const double sign = mode_ == Mode::WorstCase ? 1.0 : -1.0;
      if (grad_H_v.norm() > 0.0) s.w_u = sign * bounds_.w_u_max * grad_H_v.normalized();
      if (grad_H_r.norm() > 0.0) s.w_x = sign * bounds_.w_x_max * grad_H_r.normalized();
      break;
    }
  }
  return s;
}

}  // namespace rcbf
