#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace rcbf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// Spacecraft state. Time is passed alongside, not stored.
struct SimState {
  Vec3 r = Vec3::Zero();  // meters
  Vec3 v = Vec3::Zero();  // m/s

  Vec6 packed() const {
    Vec6 y;
    y << r, v;
    return y;
  }
  static SimState unpack(const Vec6& y) { return {y.head<3>(), y.tail<3>()}; }
};

// Per-axis thrust bound; the admissible set is the inf-norm box.
struct ControlBounds {
  double u_max = 0.0;  // m/s^2
};

struct DisturbanceBounds {
  double w_u_max = 0.0;  // m/s^2, matched channel
  double w_x_max = 0.0;  // m/s, velocity-channel error
};

struct HysteresisParams {
  double eps1 = 0.0;  // activation depth, H >= -eps1 turns a constraint on
  double eps2 = 0.0;  // release depth, H <= -eps2 turns it off; eps2 > eps1
};

// Class-K function used on the right-hand side of the barrier condition.
// Rate: alpha(lambda) = W * lambda / eps1, rebuilt from the margin each step.
// Linear: alpha(lambda) = k * lambda.
struct AlphaChoice {
  enum class Kind { Rate, Linear } kind = Kind::Rate;
  double eps1 = 0.0;  // used by Rate
  double k = 0.0;     // used by Linear
};

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PhiDomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateSlopeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoMaximizerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AmbiguousMaximizerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ManeuverSingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SafetyViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rcbf
