#pragma once

#include <vector>

#include "rcbf/types.hpp"

namespace rcbf {

// min 1/2 |u - u_nom|^2  s.t.  |u|_inf <= u_max,  rows[i] . u <= bounds[i].
struct QpProblem {
  Vec3 u_nom = Vec3::Zero();
  double u_max = 0.0;
  std::vector<Vec3> rows;
  std::vector<double> bounds;
};

enum class QpStatus { Optimal, Infeasible };

struct QpSolution {
  Vec3 u = Vec3::Zero();
  QpStatus status = QpStatus::Optimal;
  double kkt_residual = 0.0;
  int active_count = 0;  // constraints tight at the solution
};

// Exact active-set enumeration over subsets of at most three constraints
// (half-spaces and box faces). Rows are normalized before solving; the first
// candidate satisfying stationarity, primal feasibility and nonnegative
// multipliers is the global optimum of the convex program.
QpSolution solve_qp(const QpProblem& p);

// Fallback for infeasible steps: minimize the worst half-space violation over
// the box via bisection on a uniform relaxation of all bounds.
struct FallbackSolution {
  Vec3 u = Vec3::Zero();
  double violation = 0.0;  // achieved max violation, meters/s^2 units of rows
};

FallbackSolution solve_min_violation(const QpProblem& p);

// Nominal pointing laws filtered by the QP. Both return the raw (unsaturated)
// command; the box constraint does the clipping.
// Flyby: track a sunward escape velocity while killing cross-track offset.
Vec3 nominal_flyby(const Vec3& r, const Vec3& v, double kp, double kd, double mu);
// Proximity: PD toward a fixed station-keeping point.
Vec3 nominal_prox(const Vec3& r, const Vec3& v, const Vec3& r_t, double kp, double kd);

}  // namespace rcbf
