#pragma once

#include <vector>

#include "rcbf/constraints.hpp"
#include "rcbf/dynamics.hpp"
#include "rcbf/rcbf.hpp"

namespace rcbf {

// One protected point: a keep-out ball plus the barrier built for it.
struct BankEntry {
  KeepOutConstraint constraint;
  RcbfSpec spec;
};

// Same rho and spec for every vertex of a rotating body mesh.
std::vector<BankEntry> make_rotating_bank(const std::vector<Vec3>& body_vertices,
                                          const Vec3& omega, double rho, const RcbfSpec& spec);

// Serial reference. Kept alongside the parallel kernel so the two can be
// checked against each other.
std::vector<RcbfEvaluation> evaluate_bank_serial(const std::vector<BankEntry>& entries,
                                                 double t, const SimState& x,
                                                 const GravityModel& g, const ControlBounds& u,
                                                 const DisturbanceBounds& b,
                                                 const AlphaChoice& alpha);

// OpenMP over bank slots. Exceptions from worker slots are captured and the
// lowest-index one is rethrown, matching serial behavior.
std::vector<RcbfEvaluation> evaluate_bank_parallel(const std::vector<BankEntry>& entries,
                                                   double t, const SimState& x,
                                                   const GravityModel& g, const ControlBounds& u,
                                                   const DisturbanceBounds& b,
                                                   const AlphaChoice& alpha);

// Dispatches to the parallel kernel above a size threshold where the fork
// overhead pays off.
std::vector<RcbfEvaluation> evaluate_bank(const std::vector<BankEntry>& entries, double t,
                                          const SimState& x, const GravityModel& g,
                                          const ControlBounds& u, const DisturbanceBounds& b,
                                          const AlphaChoice& alpha, bool allow_parallel = true);

}  // namespace rcbf
