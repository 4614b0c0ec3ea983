#pragma once

#include <cstdint>
#include <vector>

#include "rcbf/rcbf.hpp"

namespace rcbf {

// Hysteresis state machine per constraint:
//   H <= -eps2 -> 0, H >= -eps1 -> 1, otherwise hold. First case wins ties.
int update_sigma(int sigma, double H, const HysteresisParams& p);

// Rate-limited class-K envelope alpha_r(lambda) = W lambda / eps1. Keeps the
// recovery rate commensurate with the disturbance margin so the steady band
// sits near -eps1 under zero disturbance.
double alpha_r(double lambda, double W, double eps1);

struct Halfspace {
  Vec3 row;
  double bound = 0.0;
  int index = -1;  // constraint index, for diagnostics
};

// Enforcement rows of the active (sigma = 1) constraints, in index order.
std::vector<Halfspace> active_halfspaces(const std::vector<RcbfEvaluation>& evals,
                                         const std::vector<int>& sigma);

class HysteresisBank {
 public:
  explicit HysteresisBank(std::size_t n) : sigma_(n, 0) {}

  void update(const std::vector<RcbfEvaluation>& evals, const HysteresisParams& p);

  const std::vector<int>& sigma() const { return sigma_; }
  int active_count() const;
  uint64_t switches_on() const { return switches_on_; }
  uint64_t switches_off() const { return switches_off_; }

 private:
  std::vector<int> sigma_;
  uint64_t switches_on_ = 0;
  uint64_t switches_off_ = 0;
};

}  // namespace rcbf
