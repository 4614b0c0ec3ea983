#include "rcbf/switching.hpp"

namespace rcbf {

int update_sigma(int sigma, double H, const HysteresisParams& p) {
  if (H <= -p.eps2) return 0;
  if (H >= -p.eps1) return 1;
  return sigma;
}

double alpha_r(double lambda, double W, double eps1) {
  if (eps1 <= 0.0) throw ConfigError("alpha_r: eps1 must be positive");
  return W * lambda / eps1;
}

std::vector<Halfspace> active_halfspaces(const std::vector<RcbfEvaluation>& evals,
                                         const std::vector<int>& sigma) {
  std::vector<Halfspace> out;
  for (std::size_t i = 0; i < evals.size(); ++i) {
    if (sigma[i] != 1) continue;
    out.push_back({evals[i].row, evals[i].bound, static_cast<int>(i)});
  }
  return out;
}

void HysteresisBank::update(const std::vector<RcbfEvaluation>& evals,
                            const HysteresisParams& p) {
  for (std::size_t i = 0; i < evals.size(); ++i) {
    const int next = update_sigma(sigma_[i], evals[i].H, p);
    if (next != sigma_[i]) {
      if (next == 1)
        ++switches_on_;
      else
        ++switches_off_;
      sigma_[i] = next;
    }
  }
}

int HysteresisBank::active_count() const {
  int n = 0;
  for (int s : sigma_) n += s;
  return n;
}

}  // namespace rcbf
