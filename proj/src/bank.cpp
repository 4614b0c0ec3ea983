#include "rcbf/bank.hpp"

#include <exception>

namespace rcbf {

std::vector<BankEntry> make_rotating_bank(const std::vector<Vec3>& body_vertices,
                                          const Vec3& omega, double rho, const RcbfSpec& spec) {
  std::vector<BankEntry> entries;
  entries.reserve(body_vertices.size());
  for (const auto& v : body_vertices) {
    entries.push_back({KeepOutConstraint{rho, CenterTrajectory::rotating(v, omega)}, spec});
  }
  return entries;
}

std::vector<RcbfEvaluation> evaluate_bank_serial(const std::vector<BankEntry>& entries,
                                                 double t, const SimState& x,
                                                 const GravityModel& g, const ControlBounds& u,
                                                 const DisturbanceBounds& b,
                                                 const AlphaChoice& alpha) {
  std::vector<RcbfEvaluation> out(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    out[i] = evaluate_rcbf(entries[i].constraint, entries[i].spec, t, x, g, u, b, alpha);
  }
  return out;
}

std::vector<RcbfEvaluation> evaluate_bank_parallel(const std::vector<BankEntry>& entries,
                                                   double t, const SimState& x,
                                                   const GravityModel& g, const ControlBounds& u,
                                                   const DisturbanceBounds& b,
                                                   const AlphaChoice& alpha) {
  const int n = static_cast<int>(entries.size());
  std::vector<RcbfEvaluation> out(entries.size());
  std::vector<std::exception_ptr> errors(entries.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = evaluate_rcbf(entries[i].constraint, entries[i].spec, t, x, g, u, b, alpha);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<RcbfEvaluation> evaluate_bank(const std::vector<BankEntry>& entries, double t,
                                          const SimState& x, const GravityModel& g,
                                          const ControlBounds& u, const DisturbanceBounds& b,
                                          const AlphaChoice& alpha, bool allow_parallel) {
  constexpr size_t kParallelThreshold = 16;
  if (allow_parallel && entries.size() >= kParallelThreshold) {
    return evaluate_bank_parallel(entries, t, x, g, u, b, alpha);
  }
  return evaluate_bank_serial(entries, t, x, g, u, b, alpha);
}

}  // namespace rcbf
