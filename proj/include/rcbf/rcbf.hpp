#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "rcbf/constraints.hpp"

namespace rcbf {

// ---------------------------------------------------------------------------
// Barrier construction specs
// ---------------------------------------------------------------------------

// H = h + |hdot_w| hdot_w / (2 a_max), valid when full thrust against the
// constraint decelerates hdot_w at least at a_max everywhere in the safe set.
struct ConstantAuthoritySpec {
  double a_max = 0.0;  // m/s^2
};

// H = Phi_inv(Phi(h) - hdot_w |hdot_w| / 2) for a strictly monotone potential
// Phi with derivative phi < 0 on the range of interest. Encodes authority
// that varies with depth (gravity growing toward the keep-out center).
struct VariableAuthoritySpec {
  std::function<double(double)> phi;      // Phi'
  std::function<double(double)> Phi;
  std::function<double(double)> Phi_inv;

  // Provenance so scenario files can round-trip the shipped families.
  enum class Family { Gravity, Linear, Custom } family = Family::Custom;
  double mu = 0.0, rho = 0.0, u_max = 0.0, w_u_max = 0.0;  // Gravity
  double a_max = 0.0;                                      // Linear
};

// Evasion maneuvers used by the predictive construction.
//   Opt  minimizes the control coefficient of hddot_w (radial, same as Rad)
//   Rad  pushes away from the keep-out center, componentwise saturated
//   Orth pushes along the relative tangential velocity, raising the orbit
enum class Maneuver { Opt, Rad, Orth };

// H(t,x) = max over beta in [0, horizon] of h(t+beta, chi(beta)) where chi
// follows the worst-case-shrunk box dynamics under the chosen maneuver.
struct PredictiveSpec {
  Maneuver maneuver = Maneuver::Rad;
  double horizon = 0.0;          // seconds
  double ode_dt = 0.0;           // coarse sample spacing cap, seconds
  double refine_tol = 1e-3;      // golden-section bracket width, seconds
  double early_stop_drop = 0.0;  // stop once h fell this far below the best peak; 0 = off
  double ambiguity_tol = 1e-3;   // meters between distinct peaks counted as a tie

  // Relative width of the componentwise sign smoothing in the maneuver. The
  // default is thin so the flow commits near-full authority even a few meters
  // off a switching plane; a wasted transverse axis can otherwise swing the
  // predicted peak by barrier-band magnitudes. Widen it only when the layer
  // itself must be resolved (sensitivity studies with coarse sampling).
  double sign_width = 1e-8;
};

using RcbfSpec = std::variant<ConstantAuthoritySpec, VariableAuthoritySpec, PredictiveSpec>;

// Gravity-aware potential Phi(l) = mu/(rho - l) + (w_u_max - u_max) l with a
// closed-form inverse on the monotone branch. Requires enough thrust to hover
// at the boundary: mu/rho^2 - u_max + w_u_max <= 0.
VariableAuthoritySpec gravity_phi(double mu, double rho, double u_max, double w_u_max);

// Phi(l) = -a_max l; reproduces the constant-authority barrier exactly.
VariableAuthoritySpec linear_phi(double a_max);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

struct RcbfEvaluation {
  double H = 0.0;
  double h = 0.0;  // raw constraint value at the same (t, x)
  double dH_dt = 0.0;
  Vec6 grad_H = Vec6::Zero();
  double W = 0.0;          // worst-case disturbance margin
  Vec3 row = Vec3::Zero();  // grad_H * g = velocity block of grad_H
  double bound = 0.0;       // alpha(-H) - W - dH_dt - grad_H . f
  bool control_independent = false;  // predictive maximizer at beta = 0
};

// W(t,x) = |grad_H g| w_u_max + |grad_H| w_x_max.
double disturbance_margin_W(const Vec6& grad_H, const DisturbanceBounds& b);

RcbfEvaluation eval_constant_authority(const KeepOutConstraint& c,
                                       const ConstantAuthoritySpec& spec, double t,
                                       const SimState& x, const GravityModel& g,
                                       const DisturbanceBounds& b, const AlphaChoice& alpha);

RcbfEvaluation eval_variable_authority(const KeepOutConstraint& c,
                                       const VariableAuthoritySpec& spec, double t,
                                       const SimState& x, const GravityModel& g,
                                       const DisturbanceBounds& b, const AlphaChoice& alpha);

RcbfEvaluation eval_predictive(const KeepOutConstraint& c, const PredictiveSpec& spec,
                               double t, const SimState& x, const GravityModel& g,
                               const ControlBounds& u, const DisturbanceBounds& b,
                               const AlphaChoice& alpha);

RcbfEvaluation evaluate_rcbf(const KeepOutConstraint& c, const RcbfSpec& spec, double t,
                             const SimState& x, const GravityModel& g, const ControlBounds& u,
                             const DisturbanceBounds& b, const AlphaChoice& alpha);

// Trajectories are safe when they start (and stay) in {H <= 0} intersected
// with {h <= 0}; H <= 0 alone does not imply h <= 0 for the closed forms.
bool in_restricted_safe_set(const RcbfEvaluation& e);

// Largest decel authority consistent with the sampled region:
// u_max - w_u_max - max over samples |f_mu(t, r) - u_c(t)|.
// Returns nullopt when the result is not positive (no valid authority).
std::optional<double> compute_a_max0(const KeepOutConstraint& c, const GravityModel& g,
                                     const ControlBounds& u, const DisturbanceBounds& b,
                                     const std::vector<std::pair<double, Vec3>>& samples);

// Evasion control law; maps into the box shrunk per axis by w_u_max. The
// componentwise sign is smoothed (relative width sign_width) so the
// sensitivity propagation sees a differentiable field; away from switching
// surfaces the smoothed value saturates to the exact box corner in double
// precision.
Vec3 u_star(Maneuver m, double t, const SimState& x, const KeepOutConstraint& c,
            const ControlBounds& u, const DisturbanceBounds& b, double sign_width = 1e-8);

// ---------------------------------------------------------------------------
// Predictive machinery
// ---------------------------------------------------------------------------

// Dense record of the maneuver flow chi(beta) together with its sensitivities
// theta = d chi / d t0 and Theta = d chi / d x0. Sample spacing adapts to the
// local orbital timescale but never exceeds ode_dt.
struct PropagationResult {
  std::vector<double> betas;
  std::vector<Vec6> y;
  std::vector<Vec6> theta;
  std::vector<Mat6> Theta;
  std::vector<double> h_samples;

  // Everything needed to re-integrate short spans during refinement.
  double t0 = 0.0;
  Maneuver maneuver = Maneuver::Rad;
  KeepOutConstraint constraint;
  GravityModel gravity;
  ControlBounds control;
  DisturbanceBounds bounds;
  double ode_dt = 0.0;
  double sign_width = 1e-8;
};

PropagationResult propagate_chi(double t0, const SimState& x0, Maneuver m,
                                const KeepOutConstraint& c, const GravityModel& g,
                                const ControlBounds& u, const DisturbanceBounds& b,
                                double horizon, double ode_dt, double early_stop_drop = 0.0,
                                double sign_width = 1e-8);

// Location of the global maximum of h along the propagated flow; 0 when the
// maximum sits at beta = 0. Coarse scan plus golden-section refinement that
// re-integrates from the nearest stored sample. Throws NoMaximizerError if h
// is still climbing at the end of the horizon and AmbiguousMaximizerError if
// two distinct nonzero peaks agree within ambiguity_tol.
double find_maximizer(const PropagationResult& pr, double refine_tol,
                      double ambiguity_tol = 1e-3);

}  // namespace rcbf
