#include "rcbf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rcbf {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kZeroRow = 1e-14;
constexpr double kDualTol = 1e-12;

struct Row {
  Vec3 a;
  double b;
};

// Normalized half-spaces followed by the six box faces. Zero rows are dropped
// unless their bound is already violated, which makes the problem infeasible
// outright.
bool build_rows(const QpProblem& p, std::vector<Row>& rows) {
  rows.clear();
  rows.reserve(p.rows.size() + 6);
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    const double n = p.rows[i].norm();
    if (n <= kZeroRow) {
      if (p.bounds[i] < -kFeasTol) return false;
      continue;
    }
    rows.push_back({p.rows[i] / n, p.bounds[i] / n});
  }
  for (int k = 0; k < 3; ++k) {
    rows.push_back({Vec3::Unit(k), p.u_max});
    rows.push_back({-Vec3::Unit(k), p.u_max});
  }
  return true;
}

double max_violation(const std::vector<Row>& rows, const Vec3& u) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Row& r : rows) worst = std::max(worst, r.a.dot(u) - r.b);
  return worst;
}

// Equality-constrained step on a fixed active set. Returns false when the
// rows are linearly dependent or a multiplier goes negative.
template <int S>
bool try_active_set(const std::vector<Row>& rows, const int* idx, const Vec3& u_nom,
                    Vec3& u, double& kkt) {
  Eigen::Matrix<double, S, 3> A;
  Eigen::Matrix<double, S, 1> b;
  for (int k = 0; k < S; ++k) {
    A.row(k) = rows[idx[k]].a.transpose();
    b(k) = rows[idx[k]].b;
  }
  const Eigen::Matrix<double, S, S> M = A * A.transpose();
  Eigen::FullPivLU<Eigen::Matrix<double, S, S>> lu(M);
  if (lu.rank() < S) return false;
  const Eigen::Matrix<double, S, 1> lam = lu.solve(A * u_nom - b);
  if ((lam.array() < -kDualTol).any()) return false;
  u = u_nom - A.transpose() * lam;
  const double stationarity = (u - u_nom + A.transpose() * lam).norm();
  const double equality = (A * u - b).cwiseAbs().maxCoeff();
  const double dual = std::max(0.0, -lam.minCoeff());
  kkt = std::max({stationarity, equality, dual});
  return true;
}

}  // namespace

QpSolution solve_qp(const QpProblem& p) {
  if (p.u_max <= 0.0) throw ConfigError("solve_qp: u_max must be positive");
  if (p.rows.size() != p.bounds.size())
    throw ConfigError("solve_qp: rows/bounds size mismatch");

  std::vector<Row> rows;
  if (!build_rows(p, rows)) return {Vec3::Zero(), QpStatus::Infeasible, 0.0, 0};
  const int n = static_cast<int>(rows.size());

  if (max_violation(rows, p.u_nom) <= kFeasTol) return {p.u_nom, QpStatus::Optimal, 0.0, 0};

  // For a convex QP the first candidate passing stationarity, primal
  // feasibility and dual feasibility is the global optimum, so subsets are
  // scanned in deterministic lexicographic order and the first hit returned.
  // Degenerate subsets (dependent rows) are skipped; by Caratheodory some
  // independent subset supports the optimal multipliers.
  Vec3 u;
  double kkt;
  for (int i = 0; i < n; ++i) {
    const int idx[1] = {i};
    if (try_active_set<1>(rows, idx, p.u_nom, u, kkt) &&
        max_violation(rows, u) <= kFeasTol) {
      return {u, QpStatus::Optimal, std::max(kkt, 0.0), 1};
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int idx[2] = {i, j};
      if (try_active_set<2>(rows, idx, p.u_nom, u, kkt) &&
          max_violation(rows, u) <= kFeasTol) {
        return {u, QpStatus::Optimal, std::max(kkt, 0.0), 2};
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        const int idx[3] = {i, j, k};
        if (try_active_set<3>(rows, idx, p.u_nom, u, kkt) &&
            max_violation(rows, u) <= kFeasTol) {
          return {u, QpStatus::Optimal, std::max(kkt, 0.0), 3};
        }
      }
    }
  }
  return {Vec3::Zero(), QpStatus::Infeasible, 0.0, 0};
}

FallbackSolution solve_min_violation(const QpProblem& p) {
  // Smallest uniform relaxation of the half-space bounds that restores
  // feasibility over the box, found by bisection. Zero rows are insensitive
  // to u, so their violation is a constant floor and they are dropped from
  // the relaxed solves (relaxing them would never help).
  double floor = 0.0;
  QpProblem relaxed = p;
  relaxed.u_nom = Vec3::Zero();
  for (std::size_t i = 0; i < p.rows.size(); ++i) {
    if (p.rows[i].norm() <= kZeroRow) floor = std::max(floor, -p.bounds[i]);
  }

  double lo = 0.0;
  double hi = 1.0;
  const auto feasible_at = [&](double s) {
    for (std::size_t i = 0; i < p.rows.size(); ++i) {
      const double n = p.rows[i].norm();
      relaxed.bounds[i] = n <= kZeroRow ? 0.0 : p.bounds[i] + s * n;
    }
    return solve_qp(relaxed).status == QpStatus::Optimal;
  };
  while (!feasible_at(hi)) hi *= 4.0;  // violation at u = 0 is finite, so this terminates

  Vec3 best = Vec3::Zero();
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible_at(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  feasible_at(hi);
  best = solve_qp(relaxed).u;
  return {best, std::max(hi, floor)};
}

Vec3 nominal_flyby(const Vec3& r, const Vec3& v, double kp, double kd, double mu) {
  const double dist = r.norm();
  if (dist < 1e-6) throw SingularityError("nominal_flyby: state at the body center");
  const Vec3 ex = Vec3::UnitX();
  const Vec3 cross_track = r - r.dot(ex) * ex;
  // 1e4 m^2/s^2 keeps the target speed above escape at every radius.
  const double v_target = std::sqrt(2.0 * mu / dist + 1e4);
  return -kp * cross_track - kd * (v - v_target * ex);
}

Vec3 nominal_prox(const Vec3& r, const Vec3& v, const Vec3& r_t, double kp, double kd) {
  return -kp * (r - r_t) - kd * v;
}

}  // namespace rcbf
