#ifndef MOREAU_DIAGNOSTICS_HPP_
#define MOREAU_DIAGNOSTICS_HPP_

#include <cmath>
#include <vector>

#include "moreau/licq.hpp"
#include "moreau/problem.hpp"

namespace moreau {

/// Optimality report at a candidate point (u, v, y):
///   gap_f    = dist(0, de_lambda f(v) - y)
///   gap_g    = dist(0, dg(u) + A^T y)
///   gap_feas = ||Au - v||
/// plus active-set qualification and LICQ findings and the lifted
/// criticality residuals at z = v - lambda y.
struct GapReport {
  double gap_f = 0.0;
  double gap_g = 0.0;
  double gap_feas = 0.0;
  double total = 0.0;
  bool qualification_holds = false;
  bool licq = false;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;
};

/// Relative active-set tolerance used at diagnostic call sites; limit points
/// are only eps-accurate so exact membership is too strict.
inline double diagnostic_tol(double value) {
  return 1e-7 * (1.0 + std::abs(value));
}

/// dist(0, dg(u) + A^T y). For the l0 part the general subgradient at 0 is
/// all of R, so zero coordinates contribute nothing.
inline double reg_stationarity(const ConsensusProblem& p, const VectorXd& u,
                               const VectorXd& aty) {
  if (p.reg.kind() == RegularizerKind::Zero) return aty.norm();
  double sq = 0.0;
  const double beta = p.reg.beta();
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    if (std::abs(u[j]) <= 1e-12) continue;
    const double r = 2.0 * beta * u[j] + aty[j];
    sq += r * r;
  }
  return std::sqrt(sq);
}

/// Active-set qualification: every piece active for f at z stays active for
/// e_lambda f at z + lambda y, coordinate by coordinate.
inline bool qualification_check(const ConsensusProblem& p, const VectorXd& z,
                                const VectorXd& y, double tol_rel) {
  if (z.size() != p.m() || y.size() != p.m())
    throw std::invalid_argument("qualification_check: dimension mismatch");
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const auto& fn = p.loss.coord(static_cast<std::size_t>(j));
    const double v = z[j] + p.lambda * y[j];
    const double ftol = tol_rel * (1.0 + std::abs(fn.eval(z[j])));
    const double etol = tol_rel * (1.0 + std::abs(fn.envelope(v, p.lambda)));
    const ActiveSet af = fn.function_active_set(z[j], ftol);
    const ActiveSet ae = fn.envelope_active_set(v, p.lambda, etol);
    if (!af.subset_of(ae)) return false;
  }
  return true;
}

/// Criticality residuals (r1, r2, r3) of the lifted system at (u, z, y):
/// r1 = dist(0, df(z) - y), r2 = dist(0, dg(u) + A^T y), r3 = |Au - z - λy|.
inline void lifted_residuals(const ConsensusProblem& p, const VectorXd& u,
                             const VectorXd& z, const VectorXd& y,
                             double& r1, double& r2, double& r3) {
  check_dims(p, u, z);
  if (y.size() != p.m())
    throw std::invalid_argument("lifted_residuals: dimension mismatch");

  // r1: dist(0, df(z) - y) via per-piece convex subdifferentials over the
  // active set (the inclusion of the pointwise-min subgradient rule).
  double sq = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    const auto& fn = p.loss.coord(static_cast<std::size_t>(j));
    const double tol = diagnostic_tol(fn.eval(z[j]));
    const ActiveSet act = fn.function_active_set(z[j], tol);
    double best = kInf;
    for (std::size_t i : act.indices) {
      const auto sub =
          fn.pieces()[i].subdifferential(z[j] - fn.shift());
      best = std::min(best, sub.distance_to(y[j]));
    }
    sq += best * best;
  }
  r1 = std::sqrt(sq);
  r2 = reg_stationarity(p, u, p.op.apply_transpose(y));
  r3 = (p.op.apply(u) - z - p.lambda * y).norm();
}

/// Full optimality gap at (u, v, y). The gap_f term takes,
/// per coordinate, the minimum distance |grad e_lambda f_i(v_j) - y_j| over
/// active envelope pieces; licq records whether that selection is exact.
inline GapReport optimality_gap(const ConsensusProblem& p, const VectorXd& u,
                                const VectorXd& v, const VectorXd& y) {
  check_dims(p, u, v);
  if (y.size() != p.m())
    throw std::invalid_argument("optimality_gap: dimension mismatch");

  GapReport rep;
  rep.licq = true;
  double sq = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const auto& fn = p.loss.coord(static_cast<std::size_t>(j));
    const double env = fn.envelope(v[j], p.lambda);
    if (!std::isfinite(env))
      throw std::runtime_error("optimality_gap: envelope infinite at v");
    const double tol = diagnostic_tol(env);
    const auto grads = fn.envelope_subgradients(v[j], p.lambda, tol);
    double best = kInf;
    std::vector<double> gvals;
    gvals.reserve(grads.size());
    for (const auto& [i, g] : grads) {
      best = std::min(best, std::abs(g - y[j]));
      gvals.push_back(g);
    }
    if (!licq_holds_scalar(gvals)) rep.licq = false;
    sq += best * best;
  }
  rep.gap_f = std::sqrt(sq);
  rep.gap_g = reg_stationarity(p, u, p.op.apply_transpose(y));
  rep.gap_feas = (p.op.apply(u) - v).norm();
  rep.total = rep.gap_f + rep.gap_g + rep.gap_feas;

  const VectorXd z = v - p.lambda * y;
  rep.qualification_holds = qualification_check(p, z, y, 1e-7);
  lifted_residuals(p, u, z, y, rep.r1, rep.r2, rep.r3);
  return rep;
}

}  // namespace moreau

#endif  // MOREAU_DIAGNOSTICS_HPP_
