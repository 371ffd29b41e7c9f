#ifndef MOREAU_SOLVERS_HPP_
#define MOREAU_SOLVERS_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "moreau/diagnostics.hpp"
#include "moreau/problem.hpp"

namespace moreau {

enum class Algorithm {
  PrimalDual,       // multiblock primal-dual scheme
  ProximalPenalty,  // fully primal Gauss-Seidel on the quadratic penalty
  LinearizedAdmm,
  VanillaAdmm,
  Palm,
};

enum class StopReason { Converged, MaxIters };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::PrimalDual: return "primal_dual";
    case Algorithm::ProximalPenalty: return "proximal_penalty";
    case Algorithm::LinearizedAdmm: return "linearized_admm";
    case Algorithm::VanillaAdmm: return "vanilla_admm";
    case Algorithm::Palm: return "palm";
  }
  return "unknown";
}

inline std::string to_string(StopReason r) {
  return r == StopReason::Converged ? "converged" : "max_iters";
}

struct RhoSchedule {
  double initial = 0.0;
  double growth = 1.05;
  double target = 0.0;
};

struct SolverConfig {
  RhoSchedule rho;
  double sigma_fraction = 0.9;   // sigma = c / (rho ||A||^2), or c*lambda/||A||^2
  double palm_tau_fraction = 0.5;  // tau = fraction * lambda
  double stop_eps = 1e-7;
  long max_iters = 60000;
  unsigned seed = 0;
  // ADMM baseline escalation: keep growing rho past the target, up to the
  // cap, when the optimality gap stagnates.
  double escalation_cap = 8000.0;
  long stagnation_window = 500;
  double stagnation_rel = 1e-3;

  /// Defaults from the warmup convention: target slightly above 1/lambda,
  /// starting two decades below and growing 5% per iteration.
  static SolverConfig defaults(double lambda) {
    SolverConfig c;
    c.rho.target = 1.05 / lambda;
    c.rho.initial = c.rho.target / 100.0;
    c.rho.growth = 1.05;
    return c;
  }
};

struct TraceRecord {
  long t = 0;
  double objective = kNaN;
  double lyapunov = kNaN;
  double penalty = kNaN;
  double feas = kNaN;
  double du = kNaN;
  double dz = kNaN;
  double dy = kNaN;
  double rho = 0.0;
};

struct Trace {
  std::vector<TraceRecord> records;
};

struct RunResult {
  SolverState state;
  Trace trace;
  StopReason reason = StopReason::MaxIters;
};

class SolverDivergence : public std::runtime_error {
 public:
  SolverDivergence(const std::string& msg, Trace tr)
      : std::runtime_error(msg), trace(std::move(tr)) {}
  Trace trace;
};

// ---------------------------------------------------------------------------
// Single steps. All are pure: state in, state out.
// ---------------------------------------------------------------------------

inline SolverState step_alg1(const ConsensusProblem& p, const SolverState& s,
                             double rho, double sigma) {
  SolverState next;
  const VectorXd grad = p.op.apply_transpose(
      s.y + rho * (p.op.apply(s.u) - s.z - p.lambda * s.y));
  next.u = p.reg.prox(s.u - sigma * grad, sigma);
  const VectorXd au = p.op.apply(next.u);
  const VectorXd zarg = au + (1.0 / rho - p.lambda) * s.y;
  next.z.resize(p.m());
  p.loss.prox_inplace(zarg, 1.0 / rho, next.z);
  next.y = (s.y + rho * (au - next.z)) / (1.0 + rho * p.lambda);
  next.t = s.t + 1;
  return next;
}

inline SolverState step_alg2(const ConsensusProblem& p, const SolverState& s,
                             double sigma) {
  SolverState next;
  const VectorXd grad = p.op.apply_transpose(p.op.apply(s.u) - s.z);
  next.u = p.reg.prox(s.u - (sigma / p.lambda) * grad, sigma);
  const VectorXd au = p.op.apply(next.u);
  next.z.resize(p.m());
  p.loss.prox_inplace(au, p.lambda, next.z);
  // The scheme needs no multiplier; keep one for diagnostics.
  next.y = (au - next.z) / p.lambda;
  next.t = s.t + 1;
  return next;
}

inline SolverState step_linearized_admm(const ConsensusProblem& p,
                                        const SolverState& s, double rho,
                                        double sigma) {
  SolverState next;
  const VectorXd grad =
      p.op.apply_transpose(s.y + rho * (p.op.apply(s.u) - s.z));
  next.u = p.reg.prox(s.u - sigma * grad, sigma);
  const VectorXd au = p.op.apply(next.u);
  next.z.resize(p.m());
  p.loss.envelope_prox_inplace(au + s.y / rho, p.lambda, 1.0 / rho, next.z);
  next.y = s.y + rho * (au - next.z);
  next.t = s.t + 1;
  return next;
}

/// Exact u-subproblem solver for vanilla ADMM; factorization cached since
/// A^T A does not change across iterations.
class VanillaUSolver {
 public:
  VanillaUSolver(const ConsensusProblem& p) : reg_(p.reg) {
    const MatrixXd& a = p.op.matrix();
    ata_ = a.transpose() * a;
    if (reg_.kind() == RegularizerKind::Zero) {
      ldlt_.compute(ata_);
      const double dmin = ldlt_.vectorD().minCoeff();
      const double dmax = ldlt_.vectorD().maxCoeff();
      if (ldlt_.info() != Eigen::Success || !(dmin > 1e-12 * std::max(1.0, dmax)))
        throw std::invalid_argument(
            "vanilla_admm: u-subproblem requires invertible A^T A for g = 0");
    } else {
      // l0+l2 has an exact coordinatewise solution only when A^T A is
      // diagonal.
      const double scale = ata_.diagonal().cwiseAbs().maxCoeff();
      for (Eigen::Index i = 0; i < ata_.rows(); ++i)
        for (Eigen::Index j = 0; j < ata_.cols(); ++j)
          if (i != j && std::abs(ata_(i, j)) > 1e-12 * (1.0 + scale))
            throw std::invalid_argument(
                "vanilla_admm: l0+l2 regularizer requires diagonal A^T A");
    }
  }

  VectorXd solve(const ConsensusProblem& p, const VectorXd& rhs_v,
                 double rho) const {
    const VectorXd r = p.op.apply_transpose(rhs_v);
    if (reg_.kind() == RegularizerKind::Zero) return ldlt_.solve(r);
    // argmin_u alpha 1[u!=0] + beta u^2 + (rho/2)(d u^2 - 2 u r) per coord.
    VectorXd u(r.size());
    const double alpha = reg_.alpha();
    const double beta = reg_.beta();
    for (Eigen::Index j = 0; j < r.size(); ++j) {
      const double d = ata_(j, j);
      const double denom = 2.0 * beta + rho * d;
      if (denom <= 0.0) {
        u[j] = 0.0;
        continue;
      }
      const double cand = rho * r[j] / denom;
      const double obj_nonzero = alpha + beta * cand * cand +
                                 0.5 * rho * (d * cand * cand - 2.0 * cand * r[j]);
      u[j] = obj_nonzero < 0.0 ? cand : 0.0;
    }
    return u;
  }

 private:
  Regularizer reg_;
  MatrixXd ata_;
  Eigen::LDLT<MatrixXd> ldlt_;
};

inline SolverState step_vanilla_admm(const ConsensusProblem& p,
                                     const SolverState& s, double rho,
                                     const VanillaUSolver& usolver) {
  SolverState next;
  next.u = usolver.solve(p, s.z - s.y / rho, rho);
  const VectorXd au = p.op.apply(next.u);
  next.z.resize(p.m());
  p.loss.envelope_prox_inplace(au + s.y / rho, p.lambda, 1.0 / rho, next.z);
  next.y = s.y + rho * (au - next.z);
  next.t = s.t + 1;
  return next;
}

inline SolverState step_palm(const ConsensusProblem& p, const SolverState& s,
                             double sigma, double tau) {
  SolverState next;
  const VectorXd grad = p.op.apply_transpose(p.op.apply(s.u) - s.z);
  next.u = p.reg.prox(s.u - (sigma / p.lambda) * grad, sigma);
  const VectorXd au = p.op.apply(next.u);
  const VectorXd zarg = s.z + (tau / p.lambda) * (au - s.z);
  next.z.resize(p.m());
  p.loss.prox_inplace(zarg, tau, next.z);
  next.y = (au - next.z) / p.lambda;
  next.t = s.t + 1;
  return next;
}

// ---------------------------------------------------------------------------
// Configuration validation and the driver loop.
// ---------------------------------------------------------------------------

inline bool uses_envelope_prox(Algorithm a) {
  return a == Algorithm::LinearizedAdmm || a == Algorithm::VanillaAdmm;
}

inline bool uses_rho(Algorithm a) {
  return a == Algorithm::PrimalDual || uses_envelope_prox(a);
}

inline void validate_config(const ConsensusProblem& p, Algorithm alg,
                            const SolverConfig& cfg) {
  if (cfg.max_iters < 1)
    throw std::invalid_argument("config: max_iters must be >= 1");
  if (!(cfg.stop_eps > 0.0))
    throw std::invalid_argument("config: stop_eps must be > 0");
  if (uses_rho(alg)) {
    if (!(cfg.rho.initial > 0.0) || !(cfg.rho.target >= cfg.rho.initial) ||
        !(cfg.rho.growth >= 1.0))
      throw std::invalid_argument(
          "config: rho schedule needs 0 < initial <= target and growth >= 1");
  }
  if (alg == Algorithm::PrimalDual &&
      cfg.rho.target * p.lambda < 1.0 - 1e-12)
    throw std::invalid_argument(
        "config: target rho violates the step-size rule ρλ > 1");
  if (uses_rho(alg) && alg != Algorithm::VanillaAdmm &&
      !(cfg.sigma_fraction > 0.0 && cfg.sigma_fraction < 1.0))
    throw std::invalid_argument(
        "config: sigma_fraction violates the step-size rule σρ‖A‖² < 1");
  if ((alg == Algorithm::ProximalPenalty || alg == Algorithm::Palm) &&
      !(cfg.sigma_fraction > 0.0 && cfg.sigma_fraction < 1.0))
    throw std::invalid_argument(
        "config: sigma_fraction violates the step-size rule σ‖A‖² < λ");
  if (alg == Algorithm::Palm &&
      !(cfg.palm_tau_fraction > 0.0 && cfg.palm_tau_fraction < 1.0))
    throw std::invalid_argument(
        "config: palm_tau_fraction violates the step-size rule τ < λ");
  if (alg == Algorithm::VanillaAdmm) VanillaUSolver probe(p);
}

/// The v at which the optimality gap is evaluated: z + lambda y for the
/// algorithms running prox steps on f; z itself for the ADMM baselines that
/// already work on the envelope.
inline VectorXd diagnostic_v(Algorithm alg, const ConsensusProblem& p,
                             const SolverState& s) {
  if (uses_envelope_prox(alg)) return s.z;
  return s.z + p.lambda * s.y;
}

inline GapReport report_for(Algorithm alg, const ConsensusProblem& p,
                            const SolverState& s) {
  return optimality_gap(p, s.u, diagnostic_v(alg, p, s), s.y);
}

inline RunResult run(const ConsensusProblem& p, Algorithm alg,
                     const SolverConfig& cfg, SolverState init) {
  validate_config(p, alg, cfg);
  const double norm_a = operator_norm(p.op.matrix(), 1e-6).value;
  const double norm_a_sq = norm_a * norm_a;

  std::optional<VanillaUSolver> usolver;
  if (alg == Algorithm::VanillaAdmm) usolver.emplace(p);

  const double sigma_primal = cfg.sigma_fraction * p.lambda / norm_a_sq;
  const double tau = cfg.palm_tau_fraction * p.lambda;

  RunResult res;
  res.state = std::move(init);
  double rho_current = uses_rho(alg) ? cfg.rho.initial : 0.0;
  bool escalating = false;
  double last_gap = kInf;

  for (long t = 0; t < cfg.max_iters; ++t) {
    double rho_t = rho_current;
    SolverState next;
    switch (alg) {
      case Algorithm::PrimalDual:
        next = step_alg1(p, res.state, rho_t,
                         cfg.sigma_fraction / (rho_t * norm_a_sq));
        break;
      case Algorithm::ProximalPenalty:
        next = step_alg2(p, res.state, sigma_primal);
        break;
      case Algorithm::LinearizedAdmm:
        next = step_linearized_admm(p, res.state, rho_t,
                                    cfg.sigma_fraction / (rho_t * norm_a_sq));
        break;
      case Algorithm::VanillaAdmm:
        next = step_vanilla_admm(p, res.state, rho_t, *usolver);
        break;
      case Algorithm::Palm:
        next = step_palm(p, res.state, sigma_primal, tau);
        break;
    }

    TraceRecord rec;
    rec.t = next.t;
    rec.rho = rho_t;
    rec.du = (next.u - res.state.u).norm();
    rec.dz = (next.z - res.state.z).norm();
    rec.dy = (next.y - res.state.y).norm();
    const double dinf =
        std::max({(next.u - res.state.u).lpNorm<Eigen::Infinity>(),
                  (next.z - res.state.z).lpNorm<Eigen::Infinity>(),
                  (next.y - res.state.y).lpNorm<Eigen::Infinity>()});

    if (!next.finite()) {
      res.trace.records.push_back(rec);
      throw SolverDivergence("solver diverged: non-finite iterate at t=" +
                                 std::to_string(next.t),
                             std::move(res.trace));
    }

    rec.objective = regularized_objective(p, next.u);
    rec.lyapunov =
        lyapunov(p, next.u, next.z, next.y, uses_rho(alg) ? rho_t : 1.0 / p.lambda);
    rec.penalty = quadratic_penalty(p, next.u, next.z);
    rec.feas = (p.op.apply(next.u) - next.z - p.lambda * next.y).norm();
    res.trace.records.push_back(rec);
    res.state = std::move(next);

    const bool at_target = !uses_rho(alg) || rho_current >= cfg.rho.target;
    if (at_target && dinf < cfg.stop_eps) {
      res.reason = StopReason::Converged;
      return res;
    }

    // rho schedule for the next iteration.
    if (uses_rho(alg)) {
      if (escalating) {
        rho_current = std::min(cfg.escalation_cap, rho_current * cfg.rho.growth);
      } else if (rho_current < cfg.rho.target) {
        rho_current = std::min(cfg.rho.target, rho_current * cfg.rho.growth);
      } else if (uses_envelope_prox(alg) && cfg.stagnation_window > 0 &&
                 (t + 1) % cfg.stagnation_window == 0) {
        const double gap = report_for(alg, p, res.state).total;
        if (std::isfinite(last_gap) &&
            std::abs(gap - last_gap) < cfg.stagnation_rel * std::abs(last_gap))
          escalating = cfg.escalation_cap > cfg.rho.target;
        last_gap = gap;
      }
    }
  }
  res.reason = StopReason::MaxIters;
  return res;
}

}  // namespace moreau

#endif  // MOREAU_SOLVERS_HPP_
