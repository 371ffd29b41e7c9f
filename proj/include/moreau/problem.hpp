#ifndef MOREAU_PROBLEM_HPP_
#define MOREAU_PROBLEM_HPP_

#include <Eigen/Dense>
#include <random>
#include <stdexcept>
#include <utility>

#include "moreau/piecewise.hpp"

namespace moreau {

using Eigen::MatrixXd;
using Eigen::VectorXd;

enum class RegularizerKind { Zero, L0PlusL2 };

/// g(u) = 0 or g(u) = alpha * ||u||_0 + beta * ||u||^2, with exact
/// coordinatewise prox.
class Regularizer {
 public:
  static Regularizer zero() { return Regularizer(RegularizerKind::Zero, 0, 0); }
  static Regularizer l0_plus_l2(double alpha, double beta) {
    if (alpha < 0.0 || beta < 0.0)
      throw std::invalid_argument("l0_plus_l2: alpha, beta must be >= 0");
    return Regularizer(RegularizerKind::L0PlusL2, alpha, beta);
  }

  RegularizerKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }

  double eval(const VectorXd& u) const {
    if (kind_ == RegularizerKind::Zero) return 0.0;
    double s = beta_ * u.squaredNorm();
    for (Eigen::Index j = 0; j < u.size(); ++j)
      if (u[j] != 0.0) s += alpha_;
    return s;
  }

  /// Coordinatewise minimizer of g(z) + (z - v)^2 / (2 sigma); the zero
  /// candidate wins ties (hard-thresholding convention).
  VectorXd prox(const VectorXd& v, double sigma) const {
    if (!(sigma > 0.0))
      throw std::invalid_argument("Regularizer::prox: step must be > 0");
    if (kind_ == RegularizerKind::Zero) return v;
    VectorXd out(v.size());
    const double shrink = 1.0 / (1.0 + 2.0 * beta_ * sigma);
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const double z = v[j] * shrink;
      const double d = z - v[j];
      const double obj_nonzero =
          alpha_ + beta_ * z * z + d * d / (2.0 * sigma);
      const double obj_zero = v[j] * v[j] / (2.0 * sigma);
      out[j] = obj_nonzero < obj_zero ? z : 0.0;
    }
    return out;
  }

 private:
  Regularizer(RegularizerKind kind, double alpha, double beta)
      : kind_(kind), alpha_(alpha), beta_(beta) {}

  RegularizerKind kind_;
  double alpha_;
  double beta_;
};

/// Minimal linear-operator seam over the dense matrix; all solver access to
/// A goes through apply/apply_transpose so a sparse backend can slot in.
class DenseOperator {
 public:
  DenseOperator() = default;
  explicit DenseOperator(MatrixXd a) : a_(std::move(a)) {}

  Eigen::Index rows() const { return a_.rows(); }
  Eigen::Index cols() const { return a_.cols(); }
  const MatrixXd& matrix() const { return a_; }

  VectorXd apply(const VectorXd& u) const { return a_ * u; }
  VectorXd apply_transpose(const VectorXd& v) const {
    return a_.transpose() * v;
  }

 private:
  MatrixXd a_;
};

/// minimize e_lambda f(v) + g(u)  subject to  A u = v.
struct ConsensusProblem {
  DenseOperator op;
  SeparableLoss loss;
  Regularizer reg = Regularizer::zero();
  double lambda = 0.0;

  ConsensusProblem(MatrixXd a, SeparableLoss l, Regularizer g, double lam)
      : op(std::move(a)), loss(std::move(l)), reg(g), lambda(lam) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("ConsensusProblem: lambda must be > 0");
    if (static_cast<std::size_t>(op.rows()) != loss.dim())
      throw std::invalid_argument("ConsensusProblem: loss dim != rows(A)");
  }

  Eigen::Index m() const { return op.rows(); }
  Eigen::Index n() const { return op.cols(); }
};

struct SolverState {
  VectorXd u;
  VectorXd z;
  VectorXd y;
  long t = 0;

  static SolverState zero_init(const ConsensusProblem& p) {
    SolverState s;
    s.u = VectorXd::Zero(p.n());
    s.z = p.op.apply(s.u);
    s.y = VectorXd::Zero(p.m());
    s.t = 0;
    return s;
  }

  bool finite() const {
    return u.allFinite() && z.allFinite() && y.allFinite();
  }
};

inline void check_dims(const ConsensusProblem& p, const VectorXd& u,
                       const VectorXd& v) {
  if (u.size() != p.n() || v.size() != p.m())
    throw std::invalid_argument("dimension mismatch");
}

/// e_lambda f(Au) + g(u)  (the objective of the regularized problem).
inline double regularized_objective(const ConsensusProblem& p,
                                    const VectorXd& u) {
  if (u.size() != p.n()) throw std::invalid_argument("dimension mismatch");
  return p.loss.envelope(p.op.apply(u), p.lambda) + p.reg.eval(u);
}

/// Q(u, z) = f(z) + g(u) + ||Au - z||^2 / (2 lambda).
inline double quadratic_penalty(const ConsensusProblem& p, const VectorXd& u,
                                const VectorXd& z) {
  check_dims(p, u, z);
  const double fz = p.loss.eval(z);
  return fz + p.reg.eval(u) +
         (p.op.apply(u) - z).squaredNorm() / (2.0 * p.lambda);
}

/// Lyapunov function with w eliminated via w = lambda y.
inline double lyapunov(const ConsensusProblem& p, const VectorXd& u,
                       const VectorXd& z, const VectorXd& y, double rho) {
  check_dims(p, u, z);
  if (y.size() != p.m()) throw std::invalid_argument("dimension mismatch");
  if (!(rho > 0.0)) throw std::invalid_argument("lyapunov: rho must be > 0");
  const VectorXd au_z = p.op.apply(u) - z;
  return p.loss.eval(z) - 0.5 * p.lambda * y.squaredNorm() + p.reg.eval(u) +
         au_z.dot(y) + 0.5 * rho * (au_z - p.lambda * y).squaredNorm();
}

/// Augmented Lagrangian of the lifted problem (w kept explicit).
inline double augmented_lagrangian(const ConsensusProblem& p,
                                   const VectorXd& u, const VectorXd& z,
                                   const VectorXd& w, const VectorXd& y,
                                   double rho) {
  check_dims(p, u, z);
  if (w.size() != p.m() || y.size() != p.m())
    throw std::invalid_argument("dimension mismatch");
  if (!(rho > 0.0))
    throw std::invalid_argument("augmented_lagrangian: rho must be > 0");
  const VectorXd r = p.op.apply(u) - z - w;
  return p.loss.eval(z) + p.reg.eval(u) +
         w.squaredNorm() / (2.0 * p.lambda) + y.dot(r) +
         0.5 * rho * r.squaredNorm();
}

struct OperatorNormResult {
  double value = 0.0;
  bool zero_matrix = false;
};

/// Largest singular value of A by power iteration on A^T A, inflated by
/// (1 + tol) so step-size rules of the form sigma*rho*||A||^2 < 1 stay
/// strict despite estimation error. Deterministic seeded start vector.
inline OperatorNormResult operator_norm(const MatrixXd& a, double tol,
                                        unsigned seed = 12345) {
  if (!(tol > 0.0)) throw std::invalid_argument("operator_norm: tol must be > 0");
  if (a.size() == 0 || a.norm() == 0.0) return {0.0, true};

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd x(a.cols());
  for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = gauss(rng);
  x.normalize();

  double sq = 0.0;
  const int max_iters = 10000;
  for (int it = 0; it < max_iters; ++it) {
    VectorXd next = a.transpose() * (a * x);
    const double next_sq = next.norm();
    if (next_sq == 0.0) {
      // Start vector landed in the null space; perturb and continue.
      for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = gauss(rng);
      x.normalize();
      continue;
    }
    next /= next_sq;
    const bool converged = std::abs(next_sq - sq) <= 0.01 * tol * next_sq;
    sq = next_sq;
    x = next;
    if (converged) return {std::sqrt(sq) * (1.0 + tol), false};
  }
  throw std::runtime_error("operator_norm: power iteration did not converge");
}

}  // namespace moreau

#endif  // MOREAU_PROBLEM_HPP_
