#ifndef MOREAU_EXPERIMENTS_HPP_
#define MOREAU_EXPERIMENTS_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "moreau/problem.hpp"

namespace moreau {

struct RegressionDataset {
  MatrixXd a;
  VectorXd b;
  VectorXd ground_truth_u;
  std::vector<bool> outlier_mask;
  double noise_sigma = 0.0;
  double outlier_magnitude = 0.0;
  unsigned seed = 0;
};

struct ClassificationDataset {
  MatrixXd x;                      // centered features, noise columns last
  VectorXd labels;                 // +-1
  std::vector<bool> labeled_mask;  // first l examples after shuffling
  int noise_dims = 0;
  unsigned seed = 0;
};

/// b = A u_true + Gaussian noise + a large constant on a random subset of
/// entries. Pass outlier_magnitude = NaN to default it to 10 * std(A u_true),
/// which dominates the truncation threshold.
inline RegressionDataset gen_regression(int m, int n, double outlier_frac,
                                        double outlier_magnitude,
                                        double noise_sigma, unsigned seed) {
  if (m < 1 || n < 1)
    throw std::invalid_argument("gen_regression: m, n must be >= 1");
  if (outlier_frac < 0.0 || outlier_frac > 1.0)
    throw std::invalid_argument("gen_regression: outlier_frac in [0,1]");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  RegressionDataset d;
  d.seed = seed;
  d.noise_sigma = noise_sigma;
  d.a.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) d.a(i, j) = gauss(rng);
  d.ground_truth_u.resize(n);
  for (int j = 0; j < n; ++j) d.ground_truth_u[j] = gauss(rng);

  const VectorXd b_clean = d.a * d.ground_truth_u;
  if (std::isnan(outlier_magnitude)) {
    const double mean = b_clean.mean();
    outlier_magnitude =
        10.0 * std::sqrt((b_clean.array() - mean).square().mean());
  }
  d.outlier_magnitude = outlier_magnitude;

  d.b = b_clean;
  if (noise_sigma > 0.0)
    for (int i = 0; i < m; ++i) d.b[i] += noise_sigma * gauss(rng);

  const int k = static_cast<int>(outlier_frac * m);
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  d.outlier_mask.assign(m, false);
  for (int i = 0; i < k; ++i) {
    d.outlier_mask[idx[i]] = true;
    d.b[idx[i]] += outlier_magnitude;
  }
  return d;
}

/// Robust regression model: g = 0 and per-coordinate truncated losses
/// f_i(v) = nu ||v - b_i||_0, so the envelope is min{nu, (v-b_i)^2/(2 lambda)}.
inline ConsensusProblem build_regression_problem(const RegressionDataset& d,
                                                 double lambda, double nu) {
  if (!(lambda > 0.0) || !(nu > 0.0))
    throw std::invalid_argument("build_regression_problem: lambda, nu > 0");
  std::vector<PiecewiseConvexFunction> coords;
  coords.reserve(d.b.size());
  for (Eigen::Index i = 0; i < d.b.size(); ++i)
    coords.push_back(PiecewiseConvexFunction::l0(nu, d.b[i]));
  return ConsensusProblem(d.a, SeparableLoss(std::move(coords)),
                          Regularizer::zero(), lambda);
}

/// Two balanced Gaussian clusters at +-mu in the signal dimensions. The
/// along-mu coordinate is bounded away from zero, so with
/// margin_violation_frac = 0 and no noise dims the data is separable by the
/// cluster-midpoint hyperplane even after centering. A fraction of examples
/// has that coordinate flipped to create class overlap. Pure-noise columns
/// are appended, all columns are centered, and the labeled mask marks the
/// first n_labeled examples after shuffling.
inline ClassificationDataset gen_classification(int n_examples, int d_signal,
                                                int d_noise, int n_labeled,
                                                double margin_violation_frac,
                                                unsigned seed) {
  if (n_examples < 2 || d_signal < 1 || d_noise < 0)
    throw std::invalid_argument("gen_classification: bad dimensions");
  if (n_labeled > n_examples)
    throw std::invalid_argument("gen_classification: l must be <= N");
  if (margin_violation_frac < 0.0 || margin_violation_frac > 1.0)
    throw std::invalid_argument(
        "gen_classification: margin_violation_frac in [0,1]");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  const int d = d_signal + d_noise;
  ClassificationDataset out;
  out.seed = seed;
  out.noise_dims = d_noise;
  out.x.resize(n_examples, d);
  out.labels.resize(n_examples);

  // Exactly balanced classes, then shuffled.
  std::vector<int> order(n_examples);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  const Eigen::Index half = n_examples / 2;
  for (int r = 0; r < n_examples; ++r) {
    const int i = order[r];
    const double theta = r < half ? 1.0 : -1.0;
    out.labels[i] = theta;
    // Cluster coordinate in [0.5, 1.5] along the mu direction (dimension 0).
    double along = 0.5 + unif(rng);
    if (unif(rng) < margin_violation_frac) along = -along;
    out.x(i, 0) = theta * along;
    for (int j = 1; j < d_signal; ++j) out.x(i, j) = 0.5 * gauss(rng);
    for (int j = d_signal; j < d; ++j) out.x(i, j) = gauss(rng);
  }

  out.labeled_mask.assign(n_examples, false);
  for (int i = 0; i < n_labeled; ++i) out.labeled_mask[i] = true;

  // Fixing the SVM bias to the empirical mean amounts to centering.
  const Eigen::RowVectorXd mean = out.x.colwise().mean();
  out.x.rowwise() -= mean;
  return out;
}

/// Semi-supervised SVM with feature selection: symmetric hinge stacks for
/// unlabeled rows, a fixed-label hinge for labeled rows, g = alpha ||u||_0 +
/// beta ||u||^2.
inline ConsensusProblem build_ssl_problem(const ClassificationDataset& d,
                                          double alpha, double beta,
                                          double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("build_ssl_problem: lambda must be > 0");
  std::vector<PiecewiseConvexFunction> coords;
  coords.reserve(d.x.rows());
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    if (d.labeled_mask[static_cast<std::size_t>(i)])
      coords.push_back(
          PiecewiseConvexFunction::single(ConvexPiece::hinge(d.labels[i])));
    else
      coords.push_back(PiecewiseConvexFunction::symmetric_hinge());
  }
  return ConsensusProblem(d.x, SeparableLoss(std::move(coords)),
                          Regularizer::l0_plus_l2(alpha, beta), lambda);
}

struct ClassifierMetrics {
  double test_error = 0.0;  // misclassification rate on the holdout
  double sparsity = 0.0;    // ||u||_0 / d with |u_j| > 1e-12 counted
  double objective = 0.0;   // regularized objective on the training problem
};

inline ClassifierMetrics evaluate_classifier(const ConsensusProblem& trained,
                                             const VectorXd& u,
                                             const ClassificationDataset& holdout) {
  ClassifierMetrics m;
  const VectorXd scores = holdout.x * u;
  long wrong = 0;
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    const double pred = scores[i] >= 0.0 ? 1.0 : -1.0;
    if (pred != holdout.labels[i]) ++wrong;
  }
  m.test_error = static_cast<double>(wrong) / static_cast<double>(scores.size());
  long nnz = 0;
  for (Eigen::Index j = 0; j < u.size(); ++j)
    if (std::abs(u[j]) > 1e-12) ++nnz;
  m.sparsity = static_cast<double>(nnz) / static_cast<double>(u.size());
  m.objective = regularized_objective(trained, u);
  return m;
}

}  // namespace moreau

#endif  // MOREAU_EXPERIMENTS_HPP_
