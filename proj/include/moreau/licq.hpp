#ifndef MOREAU_LICQ_HPP_
#define MOREAU_LICQ_HPP_

#include <Eigen/Dense>
#include <vector>

namespace moreau {

/// LICQ on the hypograph of the envelope: lift each active gradient g_i to
/// (g_i, -1) in R^{m+1} and test linear independence by modified
/// Gram-Schmidt with a pivot tolerance of 1e-10 relative to the largest
/// column norm. An empty list is vacuously independent.
inline bool licq_holds(const std::vector<Eigen::VectorXd>& gradients, int m) {
  if (gradients.empty()) return true;
  const int n = static_cast<int>(gradients.size());
  if (n > m + 1) return false;

  Eigen::MatrixXd lifted(m + 1, n);
  for (int i = 0; i < n; ++i) {
    if (gradients[i].size() != m)
      throw std::invalid_argument("licq_holds: gradient dimension mismatch");
    lifted.col(i).head(m) = gradients[i];
    lifted(m, i) = -1.0;
  }

  double max_norm = 0.0;
  for (int i = 0; i < n; ++i)
    max_norm = std::max(max_norm, lifted.col(i).norm());
  const double pivot_tol = 1e-10 * max_norm;

  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k)
      lifted.col(i) -= lifted.col(k).dot(lifted.col(i)) * lifted.col(k);
    const double norm = lifted.col(i).norm();
    if (norm <= pivot_tol) return false;
    lifted.col(i) /= norm;
  }
  return true;
}

/// Scalar convenience: gradients of active envelope pieces at one coordinate.
inline bool licq_holds_scalar(const std::vector<double>& gradients) {
  std::vector<Eigen::VectorXd> lifted;
  lifted.reserve(gradients.size());
  for (double g : gradients) {
    Eigen::VectorXd v(1);
    v(0) = g;
    lifted.push_back(v);
  }
  return licq_holds(lifted, 1);
}

}  // namespace moreau

#endif  // MOREAU_LICQ_HPP_
