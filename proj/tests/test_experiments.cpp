#include <doctest.h>

#include <cmath>

#include "moreau/experiments.hpp"

using namespace moreau;

TEST_CASE("regression generator basics") {
  // No outliers, no noise: b is exactly A u_true.
  auto clean = gen_regression(40, 5, 0.0, 10.0, 0.0, 7);
  CHECK((clean.b - clean.a * clean.ground_truth_u).norm() == 0.0);
  CHECK(std::count(clean.outlier_mask.begin(), clean.outlier_mask.end(), true) ==
        0);

  // Outlier count is floor(frac * m) and the mask matches the corruption.
  auto d = gen_regression(200, 10, 0.6, std::nan(""), 0.01, 1);
  const long k =
      std::count(d.outlier_mask.begin(), d.outlier_mask.end(), true);
  CHECK(k == 120);
  CHECK(d.outlier_magnitude > 0.0);
  const VectorXd resid = d.b - d.a * d.ground_truth_u;
  for (int i = 0; i < 200; ++i) {
    if (d.outlier_mask[i])
      CHECK(std::abs(resid[i]) > 0.5 * d.outlier_magnitude);
    else
      CHECK(std::abs(resid[i]) < 0.1);  // 10-sigma of the noise
  }

  // Same seed, same dataset.
  auto d2 = gen_regression(200, 10, 0.6, std::nan(""), 0.01, 1);
  CHECK(d.a == d2.a);
  CHECK(d.b == d2.b);
  CHECK(d.outlier_mask == d2.outlier_mask);

  CHECK_THROWS_AS(gen_regression(0, 5, 0.0, 1.0, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_regression(10, 5, 1.5, 1.0, 0.0, 1),
                  std::invalid_argument);
}

TEST_CASE("regression problem objective at the ground truth") {
  auto clean = gen_regression(40, 5, 0.0, 10.0, 0.0, 7);
  auto p = build_regression_problem(clean, 0.05, 0.01);
  CHECK(regularized_objective(p, clean.ground_truth_u) == doctest::Approx(0.0));

  // With corrupted rows, each outlier contributes exactly nu at u_true (the
  // residual lands in the truncated region).
  auto d = gen_regression(200, 10, 0.6, std::nan(""), 0.0, 3);
  auto pd = build_regression_problem(d, 0.05, 0.01);
  const long k =
      std::count(d.outlier_mask.begin(), d.outlier_mask.end(), true);
  CHECK(regularized_objective(pd, d.ground_truth_u) ==
        doctest::Approx(0.01 * static_cast<double>(k)));

  CHECK_THROWS_AS(build_regression_problem(d, 0.0, 0.01),
                  std::invalid_argument);
}

TEST_CASE("classification generator basics") {
  auto d = gen_classification(100, 4, 0, 100, 0.0, 11);
  CHECK(d.x.rows() == 100);
  CHECK(d.x.cols() == 4);
  // Columns are centered.
  CHECK(d.x.colwise().mean().cwiseAbs().maxCoeff() <= 1e-10);
  // Balanced labels.
  CHECK(std::abs(d.labels.sum()) <= 1.0);
  // Everything labeled when l = N.
  CHECK(std::count(d.labeled_mask.begin(), d.labeled_mask.end(), true) == 100);

  // No violations and no noise dims: the first coordinate separates after
  // centering, because the along-mu values are symmetric around a mean close
  // to zero and bounded away from it classwise.
  VectorXd w = VectorXd::Zero(4);
  w[0] = 1.0;
  const VectorXd margins = d.labels.cwiseProduct(d.x * w);
  CHECK(margins.minCoeff() > 0.0);

  auto part = gen_classification(100, 4, 6, 10, 0.05, 11);
  CHECK(part.x.cols() == 10);
  CHECK(part.noise_dims == 6);
  CHECK(std::count(part.labeled_mask.begin(), part.labeled_mask.end(), true) ==
        10);

  CHECK_THROWS_AS(gen_classification(100, 4, 0, 101, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_classification(100, 4, 0, 10, 2.0, 1),
                  std::invalid_argument);
}

TEST_CASE("ssl problem construction") {
  auto d = gen_classification(20, 3, 2, 5, 0.0, 13);
  auto p = build_ssl_problem(d, 0.025, 0.416, 0.5);
  CHECK(p.m() == 20);
  CHECK(p.n() == 5);
  CHECK(p.lambda == 0.5);
  CHECK(p.reg.kind() == RegularizerKind::L0PlusL2);

  // Labeled rows: hinge in the label direction, zero beyond the margin.
  std::size_t labeled = 0;
  while (!d.labeled_mask[labeled]) ++labeled;
  const auto& fl = p.loss.coord(labeled);
  CHECK(fl.eval(2.0 * d.labels[static_cast<Eigen::Index>(labeled)]) == 0.0);
  CHECK(fl.eval(0.0) == doctest::Approx(1.0));

  // Unlabeled rows: symmetric hinge, worth 1 at the origin with huberized
  // envelope 1 - lambda/2 = 0.75 at lambda = 0.5.
  std::size_t unlabeled = 0;
  while (d.labeled_mask[unlabeled]) ++unlabeled;
  const auto& fu = p.loss.coord(unlabeled);
  CHECK(fu.eval(0.0) == doctest::Approx(1.0));
  CHECK(fu.eval(1.5) == 0.0);
  CHECK(fu.eval(-1.5) == 0.0);
  CHECK(fu.envelope(0.0, 0.5) == doctest::Approx(0.75));
}

TEST_CASE("classifier metrics") {
  auto train = gen_classification(30, 3, 1, 30, 0.0, 17);
  auto holdout = gen_classification(40, 3, 1, 40, 0.0, 18);
  auto p = build_ssl_problem(train, 0.025, 0.416, 0.5);

  // u = 0 predicts +1 everywhere: error is the -1 class share, sparsity 0.
  const VectorXd zero = VectorXd::Zero(4);
  auto m0 = evaluate_classifier(p, zero, holdout);
  long minus = 0;
  for (Eigen::Index i = 0; i < holdout.labels.size(); ++i)
    if (holdout.labels[i] < 0.0) ++minus;
  CHECK(m0.test_error == doctest::Approx(static_cast<double>(minus) / 40.0));
  CHECK(m0.sparsity == 0.0);
  CHECK(m0.objective == doctest::Approx(regularized_objective(p, zero)));

  // A single nonzero on the signal coordinate classifies separable data.
  VectorXd w = VectorXd::Zero(4);
  w[0] = 1.0;
  auto m1 = evaluate_classifier(p, w, holdout);
  CHECK(m1.test_error == doctest::Approx(0.0));
  CHECK(m1.sparsity == doctest::Approx(0.25));
}
