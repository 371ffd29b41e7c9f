#ifndef MOREAU_PIECEWISE_HPP_
#define MOREAU_PIECEWISE_HPP_

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "moreau/pieces.hpp"

namespace moreau {

/// Indices of pieces attaining the pointwise minimum, up to a tolerance on
/// the objective values.
struct ActiveSet {
  std::vector<std::size_t> indices;
  double tolerance = 1e-9;

  bool contains(std::size_t i) const {
    return std::find(indices.begin(), indices.end(), i) != indices.end();
  }
  bool subset_of(const ActiveSet& other) const {
    for (std::size_t i : indices)
      if (!other.contains(i)) return false;
    return true;
  }
};

struct ProxResult {
  double point;
  std::size_t active_piece;
};

/// A scalar function f(v) = min_i f_i(v - shift) over convex pieces. The
/// shift translates the whole stack, which is how per-coordinate residual
/// losses f_i(v) = nu * ||v - b_i||_0 are expressed.
class PiecewiseConvexFunction {
 public:
  explicit PiecewiseConvexFunction(std::vector<ConvexPiece> pieces,
                                   double shift = 0.0)
      : pieces_(std::move(pieces)), shift_(shift) {
    if (pieces_.empty())
      throw std::invalid_argument("PiecewiseConvexFunction: needs >= 1 piece");
  }

  /// nu * ||.||_0 as {indicator of origin, constant nu}.
  static PiecewiseConvexFunction l0(double nu, double shift = 0.0) {
    return PiecewiseConvexFunction(
        {ConvexPiece::indicator_of_origin(), ConvexPiece::constant(nu)}, shift);
  }

  /// min_{theta in {-1,+1}} (1 - v*theta)_+ for unlabeled examples.
  static PiecewiseConvexFunction symmetric_hinge() {
    return PiecewiseConvexFunction(
        {ConvexPiece::hinge(1.0), ConvexPiece::hinge(-1.0)});
  }

  static PiecewiseConvexFunction single(ConvexPiece p, double shift = 0.0) {
    return PiecewiseConvexFunction(std::vector<ConvexPiece>{std::move(p)},
                                   shift);
  }

  const std::vector<ConvexPiece>& pieces() const { return pieces_; }
  double shift() const { return shift_; }
  std::size_t size() const { return pieces_.size(); }

  double eval(double v) const {
    const double x = v - shift_;
    double best = kInf;
    for (const auto& p : pieces_) best = std::min(best, p.eval(x));
    return best;
  }

  double piece_value(std::size_t i, double v) const {
    return pieces_[i].eval(v - shift_);
  }

  /// Global prox by per-piece candidates + min selection. Ties prefer an
  /// indicator-of-origin piece (hard-thresholding convention), then the
  /// lowest piece index.
  ProxResult prox(double v, double step) const {
    if (!(step > 0.0)) throw std::invalid_argument("prox: step must be > 0");
    const double x = v - shift_;
    double best_obj = kInf;
    double best_z = x;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const double z = pieces_[i].prox_step(x, step);
      const double d = z - x;
      const double obj = pieces_[i].eval(z) + d * d / (2.0 * step);
      const bool better = obj < best_obj;
      const bool tie_prefers_indicator =
          obj == best_obj &&
          pieces_[i].kind() == PieceKind::IndicatorOfOrigin &&
          pieces_[best_i].kind() != PieceKind::IndicatorOfOrigin;
      if (better || tie_prefers_indicator) {
        best_obj = obj;
        best_z = z;
        best_i = i;
      }
    }
    return {best_z + shift_, best_i};
  }

  /// Moreau envelope: min over per-piece envelopes (min-min interchange).
  double envelope(double v, double lambda) const {
    const double x = v - shift_;
    double best = kInf;
    for (const auto& p : pieces_) best = std::min(best, p.envelope(x, lambda));
    return best;
  }

  double piece_envelope(std::size_t i, double v, double lambda) const {
    return pieces_[i].envelope(v - shift_, lambda);
  }

  double piece_envelope_grad(std::size_t i, double v, double lambda) const {
    return pieces_[i].envelope_grad(v - shift_, lambda);
  }

  ActiveSet envelope_active_set(double v, double lambda, double tol) const {
    if (!(lambda > 0.0))
      throw std::invalid_argument("envelope_active_set: lambda must be > 0");
    if (tol < 0.0)
      throw std::invalid_argument("envelope_active_set: tol must be >= 0");
    const double x = v - shift_;
    std::vector<double> vals(pieces_.size());
    double best = kInf;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      vals[i] = pieces_[i].envelope(x, lambda);
      best = std::min(best, vals[i]);
    }
    ActiveSet s;
    s.tolerance = tol;
    for (std::size_t i = 0; i < pieces_.size(); ++i)
      if (vals[i] <= best + tol) s.indices.push_back(i);
    return s;
  }

  ActiveSet function_active_set(double z, double tol) const {
    if (tol < 0.0)
      throw std::invalid_argument("function_active_set: tol must be >= 0");
    const double x = z - shift_;
    std::vector<double> vals(pieces_.size());
    double best = kInf;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      vals[i] = pieces_[i].eval(x);
      best = std::min(best, vals[i]);
    }
    ActiveSet s;
    s.tolerance = tol;
    for (std::size_t i = 0; i < pieces_.size(); ++i)
      if (vals[i] <= best + tol) s.indices.push_back(i);
    return s;
  }

  /// One envelope gradient per active piece, each exactly
  /// (v - P_lambda f_i(v)) / lambda.
  std::vector<std::pair<std::size_t, double>> envelope_subgradients(
      double v, double lambda, double tol) const {
    const ActiveSet act = envelope_active_set(v, lambda, tol);
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(act.indices.size());
    const double x = v - shift_;
    for (std::size_t i : act.indices)
      out.emplace_back(i, pieces_[i].envelope_grad(x, lambda));
    return out;
  }

  /// Exact prox of the envelope e_lambda f = min_i e_lambda f_i at step mu,
  /// used by the ADMM baselines. Per convex piece,
  ///   P_mu(e_lambda f_i)(v) = v + mu/(lambda+mu) (P_{lambda+mu} f_i(v) - v).
  ProxResult envelope_prox(double v, double lambda, double mu) const {
    if (!(mu > 0.0)) throw std::invalid_argument("envelope_prox: step must be > 0");
    const double x = v - shift_;
    double best_obj = kInf;
    double best_z = x;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const double p = pieces_[i].prox_step(x, lambda + mu);
      const double z = x + mu / (lambda + mu) * (p - x);
      const double d = z - x;
      const double obj = pieces_[i].envelope(z, lambda) + d * d / (2.0 * mu);
      if (obj < best_obj) {
        best_obj = obj;
        best_z = z;
        best_i = i;
      }
    }
    return {best_z + shift_, best_i};
  }

 private:
  std::vector<ConvexPiece> pieces_;
  double shift_;
};

/// Coordinatewise stack of piecewise-convex losses for v in R^m.
class SeparableLoss {
 public:
  SeparableLoss() = default;
  explicit SeparableLoss(std::vector<PiecewiseConvexFunction> coords)
      : coords_(std::move(coords)) {}

  static SeparableLoss repeated(const PiecewiseConvexFunction& fn,
                                std::size_t m) {
    return SeparableLoss(std::vector<PiecewiseConvexFunction>(m, fn));
  }

  std::size_t dim() const { return coords_.size(); }
  const PiecewiseConvexFunction& coord(std::size_t j) const {
    return coords_[j];
  }

  template <typename Vec>
  double eval(const Vec& z) const {
    check_dim(static_cast<std::size_t>(z.size()));
    double s = 0.0;
    for (std::size_t j = 0; j < coords_.size(); ++j) s += coords_[j].eval(z[j]);
    return s;
  }

  template <typename Vec>
  double envelope(const Vec& v, double lambda) const {
    check_dim(static_cast<std::size_t>(v.size()));
    double s = 0.0;
    for (std::size_t j = 0; j < coords_.size(); ++j)
      s += coords_[j].envelope(v[j], lambda);
    return s;
  }

  template <typename Vec, typename Out>
  void prox_inplace(const Vec& v, double step, Out& out) const {
    check_dim(static_cast<std::size_t>(v.size()));
    for (std::size_t j = 0; j < coords_.size(); ++j)
      out[j] = coords_[j].prox(v[j], step).point;
  }

  template <typename Vec, typename Out>
  void envelope_prox_inplace(const Vec& v, double lambda, double mu,
                             Out& out) const {
    check_dim(static_cast<std::size_t>(v.size()));
    for (std::size_t j = 0; j < coords_.size(); ++j)
      out[j] = coords_[j].envelope_prox(v[j], lambda, mu).point;
  }

 private:
  void check_dim(std::size_t n) const {
    if (n != coords_.size())
      throw std::invalid_argument("SeparableLoss: dimension mismatch");
  }

  std::vector<PiecewiseConvexFunction> coords_;
};

}  // namespace moreau

#endif  // MOREAU_PIECEWISE_HPP_
