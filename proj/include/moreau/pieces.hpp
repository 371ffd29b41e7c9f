#ifndef MOREAU_PIECES_HPP_
#define MOREAU_PIECES_HPP_

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace moreau {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class PieceKind {
  ZeroFn,
  ConstantFn,
  IndicatorOfOrigin,
  Hinge,
  ScaledQuadratic,
  L2Square,
};

/// Closed interval [lo, hi] of subgradients; lo = -inf / hi = +inf encode
/// unbounded sides (indicator at the origin).
struct SubgradientInterval {
  double lo;
  double hi;

  double distance_to(double y) const {
    if (y < lo) return lo - y;
    if (y > hi) return y - hi;
    return 0.0;
  }
};

/// One convex piece of a piecewise-convex scalar function. Each kind has an
/// exact proximal step and therefore an exact Moreau envelope.
class ConvexPiece {
 public:
  static ConvexPiece zero() { return ConvexPiece(PieceKind::ZeroFn, 0.0); }
  static ConvexPiece constant(double c) {
    return ConvexPiece(PieceKind::ConstantFn, c);
  }
  static ConvexPiece indicator_of_origin() {
    return ConvexPiece(PieceKind::IndicatorOfOrigin, 0.0);
  }
  static ConvexPiece hinge(double theta) {
    if (theta != 1.0 && theta != -1.0)
      throw std::invalid_argument("hinge: theta must be +1 or -1");
    return ConvexPiece(PieceKind::Hinge, theta);
  }
  static ConvexPiece scaled_quadratic(double a) {
    if (a < 0.0) throw std::invalid_argument("scaled_quadratic: a must be >= 0");
    return ConvexPiece(PieceKind::ScaledQuadratic, a);
  }
  static ConvexPiece l2_square(double beta) {
    if (beta < 0.0) throw std::invalid_argument("l2_square: beta must be >= 0");
    return ConvexPiece(PieceKind::L2Square, beta);
  }

  PieceKind kind() const { return kind_; }
  double param() const { return param_; }

  double eval(double z) const {
    switch (kind_) {
      case PieceKind::ZeroFn:
        return 0.0;
      case PieceKind::ConstantFn:
        return param_;
      case PieceKind::IndicatorOfOrigin:
        return z == 0.0 ? 0.0 : kInf;
      case PieceKind::Hinge: {
        const double margin = 1.0 - z * param_;
        return margin > 0.0 ? margin : 0.0;
      }
      case PieceKind::ScaledQuadratic:
      case PieceKind::L2Square:
        return param_ * z * z;
    }
    return kInf;
  }

  /// Unique minimizer of eval(z) + (z - v)^2 / (2 step).
  double prox_step(double v, double step) const {
    if (!(step > 0.0)) throw std::invalid_argument("prox_step: step must be > 0");
    switch (kind_) {
      case PieceKind::ZeroFn:
      case PieceKind::ConstantFn:
        return v;
      case PieceKind::IndicatorOfOrigin:
        return 0.0;
      case PieceKind::Hinge: {
        // Work in t = z*theta where the loss is (1 - t)_+.
        const double p = v * param_;
        double t;
        if (p >= 1.0)
          t = p;
        else if (p <= 1.0 - step)
          t = p + step;
        else
          t = 1.0;
        return t * param_;
      }
      case PieceKind::ScaledQuadratic:
      case PieceKind::L2Square:
        return v / (1.0 + 2.0 * param_ * step);
    }
    return v;
  }

  /// Moreau envelope of the piece: eval at the prox point plus the quadratic.
  double envelope(double v, double lambda) const {
    const double z = prox_step(v, lambda);
    const double d = z - v;
    return eval(z) + d * d / (2.0 * lambda);
  }

  /// Gradient of the (smooth, convex) per-piece envelope.
  double envelope_grad(double v, double lambda) const {
    return (v - prox_step(v, lambda)) / lambda;
  }

  /// Convex subdifferential of the piece at z (empty pieces never queried:
  /// callers restrict to active pieces, where eval(z) is finite).
  SubgradientInterval subdifferential(double z) const {
    switch (kind_) {
      case PieceKind::ZeroFn:
      case PieceKind::ConstantFn:
        return {0.0, 0.0};
      case PieceKind::IndicatorOfOrigin:
        return {-kInf, kInf};
      case PieceKind::Hinge: {
        const double t = z * param_;
        const double kink_eps = 1e-12 * (1.0 + std::abs(t));
        if (t < 1.0 - kink_eps) return {-param_, -param_};
        if (t > 1.0 + kink_eps) return {0.0, 0.0};
        return param_ > 0.0 ? SubgradientInterval{-1.0, 0.0}
                            : SubgradientInterval{0.0, 1.0};
      }
      case PieceKind::ScaledQuadratic:
      case PieceKind::L2Square:
        return {2.0 * param_ * z, 2.0 * param_ * z};
    }
    return {0.0, 0.0};
  }

 private:
  ConvexPiece(PieceKind kind, double param) : kind_(kind), param_(param) {}

  PieceKind kind_;
  double param_;
};

inline std::string to_string(PieceKind k) {
  switch (k) {
    case PieceKind::ZeroFn: return "zero";
    case PieceKind::ConstantFn: return "constant";
    case PieceKind::IndicatorOfOrigin: return "indicator_origin";
    case PieceKind::Hinge: return "hinge";
    case PieceKind::ScaledQuadratic: return "scaled_quadratic";
    case PieceKind::L2Square: return "l2_square";
  }
  return "unknown";
}

}  // namespace moreau

#endif  // MOREAU_PIECES_HPP_
