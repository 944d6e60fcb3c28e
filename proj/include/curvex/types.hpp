#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace curvex {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr const char* kVersion = "0.1.0";

/// A point z = (x, y) in R^k x R^d. The same type doubles as a
/// block-structured displacement or gradient.
struct PointZ {
  Vec x;
  Vec y;

  int k() const { return static_cast<int>(x.size()); }
  int d() const { return static_cast<int>(y.size()); }
  int dim() const { return k() + d(); }

  Vec joined() const {
    Vec z(dim());
    z << x, y;
    return z;
  }

  static PointZ from_joined(const Vec& z, int k) {
    return PointZ{z.head(k), z.tail(z.size() - k)};
  }

  static PointZ zero(int k, int d) {
    return PointZ{Vec::Zero(k), Vec::Zero(d)};
  }

  double squared_norm() const { return x.squaredNorm() + y.squaredNorm(); }
  double norm() const { return std::sqrt(squared_norm()); }
  bool all_finite() const { return x.allFinite() && y.allFinite(); }
};

inline PointZ operator+(const PointZ& a, const PointZ& b) {
  return {a.x + b.x, a.y + b.y};
}

inline PointZ operator-(const PointZ& a, const PointZ& b) {
  return {a.x - b.x, a.y - b.y};
}

inline PointZ operator*(double s, const PointZ& a) { return {s * a.x, s * a.y}; }

/// Point outside the box over which a problem's constants are declared.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Evaluator produced a NaN/Inf.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Structurally invalid input (dimensions, symmetry, definiteness).
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A documented operation precondition does not hold.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace curvex
