#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>

#include "curvex/types.hpp"

namespace curvex {

/// Lipschitz/bound constants of a problem, declared over its domain box.
/// Block constants never exceed the joint ones.
struct SmoothnessConstants {
  double lip_grad_x = 1.0;  ///< Lipschitz constant of the x-block gradient
  double lip_grad_y = 1.0;
  double lip_grad_z = 1.0;  ///< Lipschitz constant of the joint gradient
  double lip_hess_x = 1.0;  ///< Lipschitz constant of the x-block Hessian
  double lip_hess_y = 1.0;
  double lip_hess_z = 1.0;
  double grad_bound_x = 1.0;  ///< sup of the x-block gradient norm on the box
  double grad_bound_y = 1.0;
  double grad_bound_z = 1.0;

  void validate() const {
    const double vals[] = {lip_grad_x, lip_grad_y, lip_grad_z,
                           lip_hess_x, lip_hess_y, lip_hess_z,
                           grad_bound_x, grad_bound_y, grad_bound_z};
    for (double v : vals) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ShapeError("smoothness constants must be finite and positive");
      }
    }
    if (lip_grad_x > lip_grad_z || lip_grad_y > lip_grad_z) {
      throw ShapeError("block gradient Lipschitz constant exceeds joint one");
    }
  }
};

/// Per-coordinate bounds on the joined vector (x first, then y).
struct DomainBox {
  Vec lo;
  Vec hi;

  bool contains(const Vec& z) const {
    if (z.size() != lo.size()) return false;
    for (int i = 0; i < z.size(); ++i) {
      if (!(z[i] >= lo[i] && z[i] <= hi[i])) return false;
    }
    return true;
  }

  static DomainBox cube(int dim, double lo_v, double hi_v) {
    return DomainBox{Vec::Constant(dim, lo_v), Vec::Constant(dim, hi_v)};
  }
};

/// The three second-derivative blocks of f at a point. xx is k x k,
/// yy is d x d, xy is k x d.
struct HessianBlocks {
  Mat xx;
  Mat yy;
  Mat xy;
};

/// A smooth two-block objective f(x, y) with evaluators and declared
/// smoothness constants. Evaluators are pure; safe for concurrent use.
struct ProblemInstance {
  std::string name;
  int k = 0;  ///< dimension of the minimization block x
  int d = 0;  ///< dimension of the maximization block y

  std::function<double(const PointZ&)> value;
  std::function<PointZ(const PointZ&)> grad;
  /// Optional analytic Hessian blocks; empty means finite differences.
  std::function<HessianBlocks(const PointZ&)> hessian;

  SmoothnessConstants constants;
  DomainBox domain;

  bool has_analytic_hessian() const { return static_cast<bool>(hessian); }

  void check_point_shape(const PointZ& z) const {
    if (z.k() != k || z.d() != d) {
      throw ShapeError("point dimensions do not match problem '" + name + "'");
    }
  }
};

namespace detail {

inline double fd_step(double coord) {
  static const double h0 = std::cbrt(std::numeric_limits<double>::epsilon());
  return h0 * (1.0 + std::abs(coord));
}

/// Central-difference Jacobian of the gradient over the joined coordinates.
inline Mat fd_hessian_joined(const ProblemInstance& p, const PointZ& z) {
  const int n = z.dim();
  Vec zj = z.joined();
  Mat h(n, n);
  for (int i = 0; i < n; ++i) {
    const double step = fd_step(zj[i]);
    const double saved = zj[i];
    zj[i] = saved + step;
    const Vec gp = p.grad(PointZ::from_joined(zj, p.k)).joined();
    zj[i] = saved - step;
    const Vec gm = p.grad(PointZ::from_joined(zj, p.k)).joined();
    zj[i] = saved;
    h.col(i) = (gp - gm) / (2.0 * step);
  }
  return h;
}

/// Hessian blocks without the domain check, analytic or finite-difference,
/// square blocks symmetrized. Steppers and curvature queries use this so a
/// trajectory that wanders past the constants' box keeps evaluating.
inline HessianBlocks raw_hessian_blocks(const ProblemInstance& p,
                                        const PointZ& z) {
  HessianBlocks hb;
  if (p.has_analytic_hessian()) {
    hb = p.hessian(z);
  } else {
    const Mat h = fd_hessian_joined(p, z);
    hb.xx = h.topLeftCorner(p.k, p.k);
    hb.yy = h.bottomRightCorner(p.d, p.d);
    hb.xy = h.topRightCorner(p.k, p.d);
  }
  hb.xx = 0.5 * (hb.xx + hb.xx.transpose()).eval();
  hb.yy = 0.5 * (hb.yy + hb.yy.transpose()).eval();
  return hb;
}

}  // namespace detail

/// Checked objective evaluation: enforces the domain box and finiteness.
inline double evaluate(const ProblemInstance& p, const PointZ& z) {
  p.check_point_shape(z);
  if (!p.domain.contains(z.joined())) {
    throw DomainError("point outside domain box of problem '" + p.name + "'");
  }
  const double v = p.value(z);
  if (!std::isfinite(v)) {
    throw EvaluationError("objective evaluated to a non-finite value");
  }
  return v;
}

/// Checked gradient evaluation.
inline PointZ gradient(const ProblemInstance& p, const PointZ& z) {
  p.check_point_shape(z);
  if (!p.domain.contains(z.joined())) {
    throw DomainError("point outside domain box of problem '" + p.name + "'");
  }
  PointZ g = p.grad(z);
  if (!g.all_finite()) {
    throw EvaluationError("gradient evaluated to a non-finite value");
  }
  return g;
}

/// Hessian blocks, analytic when available, otherwise central differences
/// of the gradient. Square blocks are symmetrized as (M + M^T)/2.
inline HessianBlocks hessian_blocks(const ProblemInstance& p, const PointZ& z) {
  p.check_point_shape(z);
  if (!p.domain.contains(z.joined())) {
    throw DomainError("point outside domain box of problem '" + p.name + "'");
  }
  const HessianBlocks hb = detail::raw_hessian_blocks(p, z);
  if (!hb.xx.allFinite() || !hb.yy.allFinite() || !hb.xy.allFinite()) {
    throw EvaluationError("Hessian blocks contain non-finite values");
  }
  return hb;
}

}  // namespace curvex
