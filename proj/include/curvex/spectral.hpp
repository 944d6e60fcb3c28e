#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include "curvex/problem.hpp"
#include "curvex/rng.hpp"
#include "curvex/types.hpp"

namespace curvex {

enum class Extreme { Min, Max };
enum class Block { X, Y };

/// An eigenpair with its achieved residual ||Mv - lambda v||. The residual
/// is always reported; callers decide what counts as converged.
struct EigenPair {
  double eigenvalue = 0.0;
  Vec eigenvector;
  double residual = 0.0;
  int iterations = 0;
};

/// Power iteration parameters. beta <= 0 lets callers that know a gradient
/// Lipschitz constant substitute 1/L; power_iteration_extreme itself
/// requires a positive value.
struct PowerIterConfig {
  double beta = 0.0;
  int max_iters = 0;  ///< 0 selects the budget implied by gamma_target/delta
  double tol = 1e-6;
  std::uint64_t seed = 0;
  double delta = 0.1;          ///< confidence parameter in (0,1)
  double gamma_target = 0.1;   ///< curvature scale the default budget aims at
};

/// Fix the sign so the first component of magnitude > 1e-12 is positive.
/// Makes eigenvector goldens deterministic across solvers.
inline void canonicalize_sign(Vec& v) {
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

/// Exact extreme eigenpair of a symmetric matrix via full symmetric
/// eigendecomposition. Desk-scale oracle: dimension capped at 512.
inline EigenPair dense_extreme_eig(const Mat& m, Extreme which) {
  if (m.rows() != m.cols()) throw ShapeError("dense_extreme_eig: not square");
  if (m.rows() > 512) throw ShapeError("dense_extreme_eig: dimension > 512");
  if (m.size() == 0) throw ShapeError("dense_extreme_eig: empty matrix");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() >= 1e-8) {
    throw ShapeError("dense_extreme_eig: matrix not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  const int idx = which == Extreme::Min ? 0 : static_cast<int>(m.rows()) - 1;
  EigenPair pair;
  pair.eigenvalue = es.eigenvalues()[idx];
  pair.eigenvector = es.eigenvectors().col(idx);
  canonicalize_sign(pair.eigenvector);
  pair.residual = (m * pair.eigenvector - pair.eigenvalue * pair.eigenvector).norm();
  pair.iterations = 0;
  return pair;
}

/// Hessian-vector product for one block, analytic when the problem carries
/// Hessian blocks, otherwise a central difference of the gradient along v.
inline Vec hvp(const ProblemInstance& p, Block block, const PointZ& z,
               const Vec& v) {
  p.check_point_shape(z);
  const int dim = block == Block::X ? p.k : p.d;
  if (v.size() != dim) throw ShapeError("hvp: direction has wrong dimension");
  const double vnorm = v.norm();
  if (vnorm == 0.0) throw PreconditionError("hvp: zero direction");

  if (p.has_analytic_hessian()) {
    const HessianBlocks hb = p.hessian(z);
    const Mat& h = block == Block::X ? hb.xx : hb.yy;
    return 0.5 * (h * v + h.transpose() * v);
  }
  const double step = std::sqrt(std::numeric_limits<double>::epsilon()) *
                      (1.0 + z.norm()) / vnorm;
  PointZ zp = z, zm = z;
  if (block == Block::X) {
    zp.x += step * v;
    zm.x -= step * v;
    return (p.grad(zp).x - p.grad(zm).x) / (2.0 * step);
  }
  zp.y += step * v;
  zm.y -= step * v;
  return (p.grad(zp).y - p.grad(zm).y) / (2.0 * step);
}

namespace detail {

inline int default_power_budget(int dim, const PowerIterConfig& cfg) {
  // (L / gamma) * log(dim / delta^2) with L = 1/beta.
  const double l_block = 1.0 / cfg.beta;
  const double budget =
      std::ceil((l_block / cfg.gamma_target) *
                std::log(static_cast<double>(dim) / (cfg.delta * cfg.delta)));
  return static_cast<int>(std::max(1.0, budget));
}

}  // namespace detail

/// Matrix-free extreme eigenpair extraction.
///
/// For the minimum eigenvalue, iterates v <- (I - beta*H) v with per-step
/// normalization from a seeded random unit start; the maximum uses the
/// mirrored shift I + beta*H. beta must make the shifted operator positive
/// semidefinite (beta <= 1/L for an operator norm bound L). Stops when the
/// residual ||Hv - (v'Hv)v|| drops below cfg.tol; otherwise returns the
/// last iterate with its residual so callers can reject it.
inline EigenPair power_iteration_extreme(
    const std::function<Vec(const Vec&)>& apply_h, int dim, Extreme which,
    const PowerIterConfig& cfg) {
  if (dim < 1) throw ShapeError("power_iteration_extreme: dim < 1");
  if (!(cfg.beta > 0.0)) {
    throw PreconditionError("power_iteration_extreme: beta must be positive");
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw PreconditionError("power_iteration_extreme: delta outside (0,1)");
  }
  const int max_iters =
      cfg.max_iters > 0 ? cfg.max_iters : detail::default_power_budget(dim, cfg);
  const double sign = which == Extreme::Min ? -1.0 : 1.0;

  Rng rng(cfg.seed);
  Vec v = rng.unit_vec(dim);
  EigenPair pair;
  for (int it = 1; it <= max_iters; ++it) {
    const Vec hv = apply_h(v);
    const double lambda = v.dot(hv);
    const double residual = (hv - lambda * v).norm();
    pair.eigenvalue = lambda;
    pair.eigenvector = v;
    pair.residual = residual;
    pair.iterations = it;
    if (residual < cfg.tol) break;
    Vec w = v + sign * cfg.beta * hv;
    const double wn = w.norm();
    if (wn < 1e-300 || !w.allFinite()) {
      v = rng.unit_vec(dim);  // shifted operator annihilated v; restart
      continue;
    }
    v = w / wn;
  }
  canonicalize_sign(pair.eigenvector);
  return pair;
}

}  // namespace curvex
