#pragma once

#include <cmath>
#include <iostream>

#include "curvex/problem.hpp"
#include "curvex/spectral.hpp"
#include "curvex/types.hpp"

namespace curvex {

enum class CurvatureMethod { Dense, Power };
enum class CurvatureSource { Dense, Power, None };

/// The extreme curvature direction (v_minus, v_plus) assembled from the
/// minimum x-block eigenpair and maximum y-block eigenpair:
///   v_minus = 1{lx < 0} * (lx / 2 rho_x) * sgn(vx . grad_x) * vx
///   v_plus  = 1{ly > 0} * (ly / 2 rho_y) * sgn(vy . grad_y) * vy
/// with sgn(0) := +1. Both parts are exactly zero whenever the block
/// spectra have the desired signs, which makes the curvature step inert
/// around any locally optimal saddle point.
struct ExtremeCurvature {
  Vec v_minus;  ///< curvature step in the x block; zero when lambda_min_x >= 0
  Vec v_plus;   ///< curvature step in the y block; zero when lambda_max_y <= 0
  double lambda_min_x = 0.0;
  double lambda_max_y = 0.0;
  CurvatureSource source = CurvatureSource::None;

  bool zero() const {
    return v_minus.isZero(0.0) && v_plus.isZero(0.0);
  }
  double squared_norm() const {
    return v_minus.squaredNorm() + v_plus.squaredNorm();
  }
  double norm() const { return std::sqrt(squared_norm()); }
};

namespace detail {
inline double sgn_pos_zero(double t) { return t >= 0.0 ? 1.0 : -1.0; }
}  // namespace detail

/// Assembly step, separated from eigenpair extraction so it can be checked
/// for eigenvector-sign invariance in isolation. Unit eigenvectors in,
/// scaled directions out.
inline ExtremeCurvature assemble_extreme_curvature(
    double lambda_min_x, const Vec& v_x, double lambda_max_y, const Vec& v_y,
    const PointZ& grad, double rho_x, double rho_y, CurvatureSource source) {
  if (!(rho_x > 0.0) || !(rho_y > 0.0)) {
    throw PreconditionError("extreme curvature: rho must be positive");
  }
  ExtremeCurvature c;
  c.lambda_min_x = lambda_min_x;
  c.lambda_max_y = lambda_max_y;
  c.source = source;
  if (lambda_min_x < 0.0) {
    const double s = detail::sgn_pos_zero(v_x.dot(grad.x));
    c.v_minus = (lambda_min_x / (2.0 * rho_x)) * s * v_x;
  } else {
    c.v_minus = Vec::Zero(v_x.size());
  }
  if (lambda_max_y > 0.0) {
    const double s = detail::sgn_pos_zero(v_y.dot(grad.y));
    c.v_plus = (lambda_max_y / (2.0 * rho_y)) * s * v_y;
  } else {
    c.v_plus = Vec::Zero(v_y.size());
  }
  return c;
}

/// Extreme curvature direction at z. method selects exact desk-scale
/// eigendecomposition or matrix-free power iteration on Hessian-vector
/// products. rho_x/rho_y <= 0 fall back to the problem's declared Hessian
/// Lipschitz constants.
///
/// A power iteration that ends with residual > 10*cfg.tol is treated as
/// "no usable curvature": the affected side contributes a zero direction
/// and the result is tagged CurvatureSource::None.
inline ExtremeCurvature extreme_curvature(const ProblemInstance& p,
                                          const PointZ& z,
                                          CurvatureMethod method,
                                          const PowerIterConfig& cfg,
                                          double rho_x = 0.0,
                                          double rho_y = 0.0) {
  p.check_point_shape(z);
  if (rho_x <= 0.0) rho_x = p.constants.lip_hess_x;
  if (rho_y <= 0.0) rho_y = p.constants.lip_hess_y;
  const PointZ g = p.grad(z);

  if (method == CurvatureMethod::Dense) {
    const HessianBlocks hb = detail::raw_hessian_blocks(p, z);
    const EigenPair ex = dense_extreme_eig(hb.xx, Extreme::Min);
    const EigenPair ey = dense_extreme_eig(hb.yy, Extreme::Max);
    return assemble_extreme_curvature(ex.eigenvalue, ex.eigenvector,
                                      ey.eigenvalue, ey.eigenvector, g, rho_x,
                                      rho_y, CurvatureSource::Dense);
  }

  PowerIterConfig cx = cfg;
  if (cx.beta <= 0.0) cx.beta = 1.0 / p.constants.lip_grad_x;
  cx.seed = mix_seed(cfg.seed, 0x78);
  PowerIterConfig cy = cfg;
  if (cy.beta <= 0.0) cy.beta = 1.0 / p.constants.lip_grad_y;
  cy.seed = mix_seed(cfg.seed, 0x79);

  const EigenPair ex = power_iteration_extreme(
      [&](const Vec& v) { return hvp(p, Block::X, z, v); }, p.k, Extreme::Min,
      cx);
  const EigenPair ey = power_iteration_extreme(
      [&](const Vec& v) { return hvp(p, Block::Y, z, v); }, p.d, Extreme::Max,
      cy);

  const bool x_ok = ex.residual <= 10.0 * cx.tol;
  const bool y_ok = ey.residual <= 10.0 * cy.tol;
  if (!x_ok || !y_ok) {
    std::cerr << "[curvex] warning: power iteration did not converge at "
                 "a curvature query (residuals "
              << ex.residual << ", " << ey.residual
              << "); returning zero direction\n";
    ExtremeCurvature c;
    c.v_minus = Vec::Zero(p.k);
    c.v_plus = Vec::Zero(p.d);
    c.lambda_min_x = ex.eigenvalue;
    c.lambda_max_y = ey.eigenvalue;
    c.source = CurvatureSource::None;
    return c;
  }
  return assemble_extreme_curvature(ex.eigenvalue, ex.eigenvector,
                                    ey.eigenvalue, ey.eigenvector, g, rho_x,
                                    rho_y, CurvatureSource::Power);
}

}  // namespace curvex
