#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "curvex/curvature.hpp"
#include "curvex/dynamics.hpp"
#include "curvex/parallel.hpp"
#include "curvex/problem.hpp"
#include "curvex/spectral.hpp"
#include "curvex/types.hpp"

namespace curvex {

/// Jacobian of the simultaneous descent/ascent vector field,
///   [ -Hxx  -Hxy ]
///   [  Hxy'  Hyy ].
/// A stationary point is stable for the gradient dynamics exactly when all
/// eigenvalues of this matrix have negative real part.
inline Mat dynamics_jacobian(const ProblemInstance& p, const PointZ& z) {
  const HessianBlocks hb = hessian_blocks(p, z);
  Mat j(p.k + p.d, p.k + p.d);
  j.topLeftCorner(p.k, p.k) = -hb.xx;
  j.topRightCorner(p.k, p.d) = -hb.xy;
  j.bottomLeftCorner(p.d, p.k) = hb.xy.transpose();
  j.bottomRightCorner(p.d, p.d) = hb.yy;
  return j;
}

enum class Verdict {
  LocallyOptimalSaddle,
  StableUndesired,
  UnstableStationary,
  NotStationary,
  Degenerate,
};

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::LocallyOptimalSaddle: return "locally_optimal_saddle";
    case Verdict::StableUndesired: return "stable_undesired";
    case Verdict::UnstableStationary: return "unstable_stationary";
    case Verdict::NotStationary: return "not_stationary";
    case Verdict::Degenerate: return "degenerate";
  }
  return "unknown";
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "locally_optimal_saddle") return Verdict::LocallyOptimalSaddle;
  if (s == "stable_undesired") return Verdict::StableUndesired;
  if (s == "unstable_stationary") return Verdict::UnstableStationary;
  if (s == "not_stationary") return Verdict::NotStationary;
  if (s == "degenerate") return Verdict::Degenerate;
  throw ShapeError("unknown verdict '" + s + "'");
}

struct StationaryPointReport {
  PointZ z;
  double grad_norm = 0.0;
  double lambda_min_x = 0.0;  ///< smallest eigenvalue of the x Hessian block
  double lambda_max_y = 0.0;  ///< largest eigenvalue of the y Hessian block
  std::vector<std::complex<double>> jacobian_eigs;
  Verdict verdict = Verdict::NotStationary;
  double margin_x = 0.0;  ///< mu_x = lambda_min_x
  double margin_y = 0.0;  ///< mu_y = -lambda_max_y
};

/// Classifies a point by gradient norm, block Hessian spectra, and the
/// dynamics-Jacobian spectrum. Anything within +-tol of a strict inequality
/// yields Degenerate rather than a guess.
inline StationaryPointReport classify_point(const ProblemInstance& p,
                                            const PointZ& z,
                                            double tol = 1e-6) {
  StationaryPointReport r;
  r.z = z;
  r.grad_norm = gradient(p, z).norm();

  const HessianBlocks hb = hessian_blocks(p, z);
  r.lambda_min_x = dense_extreme_eig(hb.xx, Extreme::Min).eigenvalue;
  r.lambda_max_y = dense_extreme_eig(hb.yy, Extreme::Max).eigenvalue;
  r.margin_x = r.lambda_min_x;
  r.margin_y = -r.lambda_max_y;

  Mat j(p.k + p.d, p.k + p.d);
  j.topLeftCorner(p.k, p.k) = -hb.xx;
  j.topRightCorner(p.k, p.d) = -hb.xy;
  j.bottomLeftCorner(p.d, p.k) = hb.xy.transpose();
  j.bottomRightCorner(p.d, p.d) = hb.yy;
  Eigen::EigenSolver<Mat> es(j);
  for (int i = 0; i < j.rows(); ++i) r.jacobian_eigs.push_back(es.eigenvalues()[i]);

  if (r.grad_norm >= tol) {
    r.verdict = Verdict::NotStationary;
    return r;
  }
  if (std::abs(r.lambda_min_x) <= tol || std::abs(r.lambda_max_y) <= tol) {
    r.verdict = Verdict::Degenerate;
    return r;
  }
  if (r.lambda_min_x > tol && r.lambda_max_y < -tol) {
    r.verdict = Verdict::LocallyOptimalSaddle;
    return r;
  }
  double max_re = -std::numeric_limits<double>::infinity();
  for (const auto& ev : r.jacobian_eigs) max_re = std::max(max_re, ev.real());
  if (std::abs(max_re) <= tol) {
    r.verdict = Verdict::Degenerate;
  } else if (max_re < -tol) {
    r.verdict = Verdict::StableUndesired;
  } else {
    r.verdict = Verdict::UnstableStationary;
  }
  return r;
}

/// True iff every eigenvalue of A_z * J(z) has real part below -tol, where
/// A_z is the positive block-diagonal transform given by its diagonals.
inline bool transformed_stability_check(const ProblemInstance& p,
                                        const PointZ& z, const Vec& diag_x,
                                        const Vec& diag_y, double tol) {
  if (diag_x.size() != p.k || diag_y.size() != p.d) {
    throw ShapeError("transform diagonal has wrong dimensions");
  }
  if (diag_x.minCoeff() <= 0.0 || diag_y.minCoeff() <= 0.0) {
    throw PreconditionError("transform diagonal must be positive");
  }
  const Mat j = dynamics_jacobian(p, z);
  Vec diag(p.k + p.d);
  diag << diag_x, diag_y;
  const Mat aj = diag.asDiagonal() * j;
  Eigen::EigenSolver<Mat> es(aj);
  double max_re = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < aj.rows(); ++i) {
    max_re = std::max(max_re, es.eigenvalues()[i].real());
  }
  return max_re < -tol;
}

struct EscapeCheckResult {
  double gamma = 0.0;
  PointZ z0;        ///< probe start inside the gamma ball
  PointZ z1;        ///< iterate after one curvature-exploiting step
  bool escaped = false;  ///< ||z1 - z_star|| >= gamma
};

/// Samples probes uniformly in the gamma-ball around an undesired
/// stationary point and applies one curvature-exploiting step to each.
/// Requires z_star to be stationary with a nonzero extreme curvature
/// direction; a locally optimal saddle is rejected.
inline std::vector<EscapeCheckResult> escape_check(const ProblemInstance& p,
                                                   const PointZ& z_star,
                                                   double gamma, int n_probes,
                                                   const OptimizerConfig& cfg) {
  p.check_point_shape(z_star);
  if (p.grad(z_star).norm() >= 1e-6) {
    throw PreconditionError("escape_check: z_star is not stationary");
  }
  const ExtremeCurvature v_star =
      extreme_curvature(p, z_star, cfg.curvature_method, cfg.power_cfg,
                        cfg.rho_x, cfg.rho_y);
  if (v_star.norm() <= 0.0) {
    throw PreconditionError(
        "escape_check: extreme curvature vanishes at z_star (locally optimal)");
  }

  Rng rng(cfg.seed);
  std::vector<EscapeCheckResult> results;
  results.reserve(n_probes);
  for (int i = 0; i < n_probes; ++i) {
    const Vec delta = rng.ball_vec(p.k + p.d, gamma);
    EscapeCheckResult res;
    res.gamma = gamma;
    res.z0 = z_star + PointZ::from_joined(delta, p.k);
    OptimizerConfig probe_cfg = cfg;
    probe_cfg.seed = mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(i));
    OptimizerState s = make_state(p, res.z0, probe_cfg);
    s = cesp_step(p, std::move(s), probe_cfg);
    res.z1 = s.z;
    res.escaped = (res.z1 - z_star).norm() >= gamma;
    results.push_back(std::move(res));
  }
  return results;
}

/// Radius of the ball around a locally optimal saddle inside which the
/// extreme curvature direction provably vanishes:
///   min( mu_x / (sqrt2 rho_x), mu_y / (sqrt2 rho_y) ).
/// rho overrides <= 0 use the problem's declared constants.
inline double curvature_free_radius(const ProblemInstance& p,
                                    const PointZ& z_star, double rho_x = 0.0,
                                    double rho_y = 0.0) {
  const StationaryPointReport rep = classify_point(p, z_star);
  if (rep.verdict != Verdict::LocallyOptimalSaddle) {
    throw PreconditionError(
        "curvature_free_radius: point is not a locally optimal saddle");
  }
  if (rho_x <= 0.0) rho_x = p.constants.lip_hess_x;
  if (rho_y <= 0.0) rho_y = p.constants.lip_hess_y;
  const double s2 = std::sqrt(2.0);
  return std::min(rep.margin_x / (s2 * rho_x), rep.margin_y / (s2 * rho_y));
}

/// Rectangular cell grid; trajectories and scans sample cell centers.
struct GridSpec {
  double x_min = -4.0, x_max = 4.0;
  double y_min = -4.0, y_max = 4.0;
  int nx = 161, ny = 161;

  double cell_w() const { return (x_max - x_min) / nx; }
  double cell_h() const { return (y_max - y_min) / ny; }
  double center_x(int ix) const { return x_min + (ix + 0.5) * cell_w(); }
  double center_y(int iy) const { return y_min + (iy + 0.5) * cell_h(); }
  long cell_count() const { return static_cast<long>(nx) * ny; }
};

struct ScanCell {
  int ix = 0, iy = 0;
  double cx = 0.0, cy = 0.0;
  double gda_disp = 0.0;   ///< one-step displacement of the plain update
  double cesp_disp = 0.0;  ///< one-step displacement with curvature
  Verdict center_verdict = Verdict::NotStationary;
  bool stationary = false;  ///< a zero of grad f was refined inside the cell
  double refined_x = std::numeric_limits<double>::quiet_NaN();
  double refined_y = std::numeric_limits<double>::quiet_NaN();
  Verdict refined_verdict = Verdict::NotStationary;
  double refined_cesp_disp = std::numeric_limits<double>::quiet_NaN();
};

struct ScanReport {
  GridSpec grid;
  double fixed_tol = 1e-9;
  std::vector<ScanCell> cells;  // row-major, iy * nx + ix
  std::vector<long> gda_stationary_cells;
  std::vector<long> cesp_fixed_cells;
  std::vector<long> locally_optimal_cells;
  std::vector<long> stable_undesired_cells;  ///< stable for the gradient dynamics, not optimal
  bool sets_equal = false;
};

namespace detail {

/// Newton iteration on grad f = 0 from the cell center; accepts only a
/// root that lands strictly inside the (half-open) cell, so each critical
/// point is claimed by exactly one cell.
inline bool refine_stationary_in_cell(const ProblemInstance& p,
                                      const GridSpec& grid, int ix, int iy,
                                      PointZ& out) {
  Vec z(2);
  z << grid.center_x(ix), grid.center_y(iy);
  const double span = std::max(grid.cell_w(), grid.cell_h());
  const Vec center = z;
  for (int it = 0; it < 40; ++it) {
    const PointZ zp = PointZ::from_joined(z, p.k);
    const Vec g = p.grad(zp).joined();
    if (g.norm() < 1e-13) break;
    const HessianBlocks hb = raw_hessian_blocks(p, zp);
    Mat h(2, 2);
    h(0, 0) = hb.xx(0, 0);
    h(0, 1) = hb.xy(0, 0);
    h(1, 0) = hb.xy(0, 0);
    h(1, 1) = hb.yy(0, 0);
    const double det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
    if (std::abs(det) < 1e-12) return false;
    Vec delta(2);
    delta << (-g[0] * h(1, 1) + g[1] * h(0, 1)) / det,
        (-g[1] * h(0, 0) + g[0] * h(1, 0)) / det;
    z += delta;
    if ((z - center).lpNorm<Eigen::Infinity>() > 2.0 * span) return false;
  }
  const PointZ zp = PointZ::from_joined(z, p.k);
  if (p.grad(zp).joined().norm() >= 1e-13) return false;
  const double x_lo = grid.x_min + ix * grid.cell_w();
  const double y_lo = grid.y_min + iy * grid.cell_h();
  if (!(z[0] >= x_lo && z[0] < x_lo + grid.cell_w() && z[1] >= y_lo &&
        z[1] < y_lo + grid.cell_h())) {
    return false;
  }
  out = zp;
  return true;
}

}  // namespace detail

/// Grid enumeration comparing the stationary sets of the plain and the
/// curvature-exploiting dynamics on a 2-D problem. Critical points rarely
/// sit exactly on cell centers, so each cell is additionally probed with a
/// Newton refinement; a cell "contains" a stationary point when the
/// refinement converges inside it.
///
/// The report asserts that the cells containing fixed points of the
/// curvature-exploiting update coincide with the cells whose refined point
/// classifies as a locally optimal saddle, and lists the stable-but-not-
/// optimal cells of the plain dynamics.
inline ScanReport stationarity_equivalence_scan(const ProblemInstance& p,
                                                const GridSpec& grid,
                                                double tol,
                                                const OptimizerConfig& cfg) {
  if (p.k != 1 || p.d != 1) {
    throw PreconditionError("stationarity scan requires a 2-D problem");
  }
  ScanReport rep;
  rep.grid = grid;
  rep.cells.resize(grid.cell_count());

  OptimizerConfig quiet = cfg;
  quiet.noise_sigma = 0.0;

  parallel_for(grid.cell_count(), [&](long idx) {
    const int ix = static_cast<int>(idx % grid.nx);
    const int iy = static_cast<int>(idx / grid.nx);
    ScanCell cell;
    cell.ix = ix;
    cell.iy = iy;
    cell.cx = grid.center_x(ix);
    cell.cy = grid.center_y(iy);
    PointZ center = PointZ::zero(1, 1);
    center.x[0] = cell.cx;
    center.y[0] = cell.cy;

    OptimizerConfig cell_cfg = quiet;
    cell_cfg.seed = mix_seed(quiet.seed, static_cast<std::uint64_t>(idx));
    OptimizerState s0 = make_state(p, center, cell_cfg);
    cell.gda_disp = (gda_step(p, s0, cell_cfg).z - center).norm();
    cell.cesp_disp = (cesp_step(p, s0, cell_cfg).z - center).norm();
    cell.center_verdict = classify_point(p, center, tol).verdict;

    PointZ refined;
    if (detail::refine_stationary_in_cell(p, grid, ix, iy, refined)) {
      cell.stationary = true;
      cell.refined_x = refined.x[0];
      cell.refined_y = refined.y[0];
      cell.refined_verdict = classify_point(p, refined, tol).verdict;
      OptimizerState sr = make_state(p, refined, cell_cfg);
      cell.refined_cesp_disp = (cesp_step(p, sr, cell_cfg).z - refined).norm();
    }
    rep.cells[idx] = std::move(cell);
  });

  for (long idx = 0; idx < grid.cell_count(); ++idx) {
    const ScanCell& cell = rep.cells[idx];
    if (!cell.stationary) continue;
    rep.gda_stationary_cells.push_back(idx);
    if (cell.refined_cesp_disp < rep.fixed_tol) rep.cesp_fixed_cells.push_back(idx);
    if (cell.refined_verdict == Verdict::LocallyOptimalSaddle) {
      rep.locally_optimal_cells.push_back(idx);
    }
    if (cell.refined_verdict == Verdict::StableUndesired) {
      rep.stable_undesired_cells.push_back(idx);
    }
  }
  rep.sets_equal = rep.cesp_fixed_cells == rep.locally_optimal_cells;
  return rep;
}

}  // namespace curvex
