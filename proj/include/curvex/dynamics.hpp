#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "curvex/curvature.hpp"
#include "curvex/problem.hpp"
#include "curvex/rng.hpp"
#include "curvex/spectral.hpp"
#include "curvex/types.hpp"

namespace curvex {

enum class Method { Gda, Cesp, Adagrad, AdagradCesp };

inline bool uses_curvature(Method m) {
  return m == Method::Cesp || m == Method::AdagradCesp;
}
inline bool uses_transform(Method m) {
  return m == Method::Adagrad || m == Method::AdagradCesp;
}

inline const char* to_string(Method m) {
  switch (m) {
    case Method::Gda: return "gda";
    case Method::Cesp: return "cesp";
    case Method::Adagrad: return "adagrad";
    case Method::AdagradCesp: return "adagrad-cesp";
  }
  return "unknown";
}

inline Method method_from_string(const std::string& s) {
  if (s == "gda") return Method::Gda;
  if (s == "cesp") return Method::Cesp;
  if (s == "adagrad") return Method::Adagrad;
  if (s == "adagrad-cesp") return Method::AdagradCesp;
  throw ShapeError("unknown method '" + s + "'");
}

inline const char* to_string(CurvatureMethod m) {
  return m == CurvatureMethod::Dense ? "dense" : "power";
}

inline CurvatureMethod curvature_method_from_string(const std::string& s) {
  if (s == "dense") return CurvatureMethod::Dense;
  if (s == "power") return CurvatureMethod::Power;
  throw ShapeError("unknown curvature method '" + s + "'");
}

struct OptimizerConfig {
  Method method = Method::Gda;
  double eta = 1e-3;
  long max_iters = 50000;
  double grad_tol = 1e-8;  ///< stop when ||grad f||^2 drops below this
  /// curvature methods also require ||v_z||^2 below this to stop; keeps a
  /// run from halting at a stationary point it is still escaping from,
  /// while tolerating eigenvalue jitter at the scale of differencing noise
  double curv_tol = 1e-12;
  double noise_sigma = 0.0;  ///< stddev of per-component gradient noise
  CurvatureMethod curvature_method = CurvatureMethod::Dense;
  PowerIterConfig power_cfg{};
  double epsilon_adagrad = 1e-8;
  std::uint64_t seed = 0;
  double rho_x = 0.0;  ///< curvature scale override; <= 0 uses problem constants
  double rho_y = 0.0;
  int spectrum_stride = 10;  ///< steps between spectrum refreshes; 0 disables
  long record_stride = 1;    ///< steps between recorded rows; 0 keeps only the last
};

struct OptimizerState {
  PointZ z;
  long t = 0;
  Vec accum_x;  ///< adagrad accumulator, sum of squared x gradients
  Vec accum_y;
  Rng rng{0};
};

inline OptimizerState make_state(const ProblemInstance& p, PointZ z0,
                                 const OptimizerConfig& cfg) {
  p.check_point_shape(z0);
  OptimizerState s;
  s.z = std::move(z0);
  s.accum_x = Vec::Zero(p.k);
  s.accum_y = Vec::Zero(p.d);
  s.rng = Rng(cfg.seed);
  return s;
}

/// Accumulates the squared current gradients and returns the diagonal
/// entries of the positive-definite block transform, 1/sqrt(accum + eps)
/// per coordinate.
inline std::pair<Vec, Vec> adagrad_transform(OptimizerState& state,
                                             const PointZ& grads,
                                             double epsilon) {
  state.accum_x += grads.x.cwiseProduct(grads.x);
  state.accum_y += grads.y.cwiseProduct(grads.y);
  const Vec ax = (state.accum_x.array() + epsilon).sqrt().inverse().matrix();
  const Vec by = (state.accum_y.array() + epsilon).sqrt().inverse().matrix();
  return {ax, by};
}

namespace detail {

/// One simultaneous update from the given clean gradient. Noise is applied
/// to the gradient only; the curvature direction, when present and nonzero,
/// is added unscaled. Skipping the addition for an exactly-zero curvature
/// direction keeps the step bitwise identical to the plain one.
inline OptimizerState step_core(OptimizerState s, const OptimizerConfig& cfg,
                                bool transformed, const ExtremeCurvature* curv,
                                PointZ g) {
  if (cfg.noise_sigma > 0.0) {
    for (int i = 0; i < g.x.size(); ++i) g.x[i] += cfg.noise_sigma * s.rng.normal();
    for (int i = 0; i < g.y.size(); ++i) g.y[i] += cfg.noise_sigma * s.rng.normal();
  }
  if (transformed) {
    const auto [ax, by] = adagrad_transform(s, g, cfg.epsilon_adagrad);
    s.z.x -= cfg.eta * ax.cwiseProduct(g.x);
    s.z.y += cfg.eta * by.cwiseProduct(g.y);
  } else {
    s.z.x -= cfg.eta * g.x;
    s.z.y += cfg.eta * g.y;
  }
  if (curv != nullptr && !curv->zero()) {
    s.z.x += curv->v_minus;
    s.z.y += curv->v_plus;
  }
  s.t += 1;
  return s;
}

inline PowerIterConfig power_cfg_for_step(const OptimizerConfig& cfg, long t) {
  PowerIterConfig pc = cfg.power_cfg;
  pc.seed = mix_seed(mix_seed(cfg.seed, pc.seed), static_cast<std::uint64_t>(t));
  return pc;
}

}  // namespace detail

/// Simultaneous gradient descent in x / ascent in y from the same snapshot.
inline OptimizerState gda_step(const ProblemInstance& p, OptimizerState s,
                               const OptimizerConfig& cfg) {
  PointZ g = p.grad(s.z);
  return detail::step_core(std::move(s), cfg, false, nullptr, std::move(g));
}

/// Gradient step plus the extreme curvature direction. Where the curvature
/// direction vanishes this is the plain gradient step, bit for bit.
inline OptimizerState cesp_step(const ProblemInstance& p, OptimizerState s,
                                const OptimizerConfig& cfg) {
  const ExtremeCurvature curv =
      extreme_curvature(p, s.z, cfg.curvature_method,
                        detail::power_cfg_for_step(cfg, s.t), cfg.rho_x, cfg.rho_y);
  PointZ g = p.grad(s.z);
  return detail::step_core(std::move(s), cfg, false, &curv, std::move(g));
}

/// Linear-transformed update with the adagrad diagonal; method Adagrad
/// omits the curvature term, AdagradCesp includes it.
inline OptimizerState transformed_cesp_step(const ProblemInstance& p,
                                            OptimizerState s,
                                            const OptimizerConfig& cfg) {
  PointZ g = p.grad(s.z);
  if (cfg.method == Method::Adagrad) {
    return detail::step_core(std::move(s), cfg, true, nullptr, std::move(g));
  }
  const ExtremeCurvature curv =
      extreme_curvature(p, s.z, cfg.curvature_method,
                        detail::power_cfg_for_step(cfg, s.t), cfg.rho_x, cfg.rho_y);
  return detail::step_core(std::move(s), cfg, true, &curv, std::move(g));
}

/// Dispatch on cfg.method.
inline OptimizerState step(const ProblemInstance& p, OptimizerState s,
                           const OptimizerConfig& cfg) {
  switch (cfg.method) {
    case Method::Gda:
      return gda_step(p, std::move(s), cfg);
    case Method::Cesp:
      return cesp_step(p, std::move(s), cfg);
    case Method::Adagrad:
    case Method::AdagradCesp:
      return transformed_cesp_step(p, std::move(s), cfg);
  }
  throw ShapeError("unknown method");
}

enum class RunStatus { Converged, MaxIters, Diverged };

inline const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIters: return "max_iters";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

struct TrajectoryRow {
  long t = 0;
  PointZ z;
  double f = 0.0;
  double grad_norm_sq = 0.0;
  double lambda_min_x = std::numeric_limits<double>::quiet_NaN();
  double lambda_max_y = std::numeric_limits<double>::quiet_NaN();
  double curv_norm = std::numeric_limits<double>::quiet_NaN();
};

struct TrajectoryRecord {
  std::vector<TrajectoryRow> rows;
  RunStatus status = RunStatus::MaxIters;
  PointZ final_z;
  long final_t = 0;
};

inline double gda_step_size_limit(const SmoothnessConstants& c) {
  return std::min({1.0 / c.lip_grad_x, 1.0 / c.lip_grad_y,
                   1.0 / (std::sqrt(2.0) * c.lip_grad_z)});
}

/// Runs the configured stepper until the squared gradient norm falls below
/// grad_tol (for curvature methods: and the curvature direction vanishes),
/// the iteration budget runs out, or the iterate diverges (norm > 1e6 or
/// non-finite). Deterministic given (cfg.seed, z0).
///
/// Rows are recorded every record_stride steps plus the terminal step.
/// Spectra are refreshed every spectrum_stride steps (every step for the
/// curvature methods, which compute them anyway); rows in between carry the
/// most recent values.
inline TrajectoryRecord run_trajectory(const ProblemInstance& p,
                                       const PointZ& z0,
                                       const OptimizerConfig& cfg) {
  OptimizerState s = make_state(p, z0, cfg);
  TrajectoryRecord rec;

  if ((cfg.method == Method::Gda || cfg.method == Method::Cesp) &&
      cfg.eta >= gda_step_size_limit(p.constants)) {
    std::cerr << "[curvex] warning: step size " << cfg.eta
              << " is at or above min(1/Lx, 1/Ly, 1/(sqrt2 Lz)) = "
              << gda_step_size_limit(p.constants) << " for problem '"
              << p.name << "'\n";
  }

  const bool needs_curv = uses_curvature(cfg.method);
  double last_lx = std::numeric_limits<double>::quiet_NaN();
  double last_ly = std::numeric_limits<double>::quiet_NaN();
  double last_cn = std::numeric_limits<double>::quiet_NaN();

  auto push_row = [&](double f, double gsq) {
    TrajectoryRow row;
    row.t = s.t;
    row.z = s.z;
    row.f = f;
    row.grad_norm_sq = gsq;
    row.lambda_min_x = last_lx;
    row.lambda_max_y = last_ly;
    row.curv_norm = last_cn;
    rec.rows.push_back(std::move(row));
  };

  while (true) {
    if (!s.z.all_finite() || s.z.norm() > 1e6) {
      rec.status = RunStatus::Diverged;
      push_row(std::numeric_limits<double>::quiet_NaN(),
               std::numeric_limits<double>::quiet_NaN());
      break;
    }
    const PointZ g = p.grad(s.z);
    const double gsq = g.squared_norm();
    const double f = p.value(s.z);
    if (!std::isfinite(f) || !std::isfinite(gsq)) {
      rec.status = RunStatus::Diverged;
      push_row(f, gsq);
      break;
    }

    ExtremeCurvature curv;
    bool have_curv = false;
    if (needs_curv) {
      curv = extreme_curvature(p, s.z, cfg.curvature_method,
                               detail::power_cfg_for_step(cfg, s.t), cfg.rho_x,
                               cfg.rho_y);
      have_curv = true;
      last_lx = curv.lambda_min_x;
      last_ly = curv.lambda_max_y;
      last_cn = curv.norm();
    } else if (cfg.spectrum_stride > 0 && s.t % cfg.spectrum_stride == 0) {
      const HessianBlocks hb = detail::raw_hessian_blocks(p, s.z);
      const double lx = dense_extreme_eig(hb.xx, Extreme::Min).eigenvalue;
      const double ly = dense_extreme_eig(hb.yy, Extreme::Max).eigenvalue;
      last_lx = lx;
      last_ly = ly;
      const double rx = cfg.rho_x > 0.0 ? cfg.rho_x : p.constants.lip_hess_x;
      const double ry = cfg.rho_y > 0.0 ? cfg.rho_y : p.constants.lip_hess_y;
      last_cn = std::hypot(lx < 0.0 ? lx / (2.0 * rx) : 0.0,
                           ly > 0.0 ? ly / (2.0 * ry) : 0.0);
    }

    const bool stationary =
        gsq < cfg.grad_tol &&
        (!have_curv || curv.squared_norm() < cfg.curv_tol);
    const bool budget_out = s.t >= cfg.max_iters;
    const bool record_now =
        (cfg.record_stride > 0 && s.t % cfg.record_stride == 0) || stationary ||
        budget_out;
    if (record_now) push_row(f, gsq);

    if (stationary) {
      rec.status = RunStatus::Converged;
      break;
    }
    if (budget_out) {
      rec.status = RunStatus::MaxIters;
      break;
    }
    s = detail::step_core(std::move(s), cfg, uses_transform(cfg.method),
                          have_curv ? &curv : nullptr, g);
  }

  rec.final_z = s.z;
  rec.final_t = s.t;
  return rec;
}

}  // namespace curvex
