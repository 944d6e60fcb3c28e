#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "curvex/analysis.hpp"
#include "curvex/dynamics.hpp"
#include "curvex/parallel.hpp"
#include "curvex/rng.hpp"
#include "curvex/types.hpp"

namespace curvex {

/// Basin-of-attraction raster: one trajectory per cell center, labeled with
/// the id of the attractor its terminal iterate lands on.
struct BasinRaster {
  static constexpr int kUnresolved = -1;

  GridSpec grid;
  std::vector<int> labels;  ///< row-major iy * nx + ix; kUnresolved if none
  std::vector<PointZ> attractors;
  double match_radius = 1e-2;

  int label_at(int ix, int iy) const {
    return labels[static_cast<long>(iy) * grid.nx + ix];
  }
};

/// Runs the configured optimizer from every cell center and labels the cell
/// with the first attractor within match_radius of the terminal iterate;
/// cells that end anywhere else (including divergence) stay unresolved.
/// Per-cell seeds are derived from cfg.seed and the cell index, so parallel
/// and serial runs produce identical rasters.
inline BasinRaster basin_raster(const ProblemInstance& p,
                                const OptimizerConfig& cfg,
                                const GridSpec& grid,
                                const std::vector<PointZ>& attractors,
                                double match_radius) {
  if (p.k != 1 || p.d != 1) {
    throw PreconditionError("basin raster requires a 2-D problem");
  }
  if (attractors.empty()) throw PreconditionError("no attractors given");
  for (size_t i = 0; i < attractors.size(); ++i) {
    for (size_t j = i + 1; j < attractors.size(); ++j) {
      if ((attractors[i] - attractors[j]).norm() <= 2.0 * match_radius) {
        throw PreconditionError(
            "attractors closer than twice the match radius");
      }
    }
  }

  BasinRaster raster;
  raster.grid = grid;
  raster.attractors = attractors;
  raster.match_radius = match_radius;
  raster.labels.assign(grid.cell_count(), BasinRaster::kUnresolved);

  parallel_for(grid.cell_count(), [&](long idx) {
    const int ix = static_cast<int>(idx % grid.nx);
    const int iy = static_cast<int>(idx / grid.nx);
    PointZ z0 = PointZ::zero(1, 1);
    z0.x[0] = grid.center_x(ix);
    z0.y[0] = grid.center_y(iy);

    OptimizerConfig cell_cfg = cfg;
    cell_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(idx));
    cell_cfg.record_stride = 0;
    cell_cfg.spectrum_stride = 0;
    const TrajectoryRecord rec = run_trajectory(p, z0, cell_cfg);
    if (rec.status == RunStatus::Diverged) return;
    for (size_t a = 0; a < attractors.size(); ++a) {
      if ((rec.final_z - attractors[a]).norm() <= match_radius) {
        raster.labels[idx] = static_cast<int>(a);
        return;
      }
    }
  });
  return raster;
}

}  // namespace curvex
