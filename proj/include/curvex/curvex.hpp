#pragma once

// Umbrella header for the curvex saddle-point optimization toolkit.

#include "curvex/analysis.hpp"
#include "curvex/basin.hpp"
#include "curvex/curvature.hpp"
#include "curvex/dynamics.hpp"
#include "curvex/io.hpp"
#include "curvex/parallel.hpp"
#include "curvex/problem.hpp"
#include "curvex/problems.hpp"
#include "curvex/rng.hpp"
#include "curvex/spectral.hpp"
#include "curvex/types.hpp"
