#pragma once

#include <cstdint>
#include <vector>

#include "dynkin/model.hpp"
#include "dynkin/montecarlo.hpp"
#include "dynkin/solver.hpp"

namespace dynkin {

/// Backward-Euler solution of the truncated problem on [0, horizon] with
/// w(horizon, .) = 0. Slices are kept every sliceStride steps; the first and
/// last slice (t = 0 and t = horizon) are always kept.
struct TruncationRun {
  double horizon = 0.0;
  double timeStep = 0.0;
  GridConfig spaceGrid;
  std::vector<double> times;                 // increasing, times.front() == 0
  std::vector<std::vector<double>> surface;  // surface[i] = w(times[i], .)

  const std::vector<double>& initial() const { return surface.front(); }
  const std::vector<double>& terminal() const { return surface.back(); }
};

// Semi-implicit stepping: (1/dt + rate - L_h) w_i = w_{i+1}/dt + g(w_{i+1}),
// with rate and driver g chosen by game.mode(). A horizon that is not a
// multiple of timeStep is split into ceil(horizon/timeStep) equal steps.
TruncationRun solveTruncated(const GameSpec& game, double horizon, double timeStep,
                             const GridConfig& cfg, std::size_t sliceStride = 1);

// One-signal dynamic programming check: estimates
//   E^x[e^{-r T} max(l, min(v, u))(X_T)],  T ~ Exp(lambda)       (common)
//   E^x[e^{-r T} (max(l, v) + min(v, u))(X_T) / 2],  T ~ Exp(2 lambda)  (independent)
// with v read from `value` by interpolation.
mc::SimulationEstimate checkDPE(const GameSpec& game, const ValueGrid& value, double x,
                                std::uint64_t nPaths, std::uint64_t seed);

struct ConvergencePoint {
  double horizon = 0.0;
  double supError = 0.0;
  double runtimeSeconds = 0.0;
};

// sup over the grid of |w_k(0, .) - stationary| for each horizon k.
std::vector<ConvergencePoint> convergenceStudy(const GameSpec& game, const ValueGrid& stationary,
                                               const std::vector<double>& horizons,
                                               double timeStep);

bool strictlyDecreasing(const std::vector<ConvergencePoint>& points);

}  // namespace dynkin
