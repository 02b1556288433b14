#include "dynkin/bsde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "dynkin/stats.hpp"

namespace dynkin {

namespace {

double effectiveRate(const GameSpec& game) {
  return game.mode() == ConstraintMode::Common ? game.signalRate() + game.discount()
                                               : 2.0 * game.signalRate() + game.discount();
}

}  // namespace

TruncationRun solveTruncated(const GameSpec& game, double horizon, double timeStep,
                             const GridConfig& cfg, std::size_t sliceStride) {
  cfg.validate();
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be >= 0");
  if (!(timeStep > 0.0)) throw ConfigError("time step must be positive");
  if (horizon > 0.0 && timeStep > horizon) throw ConfigError("time step exceeds the horizon");
  if (sliceStride == 0) throw ConfigError("slice stride must be positive");

  const std::size_t n = cfg.nodes();
  TruncationRun run;
  run.horizon = horizon;
  run.spaceGrid = cfg;
  if (horizon == 0.0) {
    run.timeStep = timeStep;
    run.times = {0.0};
    run.surface = {std::vector<double>(n, 0.0)};
    return run;
  }

  const auto steps = static_cast<std::size_t>(std::ceil(horizon / timeStep - 1e-9));
  const double dt = horizon / static_cast<double>(steps);
  run.timeStep = dt;

  std::vector<double> l(n), u(n);
  for (std::size_t j = 0; j < n; ++j) {
    l[j] = game.lower().valueUnchecked(cfg.node(j));
    u[j] = game.upper().valueUnchecked(cfg.node(j));
  }
  const Resolvent step(game.diffusion(), 1.0 / dt + effectiveRate(game), cfg,
                       effectiveRate(game));

  std::vector<double> w(n, 0.0), rhs(n), next(n);
  // Stored backwards from t = horizon, reversed at the end.
  run.times.push_back(horizon);
  run.surface.push_back(w);
  for (std::size_t i = steps; i-- > 0;) {
    driverSerial(game.mode(), game.signalRate(), l, u, w, rhs);
    for (std::size_t j = 0; j < n; ++j) rhs[j] += w[j] / dt;
    step.apply(rhs, next);
    w.swap(next);
    if (i == 0 || (steps - i) % sliceStride == 0) {
      run.times.push_back(i == 0 ? 0.0 : static_cast<double>(i) * dt);
      run.surface.push_back(w);
    }
  }
  std::reverse(run.times.begin(), run.times.end());
  std::reverse(run.surface.begin(), run.surface.end());
  return run;
}

mc::SimulationEstimate checkDPE(const GameSpec& game, const ValueGrid& value, double x,
                                std::uint64_t nPaths, std::uint64_t seed) {
  const GridConfig& cfg = value.config();
  if (!(x > cfg.domainLo && x < cfg.domainHi))
    throw DomainError("DPE check point must be interior to the grid");
  if (nPaths == 0) throw InvalidParameters("need at least one path");
  const bool common = value.mode() == ConstraintMode::Common;
  const double lam = game.signalRate();
  const double r = game.discount();
  const DiffusionSpec& X = game.diffusion();

  auto fn = [&](std::uint64_t p, std::span<double> out) {
    mc::SignalStream signal(lam, common ? mc::SignalRole::CommonBoth
                                        : mc::SignalRole::MergedTwoColor,
                            seed, p);
    rng::CounterStream gauss(seed, p, rng::Channel::Gaussian);
    std::normal_distribution<double> normal;
    const double t = signal.next().time;
    const double y = X.transition(x, t, normal(gauss));
    const double lv = game.lower().valueUnchecked(y);
    const double uv = game.upper().valueUnchecked(y);
    const double v = value.interpolate(y);
    const double g = common ? std::max(lv, std::min(v, uv))
                            : 0.5 * (std::max(lv, v) + std::min(v, uv));
    out[0] = std::exp(-r * t) * g;
  };
  const std::vector<Moments> m = runPathsParallel(nPaths, 1, fn);
  mc::SimulationEstimate est;
  est.mean = m[0].mean;
  est.stderror = m[0].stderror();
  est.nPaths = nPaths;
  est.seed = seed;
  est.horizonCap = kInf;
  est.truncationBias = 0.0;
  return est;
}

std::vector<ConvergencePoint> convergenceStudy(const GameSpec& game, const ValueGrid& stationary,
                                               const std::vector<double>& horizons,
                                               double timeStep) {
  std::vector<ConvergencePoint> out;
  const std::vector<double>& v = stationary.values();
  for (double k : horizons) {
    const auto start = std::chrono::steady_clock::now();
    // Only w(0, .) is needed, so skip every intermediate slice.
    const TruncationRun run =
        solveTruncated(game, k, timeStep, stationary.config(), static_cast<std::size_t>(-1));
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    double err = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j)
      err = std::max(err, std::abs(run.initial()[j] - v[j]));
    out.push_back({k, err, elapsed.count()});
  }
  return out;
}

bool strictlyDecreasing(const std::vector<ConvergencePoint>& points) {
  for (std::size_t i = 1; i < points.size(); ++i)
    if (!(points[i].supError < points[i - 1].supError)) return false;
  return true;
}

}  // namespace dynkin
