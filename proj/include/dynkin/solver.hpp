#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dynkin/model.hpp"
#include "dynkin/tridiag.hpp"

namespace dynkin {

enum class BoundaryClosure { RobinDecay, DirichletZero };

const char* toString(BoundaryClosure b);
BoundaryClosure parseBoundary(const std::string& s);

struct GridConfig {
  double domainLo = -8.0;
  double domainHi = 8.0;
  double step = 1e-3;
  int maxIterations = 1000;
  double tolerance = 1e-10;
  BoundaryClosure boundary = BoundaryClosure::RobinDecay;

  // Throws ConfigError unless (hi - lo)/step is an integer >= 10.
  void validate() const;
  std::size_t nodes() const;
  double node(std::size_t i) const { return domainLo + static_cast<double>(i) * step; }
};

class ValueGrid {
 public:
  ValueGrid(GridConfig config, std::vector<double> values, ConstraintMode mode);

  const GridConfig& config() const { return config_; }
  const std::vector<double>& values() const { return values_; }
  ConstraintMode mode() const { return mode_; }
  std::size_t size() const { return values_.size(); }
  double x(std::size_t i) const { return config_.node(i); }

  // Piecewise-linear interpolation, clamped to the end values outside the grid.
  double interpolate(double x) const;

 private:
  GridConfig config_;
  std::vector<double> values_;
  ConstraintMode mode_;
};

struct GameSolution {
  ValueGrid value;
  StoppingSets sets;
  int iterations = 0;
  double finalChange = 0.0;
};

/// Discrete resolvent (rate I - L_h)^{-1} on a grid: second-order central
/// differences, upwinded drift where the cell Peclet number exceeds 2, and
/// the configured closure at both ends. The matrix is an M-matrix, so the
/// solution obeys the discrete maximum principle.
class Resolvent {
 public:
  // The Robin closure uses the decay root at closureRate (default: rate).
  // Time stepping passes the stationary rate so that the boundary rows do not
  // depend on the step size.
  Resolvent(const DiffusionSpec& diffusion, double rate, const GridConfig& cfg,
            std::optional<double> closureRate = std::nullopt);

  double rate() const { return rate_; }
  std::size_t size() const { return matrix_.size(); }
  void apply(std::span<const double> g, std::span<double> w) const;
  const Tridiagonal& matrix() const { return matrix_; }

 private:
  static Tridiagonal assemble(const DiffusionSpec& diffusion, double rate, double closureRate,
                              const GridConfig& cfg);

  double rate_;
  bool dirichletLo_;
  bool dirichletHi_;
  Tridiagonal matrix_;
};

std::vector<double> resolventApply(const DiffusionSpec& diffusion, double rate,
                                   const GridConfig& cfg, std::span<const double> g);

// Driver kernels g(v): common  lambda max(l, min(v, u));
//                      independent  lambda max(l, v) + lambda min(v, u).
// The serial versions are the reference for the OpenMP ones.
void driverSerial(ConstraintMode mode, double lambda, std::span<const double> l,
                  std::span<const double> u, std::span<const double> v, std::span<double> out);
void driverParallel(ConstraintMode mode, double lambda, std::span<const double> l,
                    std::span<const double> u, std::span<const double> v, std::span<double> out);

/// One application of the value-iteration map v -> R_rate(g(v)), where rate is
/// lambda + r (common) or 2 lambda + r (independent).
class FixedPointMap {
 public:
  FixedPointMap(const GameSpec& game, const GridConfig& cfg, ConstraintMode mode);

  void apply(std::span<const double> v, std::span<double> out) const;
  double contractionFactor() const;
  ConstraintMode mode() const { return mode_; }
  const std::vector<double>& lowerNodes() const { return l_; }
  const std::vector<double>& upperNodes() const { return u_; }
  const Resolvent& resolvent() const { return resolvent_; }

 private:
  ConstraintMode mode_;
  double lambda_;
  double discount_;
  std::vector<double> l_, u_;
  Resolvent resolvent_;
  mutable std::vector<double> scratch_;
};

GameSolution solveCommon(const GameSpec& game, const GridConfig& cfg);
GameSolution solveIndependent(const GameSpec& game, const GridConfig& cfg);
// Dispatches on game.mode().
GameSolution solve(const GameSpec& game, const GridConfig& cfg);

inline constexpr double kSetTolerance = 1e-9;

// Common:      A = {v < l} u {v > l > u},  B = {v >= u}
// Independent: A = {v < l},                B = {v >= u}
// Strict comparisons carry a margin of kSetTolerance; weak ones allow it.
bool inSupSet(ConstraintMode mode, double v, double l, double u);
bool inInfSet(double v, double u);

StoppingSets extractSets(const ValueGrid& value, const FunctionSpec& l, const FunctionSpec& u,
                         ConstraintMode mode);

}  // namespace dynkin
