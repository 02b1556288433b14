#pragma once

#include <random>

#include "dynkin/closedform.hpp"
#include "dynkin/model.hpp"
#include "dynkin/solver.hpp"

namespace fixtures {

using namespace dynkin;

// Reference values from tests/oracles/golden.py (50-digit arithmetic).
inline constexpr double kEpsBound = 2.4669845465021580106;
inline constexpr double kXStar = 1.6485654127949283844;
inline constexpr double kA = -0.061666947703474742795;
inline constexpr double kB = -0.00038303512349951590907;
inline constexpr double kC = 1.6317041484076589195;
inline constexpr double kD = 1.0292583272547780819;
inline constexpr double kV0 = 0.43833305229652525721;
inline constexpr double kV1 = 0.26799687506770768009;
inline constexpr double kV12 = 0.19380259699107062267;
inline constexpr double kV3 = 0.014790026435372130704;
inline constexpr double kShoulderValue = 0.12598635779233403368;
// lambda R_{lambda + r} 1[-1,1] at 0 for standard BM, lambda = r = 1.
inline constexpr double kFirstSignalValue = 0.43233235838169365405;

inline const closedform::ClosedFormSolution& explicitSolution() {
  static const auto sol = closedform::buildSolution(1.0, 1.0, 9.0);
  return sol;
}

inline GameSpec exampleGame(ConstraintMode mode = ConstraintMode::Common) {
  return closedform::exampleGame(explicitSolution(), mode);
}

inline const closedform::CounterexamplePayoffs& counterexample() {
  static const auto p =
      closedform::buildCounterexamplePayoffs(explicitSolution(), (kXStar - 1.0) / 4.0);
  return p;
}

inline GameSpec counterexampleGame(ConstraintMode mode = ConstraintMode::Common) {
  return closedform::counterexampleGame(explicitSolution(), counterexample(), mode);
}

// Closed-form optimal sets: A = [-1, 1], B = [-x*, -1) u (1, x*].
inline StoppingSets closedFormSets() {
  const double xs = explicitSolution().xStar;
  return {IntervalUnion({{-1.0, 1.0, true, true}}),
          IntervalUnion({{-xs, -1.0, true, false}, {1.0, xs, false, true}})};
}

inline GridConfig grid(double lo, double hi, double h) {
  GridConfig c;
  c.domainLo = lo;
  c.domainHi = hi;
  c.step = h;
  return c;
}

inline GameSpec zeroGame(ConstraintMode mode = ConstraintMode::Common) {
  return GameSpec(DiffusionSpec::brownian(), FunctionSpec::constant(0.0),
                  FunctionSpec::constant(0.0), 1.0, 1.0, mode);
}

// Random non-negative piecewise payoff with breakpoints inside [lo, hi].
inline FunctionSpec randomPayoff(std::mt19937_64& gen, double lo, double hi) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int cells = 1 + static_cast<int>(gen() % 5);
  std::vector<double> bps;
  for (int i = 1; i < cells; ++i) bps.push_back(lo + (hi - lo) * i / cells + 0.01 * U(gen));
  std::vector<Piece> pieces;
  for (int i = 0; i < cells; ++i) {
    switch (gen() % 3) {
      case 0: pieces.emplace_back(Constant{2.0 * U(gen)}); break;
      case 1: pieces.emplace_back(PositivePartAffine{U(gen) - 0.5, U(gen)}); break;
      default: pieces.emplace_back(Tabulated{{lo, 0.5 * (lo + hi), hi}, {U(gen), U(gen), U(gen)}});
    }
  }
  return FunctionSpec(bps, pieces);
}

inline double supNorm(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace fixtures
