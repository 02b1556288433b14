#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dynkin/model.hpp"
#include "dynkin/montecarlo.hpp"
#include "dynkin/solver.hpp"

namespace dynkin {

// A maximal run of grid nodes on which a transfer condition fails.
struct Witness {
  std::string condition;  // "vl_le_u", "no_vlu_chain" or "disjoint"
  double lo = 0.0;
  double hi = 0.0;
  double worst = 0.0;  // largest violation on the run
};

struct TransferVerdict {
  ConstraintMode mode = ConstraintMode::Common;
  bool transfers = false;
  bool vlLeU = false;     // min(v, l) <= u + tol at every node
  bool disjoint = false;  // A and B do not intersect
  bool noChain = false;   // {v > l > u} is empty on the grid
  // Common: disjoint <=> vlLeU.  Independent: (disjoint && noChain) => vlLeU.
  bool corollaryConsistent = false;
  std::vector<Witness> witnesses;
  std::string note;
};

TransferVerdict checkCommonToIndependent(const GameSolution& sol, const FunctionSpec& l,
                                         const FunctionSpec& u);
TransferVerdict checkIndependentToCommon(const GameSolution& sol, const FunctionSpec& l,
                                         const FunctionSpec& u);

struct CrossReport {
  CrossReport(GameSolution c, GameSolution i) : common(std::move(c)), independent(std::move(i)) {}

  GameSolution common;
  GameSolution independent;
  TransferVerdict commonVerdict;
  TransferVerdict independentVerdict;
  // Over the middle half of the grid.
  double supDiff = 0.0;
  double maxExcess = 0.0;  // max of v^C - v^I
  double maxExcessAt = 0.0;

  double witnessX = 0.0;
  double vCommon = 0.0;
  double vIndependent = 0.0;
  mc::SimulationEstimate commonSetsUnderIndependent;
  mc::SimulationEstimate independentSetsUnderCommon;
  // J^I(A^C, B^C)(witnessX) < v^C(witnessX) - 3 SE; only checked when the
  // common verdict fails.
  bool witnessConfirmed = false;
  // Both transplants within 3 SE + transplantTolerance of the solved values.
  bool transplantAgrees = false;
};

inline constexpr double kTransplantTolerance = 5e-3;

CrossReport crossValidate(const GameSpec& game, const GridConfig& cfg, std::uint64_t nPaths,
                          std::uint64_t seed);

}  // namespace dynkin
