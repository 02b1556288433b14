#include "dynkin/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace dynkin {

namespace {

// Appends one witness per maximal run of nodes with violation(i) > 0.
void collectRuns(const ValueGrid& grid, const std::string& condition,
                 const std::function<double(std::size_t)>& violation,
                 std::vector<Witness>& out) {
  bool open = false;
  Witness w;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = violation(i);
    if (v > 0.0) {
      if (!open) {
        w = {condition, grid.x(i), grid.x(i), v};
        open = true;
      }
      w.hi = grid.x(i);
      w.worst = std::max(w.worst, v);
    } else if (open) {
      out.push_back(w);
      open = false;
    }
  }
  if (open) out.push_back(w);
}

TransferVerdict baseVerdict(const GameSolution& sol, const FunctionSpec& l,
                            const FunctionSpec& u) {
  const ValueGrid& g = sol.value;
  const std::vector<double>& v = g.values();
  TransferVerdict t;
  t.mode = g.mode();
  const std::size_t before = t.witnesses.size();
  collectRuns(g, "vl_le_u", [&](std::size_t i) {
    const double x = g.x(i);
    return std::min(v[i], l.valueUnchecked(x)) - u.valueUnchecked(x) - kSetTolerance;
  }, t.witnesses);
  t.vlLeU = t.witnesses.size() == before;

  const std::size_t beforeChain = t.witnesses.size();
  collectRuns(g, "no_vlu_chain", [&](std::size_t i) {
    const double x = g.x(i);
    const double lv = l.valueUnchecked(x);
    return std::min(v[i] - lv, lv - u.valueUnchecked(x)) - kSetTolerance;
  }, t.witnesses);
  t.noChain = t.witnesses.size() == beforeChain;

  t.disjoint = !sol.sets.supSet.intersects(sol.sets.infSet);
  if (!t.disjoint) {
    for (const Interval& a : sol.sets.supSet.parts())
      for (const Interval& b : sol.sets.infSet.parts())
        if (a.intersects(b))
          t.witnesses.push_back(
              {"disjoint", std::max(a.lo, b.lo), std::min(a.hi, b.hi), 0.0});
  }
  t.transfers = t.vlLeU;
  return t;
}

}  // namespace

TransferVerdict checkCommonToIndependent(const GameSolution& sol, const FunctionSpec& l,
                                         const FunctionSpec& u) {
  if (sol.value.mode() != ConstraintMode::Common)
    throw InvalidParameters("checkCommonToIndependent needs a common-mode solution");
  TransferVerdict t = baseVerdict(sol, l, u);
  t.corollaryConsistent = t.disjoint == t.vlLeU;
  if (!t.corollaryConsistent)
    t.note = "set disjointness and the order condition disagree on this grid";
  return t;
}

TransferVerdict checkIndependentToCommon(const GameSolution& sol, const FunctionSpec& l,
                                         const FunctionSpec& u) {
  if (sol.value.mode() != ConstraintMode::Independent)
    throw InvalidParameters("checkIndependentToCommon needs an independent-mode solution");
  TransferVerdict t = baseVerdict(sol, l, u);
  t.corollaryConsistent = !(t.disjoint && t.noChain) || t.vlLeU;
  if (t.disjoint && !t.noChain)
    t.note = "stopping sets are disjoint but {v > l > u} is nonempty; disjointness alone "
             "does not transfer the value";
  return t;
}

CrossReport crossValidate(const GameSpec& game, const GridConfig& cfg, std::uint64_t nPaths,
                          std::uint64_t seed) {
  const GameSpec commonGame = game.withMode(ConstraintMode::Common);
  const GameSpec indepGame = game.withMode(ConstraintMode::Independent);
  CrossReport rep{solveCommon(commonGame, cfg), solveIndependent(indepGame, cfg)};
  rep.commonVerdict = checkCommonToIndependent(rep.common, game.lower(), game.upper());
  rep.independentVerdict = checkIndependentToCommon(rep.independent, game.lower(), game.upper());

  const std::vector<double>& vc = rep.common.value.values();
  const std::vector<double>& vi = rep.independent.value.values();
  const double quarter = 0.25 * (cfg.domainHi - cfg.domainLo);
  const double lo = cfg.domainLo + quarter;
  const double hi = cfg.domainHi - quarter;
  rep.maxExcess = -kInf;
  for (std::size_t i = 0; i < vc.size(); ++i) {
    const double x = cfg.node(i);
    if (x < lo || x > hi) continue;
    rep.supDiff = std::max(rep.supDiff, std::abs(vc[i] - vi[i]));
    if (vc[i] - vi[i] > rep.maxExcess) {
      rep.maxExcess = vc[i] - vi[i];
      rep.maxExcessAt = x;
    }
  }

  // Probe where the two values differ most; fall back to the domain centre.
  rep.witnessX = rep.commonVerdict.transfers ? 0.5 * (cfg.domainLo + cfg.domainHi)
                                             : rep.maxExcessAt;
  if (!game.diffusion().stateSpace().contains(rep.witnessX)) rep.witnessX = rep.maxExcessAt;
  rep.vCommon = rep.common.value.interpolate(rep.witnessX);
  rep.vIndependent = rep.independent.value.interpolate(rep.witnessX);

  const double cap = mc::defaultHorizon(game);
  rep.commonSetsUnderIndependent = mc::simulateGame(
      indepGame, rep.witnessX, {mc::Player::Sup, rep.common.sets.supSet},
      {mc::Player::Inf, rep.common.sets.infSet}, nPaths, cap, seed);
  rep.independentSetsUnderCommon = mc::simulateGame(
      commonGame, rep.witnessX, {mc::Player::Sup, rep.independent.sets.supSet},
      {mc::Player::Inf, rep.independent.sets.infSet}, nPaths, cap, seed + 1);

  const auto& ci = rep.commonSetsUnderIndependent;
  const auto& ic = rep.independentSetsUnderCommon;
  rep.witnessConfirmed = !rep.commonVerdict.transfers &&
                         ci.mean < rep.vCommon - 3.0 * ci.stderror;
  rep.transplantAgrees =
      std::abs(ci.mean - rep.vCommon) <=
          3.0 * ci.stderror + ci.truncationBias + kTransplantTolerance &&
      std::abs(ic.mean - rep.vIndependent) <=
          3.0 * ic.stderror + ic.truncationBias + kTransplantTolerance;
  return rep;
}

}  // namespace dynkin
