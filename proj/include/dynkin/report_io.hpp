#pragma once

#include <string>
#include <vector>

#include "dynkin/bsde.hpp"
#include "dynkin/closedform.hpp"
#include "dynkin/equivalence.hpp"
#include "dynkin/json_io.hpp"
#include "dynkin/montecarlo.hpp"
#include "dynkin/solver.hpp"

namespace dynkin {

// {mode, grid: {lo, hi, h}, values, A, B, iterations, finalChange}
Json toJson(const GameSolution& sol);
// Columns x, v, l, u, inA, inB.
void writeSolutionCsv(const GameSolution& sol, const GameSpec& game, const std::string& path);

Json toJson(const closedform::ClosedFormSolution& sol);
Json toJson(const closedform::DiagnosticsReport& d);

// {transfers, conditions: {vl_le_u, disjoint, no_vlu_chain}, witnesses: [...]}
Json toJson(const TransferVerdict& t);
Json toJson(const CrossReport& rep);

Json toJson(const mc::SimulationEstimate& e);
Json toJson(const mc::CouplingReport& c);
Json toJson(const mc::DeviationReport& d);
// Columns deviationId, player, shift, mean, stderr.
void writeDeviationCsv(const mc::DeviationReport& d, const std::string& path);

// Columns k, supError, runtimeSeconds.
void writeConvergenceCsv(const std::vector<ConvergencePoint>& points, const std::string& path);

}  // namespace dynkin
