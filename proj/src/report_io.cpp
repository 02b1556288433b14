#include "dynkin/report_io.hpp"

#include <fstream>
#include <iomanip>

namespace dynkin {

namespace {

std::ofstream openCsv(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << std::setprecision(17);
  return os;
}

const char* toString(mc::Player p) { return p == mc::Player::Sup ? "sup" : "inf"; }

}  // namespace

Json toJson(const GameSolution& sol) {
  const GridConfig& c = sol.value.config();
  return {{"mode", toString(sol.value.mode())},
          {"grid", {{"lo", c.domainLo}, {"hi", c.domainHi}, {"h", c.step}}},
          {"values", sol.value.values()},
          {"A", toJson(sol.sets.supSet)},
          {"B", toJson(sol.sets.infSet)},
          {"iterations", sol.iterations},
          {"finalChange", sol.finalChange}};
}

void writeSolutionCsv(const GameSolution& sol, const GameSpec& game, const std::string& path) {
  std::ofstream os = openCsv(path);
  os << "x,v,l,u,inA,inB\n";
  const ValueGrid& g = sol.value;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.x(i);
    os << x << ',' << g.values()[i] << ',' << game.lower().valueUnchecked(x) << ','
       << game.upper().valueUnchecked(x) << ',' << int(sol.sets.supSet.contains(x)) << ','
       << int(sol.sets.infSet.contains(x)) << '\n';
  }
}

Json toJson(const closedform::ClosedFormSolution& s) {
  return {{"r", s.r},         {"lambda", s.lambda}, {"theta", s.theta}, {"phi", s.phi},
          {"eps", s.eps},     {"epsLowerBound", closedform::epsLowerBound(s.theta, s.phi)},
          {"xStar", s.xStar}, {"A", s.coeffA},      {"B", s.coeffB},    {"C", s.coeffC},
          {"D", s.coeffD},    {"V0", closedform::evalV(s, 0.0)}};
}

Json toJson(const closedform::DiagnosticsReport& d) {
  return {{"gridStep", d.gridStep},
          {"range", d.range},
          {"rootResidual", d.rootResidual},
          {"valueAtXStarError", d.valueAtXStarError},
          {"signsOk", d.signsOk},
          {"evennessError", d.evennessError},
          {"monotoneViolation", d.monotoneViolation},
          {"c1MismatchAtOne", d.c1MismatchAtOne},
          {"c1MismatchAtXStar", d.c1MismatchAtXStar},
          {"maxHjbResidual", d.maxHjbResidual},
          {"orderingFailures", d.orderingFailures},
          {"orderingMinMargin", d.orderingMinMargin},
          {"passed", d.passed()}};
}

Json toJson(const TransferVerdict& t) {
  Json w = Json::array();
  for (const Witness& x : t.witnesses)
    w.push_back({{"condition", x.condition}, {"lo", x.lo}, {"hi", x.hi}, {"worst", x.worst}});
  Json j = {{"mode", toString(t.mode)},
            {"transfers", t.transfers},
            {"conditions",
             {{"vl_le_u", t.vlLeU}, {"disjoint", t.disjoint}, {"no_vlu_chain", t.noChain}}},
            {"corollaryConsistent", t.corollaryConsistent},
            {"witnesses", w}};
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

Json toJson(const mc::SimulationEstimate& e) {
  return {{"mean", e.mean},
          {"stderr", e.stderror},
          {"nPaths", e.nPaths},
          {"seed", e.seed},
          {"horizonCap", finiteOrNull(e.horizonCap)},
          {"truncationBias", e.truncationBias}};
}

Json toJson(const CrossReport& rep) {
  return {{"common", toJson(rep.commonVerdict)},
          {"independent", toJson(rep.independentVerdict)},
          {"supDiff", rep.supDiff},
          {"maxExcess", rep.maxExcess},
          {"maxExcessAt", rep.maxExcessAt},
          {"witnessX", rep.witnessX},
          {"vCommon", rep.vCommon},
          {"vIndependent", rep.vIndependent},
          {"commonSetsUnderIndependent", toJson(rep.commonSetsUnderIndependent)},
          {"independentSetsUnderCommon", toJson(rep.independentSetsUnderCommon)},
          {"witnessConfirmed", rep.witnessConfirmed},
          {"transplantAgrees", rep.transplantAgrees}};
}

Json toJson(const mc::CouplingReport& c) {
  return {{"nSamples", c.nSamples}, {"seed", c.seed},
          {"timeKs", c.timeKs},     {"timePValue", c.timePValue},
          {"stateKs", c.stateKs},   {"statePValue", c.statePValue},
          {"corrupted", c.corrupted}};
}

Json toJson(const mc::DeviationReport& d) {
  Json rows = Json::array();
  for (const auto& r : d.results)
    rows.push_back({{"id", r.id},
                    {"player", toString(r.deviation.player)},
                    {"kind", mc::toString(r.deviation.kind)},
                    {"amount", r.deviation.amount},
                    {"mean", r.mean},
                    {"stderr", r.stderror},
                    {"diffMean", r.diffMean},
                    {"diffStderr", r.diffStderror},
                    {"pooledSE", r.pooledSE},
                    {"violation", r.violation}});
  return {{"x0", d.x0},
          {"mode", toString(d.mode)},
          {"nPaths", d.nPaths},
          {"seed", d.seed},
          {"optimalMean", d.optimalMean},
          {"optimalStderr", d.optimalStderror},
          {"violations", d.violations()},
          {"deviations", rows}};
}

void writeDeviationCsv(const mc::DeviationReport& d, const std::string& path) {
  std::ofstream os = openCsv(path);
  os << "deviationId,player,shift,mean,stderr\n";
  for (const auto& r : d.results)
    os << r.id << ',' << toString(r.deviation.player) << ',' << mc::toString(r.deviation.kind)
       << ':' << r.deviation.amount << ',' << r.mean << ',' << r.stderror << '\n';
}

void writeConvergenceCsv(const std::vector<ConvergencePoint>& points, const std::string& path) {
  std::ofstream os = openCsv(path);
  os << "k,supError,runtimeSeconds\n";
  for (const auto& p : points) os << p.horizon << ',' << p.supError << ',' << p.runtimeSeconds << '\n';
}

}  // namespace dynkin
