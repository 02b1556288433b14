#include <omp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "dynkin/bsde.hpp"
#include "dynkin/closedform.hpp"
#include "dynkin/equivalence.hpp"
#include "dynkin/json_io.hpp"
#include "dynkin/montecarlo.hpp"
#include "dynkin/report_io.hpp"
#include "dynkin/solver.hpp"

namespace fs = std::filesystem;
using namespace dynkin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitGate = 4;

struct GridFlags {
  std::string grid = "-8,8,0.001";
  double tol = 1e-10;
  int maxIter = 1000;
  std::string boundary = "robin";

  void add(CLI::App* app) {
    app->add_option("--grid", grid, "lo,hi,h");
    app->add_option("--tol", tol, "sup-norm stopping tolerance");
    app->add_option("--max-iter", maxIter);
    app->add_option("--boundary", boundary, "robin|dirichlet");
  }

  GridConfig config() const {
    GridConfig c;
    std::stringstream ss(grid);
    std::string part;
    std::vector<double> v;
    while (std::getline(ss, part, ',')) {
      try {
        v.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw ConfigError("bad --grid value: " + grid);
      }
    }
    if (v.size() != 3) throw ConfigError("--grid expects lo,hi,h");
    c.domainLo = v[0];
    c.domainHi = v[1];
    c.step = v[2];
    c.tolerance = tol;
    c.maxIterations = maxIter;
    c.boundary = parseBoundary(boundary);
    c.validate();
    return c;
  }
};

fs::path outDir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

GameSpec loadWithMode(const std::string& config, const std::string& mode) {
  GameSpec g = loadGame(config);
  return mode.empty() ? g : g.withMode(parseMode(mode));
}

void printJson(const Json& j) { std::cout << j.dump(2) << '\n'; }

int cmdClosedForm(double r, double lambda, double eps, std::optional<double> delta,
                  const std::string& out) {
  const closedform::ClosedFormSolution sol = closedform::buildSolution(r, lambda, eps);
  const double d = delta.value_or((sol.xStar - 1.0) / 4.0);
  const closedform::CounterexamplePayoffs cex = closedform::buildCounterexamplePayoffs(sol, d);
  const closedform::DiagnosticsReport diag = closedform::verifyClosedForm(sol, 1e-3);
  const fs::path dir = outDir(out);

  Json s = toJson(sol);
  s["delta"] = d;
  s["shoulderValue"] = cex.shoulderValue;
  s["counterexampleResidualMin"] = closedform::counterexampleResidualMin(sol, cex, 1e-3);
  saveJson(s, (dir / "solution.json").string());
  saveJson(toJson(diag), (dir / "diagnostics.json").string());
  closedform::emitFigureData(sol, std::nullopt, (dir / "figure1.csv").string());
  closedform::emitFigureData(sol, cex, (dir / "figure2.csv").string());
  saveJson(toJson(closedform::exampleGame(sol, ConstraintMode::Common)),
           (dir / "fig1.json").string());
  saveJson(toJson(closedform::counterexampleGame(sol, cex, ConstraintMode::Common)),
           (dir / "fig2.json").string());
  printJson(s);
  std::cout << "diagnostics " << (diag.passed() ? "PASS" : "FAIL") << '\n';
  return diag.passed() ? kExitOk : kExitGate;
}

int cmdSolve(const std::string& config, const std::string& mode, const GridFlags& grid,
             const std::string& out) {
  const GameSpec game = loadWithMode(config, mode);
  const GameSolution sol = solve(game, grid.config());
  const fs::path dir = outDir(out);
  saveJson(toJson(sol), (dir / "solution.json").string());
  writeSolutionCsv(sol, game, (dir / "solution.csv").string());
  std::cout << "mode " << toString(game.mode()) << ", " << sol.iterations
            << " iterations, final change " << sol.finalChange << '\n'
            << "A " << toJson(sol.sets.supSet).dump() << "\nB "
            << toJson(sol.sets.infSet).dump() << '\n';
  return kExitOk;
}

int cmdSimulate(const std::string& config, const std::string& mode, const std::string& setsMode,
                const GridFlags& grid, double x0, std::uint64_t paths, std::uint64_t seed,
                std::optional<double> horizon, const std::string& out) {
  const GameSpec game = loadWithMode(config, mode);
  const GameSpec setsGame = setsMode.empty() ? game : game.withMode(parseMode(setsMode));
  const GameSolution sets = solve(setsGame, grid.config());
  const GameSolution own = setsGame.mode() == game.mode() ? sets : solve(game, grid.config());
  const mc::SimulationEstimate est = mc::simulateGame(
      game, x0, {mc::Player::Sup, sets.sets.supSet}, {mc::Player::Inf, sets.sets.infSet}, paths,
      horizon.value_or(mc::defaultHorizon(game)), seed);
  const double v = own.value.interpolate(x0);
  const bool pass =
      std::abs(est.mean - v) <= 3.0 * est.stderror + est.truncationBias + kTransplantTolerance;
  Json j = {{"x0", x0},
            {"mode", toString(game.mode())},
            {"setsFrom", toString(setsGame.mode())},
            {"estimate", toJson(est)},
            {"solvedValue", v},
            {"pass", pass}};
  saveJson(j, (outDir(out) / "report.json").string());
  printJson(j);
  return pass ? kExitOk : kExitGate;
}

int cmdCoupling(const std::string& config, const GridFlags& grid, double x0,
                std::uint64_t samples, int seeds, std::uint64_t seed, bool corrupt,
                const std::string& out) {
  const GameSpec game = loadWithMode(config, "common");
  const GameSolution sol = solveCommon(game, grid.config());
  Json rows = Json::array();
  bool allAbove = true;
  bool allBelow = true;
  for (int k = 0; k < seeds; ++k) {
    const mc::CouplingReport c = mc::couplingCheck(game, x0, sol.sets.supSet, sol.sets.infSet,
                                                   samples, seed + k, corrupt);
    rows.push_back(toJson(c));
    const double pmin = std::min(c.timePValue, c.statePValue);
    allAbove = allAbove && pmin > 0.01;
    allBelow = allBelow && pmin < 0.01;
    std::printf("seed %llu  time KS %.5f p=%.4f  state KS %.5f p=%.4f\n",
                static_cast<unsigned long long>(seed + k), c.timeKs, c.timePValue, c.stateKs,
                c.statePValue);
  }
  const bool pass = corrupt ? allBelow : allAbove;
  saveJson({{"x0", x0}, {"corrupted", corrupt}, {"runs", rows}, {"pass", pass}},
           (outDir(out) / "report.json").string());
  std::cout << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitGate;
}

int cmdDeviations(const std::string& config, const std::string& mode,
                  const std::string& setsMode, const GridFlags& grid, double x0, int count,
                  std::uint64_t paths, std::uint64_t seed, bool expectImprovement,
                  const std::string& out) {
  const GameSpec game = loadWithMode(config, mode);
  const GameSpec setsGame = setsMode.empty() ? game : game.withMode(parseMode(setsMode));
  const GameSolution sol = solve(setsGame, grid.config());
  const mc::DeviationReport rep = mc::saddleDeviationBattery(game, x0, sol, count, paths, seed);
  const fs::path dir = outDir(out);
  saveJson(toJson(rep), (dir / "report.json").string());
  writeDeviationCsv(rep, (dir / "deviations.csv").string());
  printJson(toJson(rep));
  const bool pass =
      expectImprovement ? rep.bestSupImprovementMargin() > 0.0 : rep.violations() == 0;
  std::cout << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitGate;
}

int cmdEquivalence(const std::string& config, const GridFlags& grid, std::uint64_t paths,
                   std::uint64_t seed, const std::string& out) {
  const GameSpec game = loadGame(config);
  const CrossReport rep = crossValidate(game, grid.config(), paths, seed);
  const Json j = toJson(rep);
  saveJson(j, (outDir(out) / "report.json").string());
  printJson(j);
  std::cout << "verdict " << (rep.commonVerdict.transfers ? "TRANSFERS" : "NOT-TRANSFERS")
            << '\n';
  const bool pass = rep.commonVerdict.corollaryConsistent &&
                    rep.independentVerdict.corollaryConsistent &&
                    (rep.commonVerdict.transfers ? rep.transplantAgrees : rep.witnessConfirmed);
  return pass ? kExitOk : kExitGate;
}

int cmdBsde(const std::string& config, const std::string& mode, const GridFlags& grid,
            const std::vector<double>& horizons, double dt, const std::string& out) {
  const GameSpec game = loadWithMode(config, mode);
  const GameSolution stationary = solve(game, grid.config());
  const auto points = convergenceStudy(game, stationary.value, horizons, dt);
  writeConvergenceCsv(points, (outDir(out) / "convergence.csv").string());
  for (const auto& p : points)
    std::printf("k=%-6g supError=%.3e  %.2fs\n", p.horizon, p.supError, p.runtimeSeconds);
  const bool pass = strictlyDecreasing(points);
  std::cout << (pass ? "PASS" : "FAIL") << '\n';
  return pass ? kExitOk : kExitGate;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson-constrained Dynkin games: solver, simulator and checks"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "OpenMP threads (results do not depend on it)");

  double r = 1.0, lambda = 1.0, eps = 9.0;
  std::optional<double> delta;
  std::string out = "out";
  auto* cf = app.add_subcommand("closed-form", "explicit Brownian example and counterexample");
  cf->add_option("--r", r);
  cf->add_option("--lambda", lambda);
  cf->add_option("--eps", eps);
  cf->add_option("--delta", delta);
  cf->add_option("--out", out);

  std::string config, mode, setsMode;
  GridFlags grid;
  double x0 = 0.0;
  std::uint64_t paths = 1000000, seed = 1, samples = 100000;
  std::optional<double> horizon;
  int seeds = 10, count = 5;
  bool corrupt = false, expectImprovement = false;
  std::vector<double> horizons{1, 2, 4, 8, 16};
  double dt = 1e-2;

  auto* sv = app.add_subcommand("solve", "grid value iteration");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo value of the solved hitting strategies");
  auto* cp = app.add_subcommand("coupling", "law equality of the two thinnings");
  auto* dv = app.add_subcommand("deviations", "saddle-point deviation battery");
  auto* eq = app.add_subcommand("equivalence", "transfer conditions and cross-validation");
  auto* bs = app.add_subcommand("bsde-converge", "finite-horizon truncation convergence");
  for (auto* s : {sv, sim, cp, dv, eq, bs}) {
    s->add_option("--config", config, "game JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", out);
    grid.add(s);
  }
  for (auto* s : {sv, sim, dv, bs}) s->add_option("--mode", mode, "common|independent");
  for (auto* s : {sim, dv}) s->add_option("--sets-mode", setsMode, "solve the sets in this mode");
  for (auto* s : {sim, cp, dv}) s->add_option("--x0", x0);
  for (auto* s : {sim, dv, eq}) s->add_option("--paths", paths);
  for (auto* s : {sim, cp, dv, eq}) s->add_option("--seed", seed);
  sim->add_option("--horizon", horizon, "simulation horizon cap (default 20/r)");
  cp->add_option("--samples", samples);
  cp->add_option("--seeds", seeds);
  cp->add_flag("--corrupt", corrupt, "negative control");
  dv->add_option("--count", count, "deviations per player");
  dv->add_flag("--expect-improvement", expectImprovement,
               "pass iff some sup deviation improves by more than 3 pooled SE");
  bs->add_option("--horizons", horizons)->delimiter(',');
  bs->add_option("--dt", dt);

  CLI11_PARSE(app, argc, argv);
  if (workers > 0) omp_set_num_threads(workers);

  try {
    if (*cf) return cmdClosedForm(r, lambda, eps, delta, out);
    if (*sv) return cmdSolve(config, mode, grid, out);
    if (*sim) return cmdSimulate(config, mode, setsMode, grid, x0, paths, seed, horizon, out);
    if (*cp) return cmdCoupling(config, grid, x0, samples, seeds, seed, corrupt, out);
    if (*dv)
      return cmdDeviations(config, mode, setsMode, grid, x0, count, paths, seed,
                           expectImprovement, out);
    if (*eq) return cmdEquivalence(config, grid, paths, seed, out);
    if (*bs) return cmdBsde(config, mode, grid, horizons, dt, out);
  } catch (const NonConvergence& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
