#include <doctest.h>

#include <omp.h>

#include <random>

#include "fixtures.hpp"

using namespace dynkin;
using namespace fixtures;

namespace {

double supErrorOn(const GameSolution& sol, double lo, double hi) {
  double err = 0.0;
  for (std::size_t i = 0; i < sol.value.size(); ++i) {
    const double x = sol.value.x(i);
    if (x >= lo && x <= hi)
      err = std::max(err, std::abs(sol.value.values()[i] - closedform::evalV(explicitSolution(), x)));
  }
  return err;
}

// Tent payoff max(1 - |x|, 0) written without a breakpoint at 0 asymmetry.
FunctionSpec tent(double height) {
  return FunctionSpec({}, {Tabulated{{-1.0, 0.0, 1.0}, {0.0, height, 0.0}}});
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("grid validation") {
  CHECK_NOTHROW(grid(-8, 8, 1e-3).validate());
  CHECK_THROWS_AS(grid(-1, 1, 0.3).validate(), ConfigError);
  CHECK_THROWS_AS(grid(-1, 1, 0.5).validate(), ConfigError);
  CHECK_THROWS_AS(grid(1, -1, 0.1).validate(), ConfigError);
  CHECK(grid(-1, 1, 0.1).nodes() == 21);
}

TEST_CASE("value grid interpolation clamps outside the domain") {
  const ValueGrid g(grid(0, 1, 0.1), std::vector<double>(11, 0.0), ConstraintMode::Common);
  std::vector<double> v(11);
  for (int i = 0; i <= 10; ++i) v[i] = i;
  const ValueGrid h(grid(0, 1, 0.1), v, ConstraintMode::Common);
  CHECK(h.interpolate(0.55) == doctest::Approx(5.5));
  CHECK(h.interpolate(-3.0) == 0.0);
  CHECK(h.interpolate(7.0) == 10.0);
}

TEST_CASE("resolvent of a constant is constant / rate in the interior") {
  const GridConfig c = grid(-8, 8, 1e-2);
  const std::vector<double> g(c.nodes(), 3.0);
  for (auto b : {BoundaryClosure::RobinDecay, BoundaryClosure::DirichletZero}) {
    GridConfig cb = c;
    cb.boundary = b;
    const auto w = resolventApply(DiffusionSpec::brownian(), 2.0, cb, g);
    // The boundary layer decays like e^{-2 |x - 8|}.
    CHECK(std::abs(w[c.nodes() / 2] - 1.5) <= 1e-6);
  }
}

TEST_CASE("resolvent of the indicator matches the Green's function") {
  const GridConfig c = grid(-8, 8, 1e-3);
  std::vector<double> g(c.nodes());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = closedform::exampleL(c.node(i));
  const auto w = resolventApply(DiffusionSpec::brownian(), 2.0, c, g);
  // 2 w(0) = lambda R_{lambda + r} l(0) with lambda = 1, rate 2.
  CHECK(w[c.nodes() / 2] == doctest::Approx(kFirstSignalValue).epsilon(2e-3));
  // lambda w decays in the tails.
  CHECK(w[std::size_t((6.0 + 8.0) / 1e-3)] < 1e-3);
  CHECK(w[std::size_t((-6.0 + 8.0) / 1e-3)] < 1e-3);
}

TEST_CASE("discrete maximum principle") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<DiffusionSpec> ds = {DiffusionSpec::brownian(0.3, 0.7),
                                         DiffusionSpec(DiffusionKind::OrnsteinUhlenbeck, 1.5, 0.5),
                                         DiffusionSpec::brownian(50.0, 0.1)};
  for (const auto& d : ds) {
    const GridConfig c = grid(-4, 4, 1e-2);
    std::vector<double> g(c.nodes());
    double gmax = 0.0;
    for (double& x : g) gmax = std::max(gmax, x = U(gen));
    const double rate = 0.5 + U(gen);
    const auto w = resolventApply(d, rate, c, g);
    for (double x : w) {
      REQUIRE(x >= 0.0);
      REQUIRE(x <= gmax / rate + 1e-12);
    }
  }
}

TEST_CASE("resolvent rejects non-finite data and domains outside the state space") {
  const GridConfig c = grid(-1, 1, 0.1);
  std::vector<double> g(c.nodes(), 0.0);
  g[3] = kInf;
  CHECK_THROWS_AS(resolventApply(DiffusionSpec::brownian(), 1.0, c, g), InvalidParameters);
  const DiffusionSpec gbm(DiffusionKind::GeometricBM, 0.0, 0.2);
  CHECK_THROWS_AS(Resolvent(gbm, 1.0, c), ConfigError);
}

TEST_CASE("serial and parallel drivers are bit-identical") {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::size_t n = 50001;
  std::vector<double> l(n), u(n), v(n), a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) l[i] = U(gen), u[i] = U(gen), v[i] = U(gen);
  for (auto mode : {ConstraintMode::Common, ConstraintMode::Independent}) {
    driverSerial(mode, 1.3, l, u, v, a);
    for (int threads : {1, 3}) {
      omp_set_num_threads(threads);
      driverParallel(mode, 1.3, l, u, v, b);
      REQUIRE(a == b);
    }
  }
}

TEST_CASE("fixed-point map contracts and is monotone") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const GridConfig c = grid(-5, 5, 0.02);
    const GameSpec game(DiffusionSpec::brownian(U(gen) - 0.5, 0.5 + U(gen)),
                        randomPayoff(gen, -5, 5), randomPayoff(gen, -5, 5), 0.2 + U(gen),
                        0.2 + 2 * U(gen), ConstraintMode::Common);
    for (auto mode : {ConstraintMode::Common, ConstraintMode::Independent}) {
      const FixedPointMap map(game, c, mode);
      const std::size_t n = c.nodes();
      std::vector<double> v1(n), v2(n), w1(n), w2(n);
      for (std::size_t i = 0; i < n; ++i) {
        v1[i] = 3 * U(gen);
        v2[i] = v1[i] + 2 * U(gen);
      }
      map.apply(v1, w1);
      map.apply(v2, w2);
      REQUIRE(supNorm(w1, w2) <= map.contractionFactor() * supNorm(v1, v2) + 1e-12);
      for (std::size_t i = 0; i < n; ++i) REQUIRE(w1[i] <= w2[i] + 1e-12);
    }
  }
}

TEST_CASE("iterates from zero increase") {
  const GridConfig c = grid(-8, 8, 1e-2);
  const FixedPointMap map(exampleGame(), c, ConstraintMode::Common);
  std::vector<double> v0(c.nodes(), 0.0), v1(c.nodes()), v2(c.nodes());
  map.apply(v0, v1);
  map.apply(v1, v2);
  for (std::size_t i = 0; i < c.nodes(); ++i) {
    REQUIRE(v1[i] >= -1e-15);
    REQUIRE(v2[i] >= v1[i] - 1e-15);
  }
}

TEST_CASE("common solve matches the closed form") {
  const GridConfig c = grid(-8, 8, 1e-3);
  const GameSolution sol = solveCommon(exampleGame(), c);
  CHECK(sol.finalChange <= c.tolerance);
  CHECK(supErrorOn(sol, -4, 4) <= 5e-3);
  CHECK((sol.value.mode() == ConstraintMode::Common));

  const auto& A = sol.sets.supSet.parts();
  const auto& B = sol.sets.infSet.parts();
  REQUIRE(A.size() == 1);
  CHECK(std::abs(A[0].lo + 1.0) <= 2 * c.step);
  CHECK(std::abs(A[0].hi - 1.0) <= 2 * c.step);
  REQUIRE(B.size() == 2);
  CHECK(std::abs(B[0].lo + kXStar) <= 2 * c.step);
  CHECK(std::abs(B[0].hi + 1.0) <= 2 * c.step);
  CHECK(std::abs(B[1].lo - 1.0) <= 2 * c.step);
  CHECK(std::abs(B[1].hi - kXStar) <= 2 * c.step);
  CHECK_FALSE(sol.sets.supSet.intersects(sol.sets.infSet));

  // 0 <= v <= lambda/(lambda + r) sup max(l, u).
  const double bound = 0.5 * exampleGame().payoffScale(-8, 8);
  for (double v : sol.value.values()) {
    REQUIRE(v >= 0.0);
    REQUIRE(v <= bound);
  }
}

TEST_CASE("iteration count follows the contraction rate") {
  const GridConfig c = grid(-8, 8, 1e-3);
  const FixedPointMap map(exampleGame(), c, ConstraintMode::Common);
  std::vector<double> v0(c.nodes(), 0.0), v1(c.nodes());
  map.apply(v0, v1);
  const double first = supNorm(v0, v1);
  const int bound = static_cast<int>(std::ceil(std::log(1e-10 / first) / std::log(0.5))) + 2;
  const GameSolution sol = solveCommon(exampleGame(), c);
  CHECK(sol.iterations <= bound);
  CHECK(sol.iterations <= 40);
}

TEST_CASE("independent solve matches the closed form") {
  const GameSolution sol =
      solveIndependent(exampleGame(ConstraintMode::Independent), grid(-8, 8, 1e-3));
  CHECK(supErrorOn(sol, -4, 4) <= 5e-3);
  CHECK((sol.value.mode() == ConstraintMode::Independent));
}

TEST_CASE("independent solve of the counterexample is still V") {
  const GameSolution sol =
      solveIndependent(counterexampleGame(ConstraintMode::Independent), grid(-8, 8, 1e-3));
  CHECK(supErrorOn(sol, -4, 4) <= 5e-3);
}

TEST_CASE("common solve of the counterexample enlarges A into the shoulder") {
  const GridConfig c = grid(-8, 8, 1e-3);
  const GameSolution sol = solveCommon(counterexampleGame(), c);
  const auto& A = sol.sets.supSet.parts();
  REQUIRE(A.size() == 1);
  CHECK(A[0].lo < -1.0 - 0.1);
  CHECK(A[0].hi > 1.0 + 0.1);
  CHECK(sol.sets.supSet.intersects(sol.sets.infSet));
  // Frozen from this solver at h = 1e-3: max of v^C - V on the shoulder.
  double excess = -kInf;
  const auto& p = counterexample();
  for (std::size_t i = 0; i < sol.value.size(); ++i) {
    const double x = sol.value.x(i);
    if (x > p.shoulderLo && x < p.shoulderHi)
      excess = std::max(excess, sol.value.values()[i] - closedform::evalV(explicitSolution(), x));
  }
  CHECK(excess == doctest::Approx(3.5899e-3).epsilon(5e-3));
}

TEST_CASE("zero payoffs give a zero value after one iteration") {
  for (auto mode : {ConstraintMode::Common, ConstraintMode::Independent}) {
    const GameSolution sol = solve(zeroGame(mode), grid(-2, 2, 0.01));
    CHECK(sol.iterations == 1);
    for (double v : sol.value.values()) REQUIRE(v == 0.0);
    CHECK(sol.sets.supSet.empty());
  }
}

TEST_CASE("set extraction with an empty answer") {
  const GridConfig c = grid(-2, 2, 0.01);
  const ValueGrid v(c, std::vector<double>(c.nodes(), 0.0), ConstraintMode::Common);
  const StoppingSets s =
      extractSets(v, FunctionSpec::constant(0.0), FunctionSpec::constant(1.0),
                  ConstraintMode::Common);
  CHECK(s.supSet.empty());
  CHECK(s.infSet.empty());
}

TEST_CASE("sets touching the grid edge extend to the state-space end") {
  const GridConfig c = grid(-2, 2, 0.01);
  const ValueGrid v(c, std::vector<double>(c.nodes(), 0.0), ConstraintMode::Common);
  const StoppingSets s = extractSets(v, FunctionSpec({0.0}, {Constant{0.0}, Constant{1.0}}),
                                     FunctionSpec::constant(2.0), ConstraintMode::Common);
  REQUIRE(s.supSet.parts().size() == 1);
  CHECK(s.supSet.parts()[0].hi == kInf);
  CHECK(std::abs(s.supSet.parts()[0].lo) <= 0.01);
}

TEST_CASE("even payoffs give an even value") {
  for (auto mode : {ConstraintMode::Common, ConstraintMode::Independent}) {
    const GameSpec g(DiffusionSpec::brownian(), tent(1.0), FunctionSpec::constant(0.4), 1.0, 1.0,
                     mode);
    const GameSolution sol = solve(g, grid(-6, 6, 1e-2));
    const auto& v = sol.value.values();
    double asym = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) asym = std::max(asym, std::abs(v[i] - v[v.size() - 1 - i]));
    CHECK(asym <= 1e-10);
  }
}

TEST_CASE("non-convergence carries the last change") {
  GridConfig c = grid(-8, 8, 1e-2);
  c.maxIterations = 3;
  try {
    solveCommon(exampleGame(), c);
    FAIL("expected NonConvergence");
  } catch (const NonConvergence& e) {
    CHECK(e.iterations() == 3);
    CHECK(e.lastChange() > c.tolerance);
  }
}

TEST_CASE("mode mismatch") {
  CHECK_THROWS_AS(solveCommon(exampleGame(ConstraintMode::Independent), grid(-2, 2, 0.1)),
                  InvalidParameters);
  CHECK_THROWS_AS(solveIndependent(exampleGame(), grid(-2, 2, 0.1)), InvalidParameters);
}

TEST_CASE("GBM call with an unreachable upper payoff stops on a right half-line") {
  const GameSpec g(DiffusionSpec(DiffusionKind::GeometricBM, 0.02, 0.3),
                   FunctionSpec({}, {PositivePartAffine{1.0, -1.0}}),
                   FunctionSpec::constant(1e6), 0.05, 1.0, ConstraintMode::Common);
  GridConfig c = grid(0.01, 40.01, 0.02);
  c.boundary = BoundaryClosure::DirichletZero;
  const GameSolution sol = solveCommon(g, c);
  CHECK(sol.sets.infSet.empty());
  REQUIRE(sol.sets.supSet.parts().size() == 1);
  CHECK(sol.sets.supSet.parts()[0].hi == kInf);
  CHECK(sol.sets.supSet.parts()[0].lo > 1.0);
}

}  // TEST_SUITE
