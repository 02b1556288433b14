#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "fixtures.hpp"

using namespace dynkin;
using namespace dynkin::closedform;
using namespace fixtures;

TEST_SUITE("closedform") {

TEST_CASE("eps bound matches the high-precision value") {
  CHECK(epsLowerBound(std::sqrt(2.0), 2.0) == doctest::Approx(kEpsBound).epsilon(1e-14));
  CHECK(9.0 > epsLowerBound(std::sqrt(2.0), 2.0));
}

TEST_CASE("eps bound blows up as theta approaches phi") {
  CHECK(epsLowerBound(2.0 - 1e-9, 2.0) > 1e8);
  CHECK_THROWS_AS(epsLowerBound(2.0, 2.0), InvalidParameters);
  CHECK_THROWS_AS(epsLowerBound(3.0, 2.0), InvalidParameters);
}

TEST_CASE("free boundary root") {
  const double th = std::sqrt(2.0), ph = 2.0;
  const double xs = solveXStar(th, ph, 9.0);
  CHECK(xs == doctest::Approx(kXStar).epsilon(1e-14));
  const double rhs = (ph * ph - th * th) * 9.0 * std::sinh(ph);
  CHECK(std::abs(freeBoundaryFunction(th, ph, xs) - rhs) <= 1e-10 * rhs);
}

TEST_CASE("free boundary increases with eps") {
  const double th = std::sqrt(2.0), ph = 2.0;
  CHECK(solveXStar(th, ph, 5.0) < solveXStar(th, ph, 9.0));
  CHECK(solveXStar(th, ph, 9.0) < solveXStar(th, ph, 50.0));
}

TEST_CASE("eps just above the bound gives a root just above one") {
  const double th = std::sqrt(2.0), ph = 2.0;
  const double xs = solveXStar(th, ph, epsLowerBound(th, ph) + 1e-9);
  CHECK(xs > 1.0);
  CHECK(xs < 1.0 + 1e-6);
  CHECK_THROWS_AS(solveXStar(th, ph, 1.0), NoRootAboveOne);
  CHECK_THROWS_AS(buildSolution(1.0, 1.0, 1.0), InvalidParameters);
}

TEST_CASE("constants match the high-precision values") {
  const auto& s = explicitSolution();
  CHECK(s.coeffA == doctest::Approx(kA).epsilon(1e-12));
  CHECK(s.coeffB == doctest::Approx(kB).epsilon(1e-12));
  CHECK(s.coeffC == doctest::Approx(kC).epsilon(1e-12));
  CHECK(s.coeffD == doctest::Approx(kD).epsilon(1e-12));
  CHECK(s.coeffD == doctest::Approx(std::exp(s.theta * s.xStar) / 10.0).epsilon(1e-14));
}

TEST_CASE("sign pattern and value matching hold across parameters") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> U(0.2, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double r = U(gen), lam = U(gen);
    const double th = std::sqrt(2 * r), ph = std::sqrt(2 * (lam + r));
    const double eps = epsLowerBound(th, ph) * (1.0 + U(gen));
    const auto s = buildSolution(r, lam, eps);
    REQUIRE(s.coeffA < 0.0);
    REQUIRE(s.coeffB < 0.0);
    REQUIRE(s.coeffC > 0.0);
    REQUIRE(s.coeffD > 0.0);
    const double k = (ph * ph - th * th) / (ph * ph);
    const double inner = s.coeffB * std::exp(ph * s.xStar) + s.coeffC * std::exp(-ph * s.xStar) +
                         k / (1.0 + eps);
    REQUIRE(inner == doctest::Approx(s.coeffD * std::exp(-th * s.xStar)).epsilon(1e-10));
    REQUIRE(evalV(s, s.xStar) == doctest::Approx(1.0 / (1.0 + eps)).epsilon(1e-12));
  }
}

TEST_CASE("value function at reference points") {
  const auto& s = explicitSolution();
  CHECK(evalV(s, 0.0) == doctest::Approx(kV0).epsilon(1e-13));
  CHECK(evalV(s, 0.0) == doctest::Approx(s.coeffA + 0.5).epsilon(1e-15));
  CHECK(evalV(s, 1.0) == doctest::Approx(kV1).epsilon(1e-13));
  CHECK(evalV(s, 1.2) == doctest::Approx(kV12).epsilon(1e-13));
  CHECK(evalV(s, 3.0) == doctest::Approx(kV3).epsilon(1e-13));
  CHECK(std::abs(evalV(s, s.xStar) - 0.1) <= 1e-12);
}

TEST_CASE("value function is even") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> U(-6.0, 6.0);
  const auto& s = explicitSolution();
  for (int i = 0; i < 1000; ++i) {
    const double x = U(gen);
    REQUIRE(evalV(s, x) == evalV(s, -x));
  }
}

TEST_CASE("closed-form diagnostics pass at h = 1e-3") {
  const DiagnosticsReport d = verifyClosedForm(explicitSolution(), 1e-3);
  CHECK(d.rootResidual <= 1e-10);
  CHECK(d.valueAtXStarError <= 1e-12);
  CHECK(d.signsOk);
  CHECK(d.evennessError == 0.0);
  CHECK(d.monotoneViolation == 0.0);
  CHECK(d.c1MismatchAtOne <= 1e-10);
  CHECK(d.c1MismatchAtXStar <= 1e-10);
  CHECK(d.maxHjbResidual <= 1e-8);
  CHECK(d.orderingFailures == 0);
  CHECK(d.orderingMinMargin >= 1e-12);
  CHECK(d.passed());
}

TEST_CASE("second derivative jumps at one") {
  const auto& s = explicitSolution();
  CHECK(std::abs(evalVSecond(s, 1.0, Side::Left) - evalVSecond(s, 1.0, Side::Right)) > 0.1);
  CHECK(evalVPrime(s, 1.0, Side::Left) ==
        doctest::Approx(evalVPrime(s, 1.0, Side::Right)).epsilon(1e-12));
}

TEST_CASE("counterexample payoffs") {
  const auto& s = explicitSolution();
  const auto& p = counterexample();
  CHECK(p.shoulderValue == doctest::Approx(kShoulderValue).epsilon(1e-13));
  CHECK(p.shoulderValue > 0.1);
  CHECK(p.shoulderValue < evalV(s, 1.0));
  CHECK(evalFunction(p.lower, 0.0) == 1.0);
  CHECK(evalFunction(p.lower, 1.2) == p.shoulderValue);
  CHECK(evalFunction(p.lower, -1.2) == p.shoulderValue);
  CHECK(evalFunction(p.lower, p.shoulderHi + 1e-9) == 0.0);
  CHECK(evalFunction(p.upper, 3.0) == doctest::Approx(0.1));
  // V > l~ > u~ on the shoulder.
  for (double x = 1.001; x < p.shoulderHi; x += 0.01) {
    REQUIRE(evalV(s, x) > evalFunction(p.lower, x));
    REQUIRE(evalFunction(p.lower, x) > evalFunction(p.upper, x));
  }
  CHECK(counterexampleResidualMin(s, p, 1e-3) > 0.0);
}

TEST_CASE("counterexample delta must lie in (0, (x*-1)/3)") {
  const auto& s = explicitSolution();
  CHECK_THROWS_AS(buildCounterexamplePayoffs(s, 0.0), InvalidParameters);
  CHECK_THROWS_AS(buildCounterexamplePayoffs(s, (s.xStar - 1.0) / 3.0), InvalidParameters);
  CHECK_NOTHROW(buildCounterexamplePayoffs(s, 0.1622));
}

TEST_CASE("figure data") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto f1 = (dir / "dynkin_fig1.csv").string();
  const auto f2 = (dir / "dynkin_fig2.csv").string();
  emitFigureData(explicitSolution(), std::nullopt, f1);
  emitFigureData(explicitSolution(), counterexample(), f2);
  std::ifstream a(f1), b(f2);
  std::string header;
  std::getline(a, header);
  CHECK(header == "x,l,u,V");
  std::getline(b, header);
  CHECK(header == "x,l_tilde,u_tilde,V");
  int rows = 0;
  for (std::string line; std::getline(a, line);) ++rows;
  CHECK(rows == 6001);
}

}  // TEST_SUITE
