#include <doctest.h>

#include <omp.h>

#include "dynkin/montecarlo.hpp"
#include "dynkin/stats.hpp"
#include "fixtures.hpp"

using namespace dynkin;
using namespace dynkin::mc;
using namespace fixtures;

namespace {

HittingStrategy sup(IntervalUnion s) { return {Player::Sup, std::move(s)}; }
HittingStrategy inf(IntervalUnion s) { return {Player::Inf, std::move(s)}; }

}  // namespace

TEST_SUITE("montecarlo") {

TEST_CASE("moments merge like a single pass") {
  Moments a, b, all;
  for (int i = 0; i < 100; ++i) {
    const double x = std::sin(i);
    (i < 37 ? a : b).add(x);
    all.add(x);
  }
  a.merge(b);
  CHECK(a.n == all.n);
  CHECK(a.mean == doctest::Approx(all.mean).epsilon(1e-14));
  CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-12));
}

TEST_CASE("KS statistic and p-value") {
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) a.push_back(i), b.push_back(i + 0.5);
  const KsResult same = ksTwoSample(a, a);
  CHECK(same.statistic == 0.0);
  CHECK(same.pValue == 1.0);
  CHECK(ksTwoSample(a, b).statistic == doctest::Approx(0.001));
  std::vector<double> c(a.begin(), a.begin() + 500);
  CHECK(ksTwoSample(a, c).pValue < 1e-10);
  CHECK(kolmogorovSurvival(1.36) == doctest::Approx(0.049).epsilon(0.02));
}

TEST_CASE("signal gaps have the right rate") {
  Moments m;
  for (std::uint64_t p = 0; p < 100000; ++p) {
    SignalStream s(2.0, SignalRole::SupOnly, 1, p);
    m.add(s.next().time);
  }
  CHECK(std::abs(m.mean - 0.5) <= 4 * m.stderror());
  Moments red;
  for (std::uint64_t p = 0; p < 100000; ++p) {
    SignalStream s(1.0, SignalRole::MergedTwoColor, 1, p);
    const Signal sig = s.next();
    red.add(sig.color == Color::Red ? 1.0 : 0.0);
  }
  CHECK(std::abs(red.mean - 0.5) <= 4 * red.stderror());
}

TEST_CASE("serial and parallel estimates are bit-identical for any thread count") {
  const GameSpec g = exampleGame();
  const StoppingSets s = closedFormSets();
  const auto ref = simulateGameSerial(g, 0.3, sup(s.supSet), inf(s.infSet), 30000, 20.0, 42);
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    const auto par = simulateGame(g, 0.3, sup(s.supSet), inf(s.infSet), 30000, 20.0, 42);
    REQUIRE(par.mean == ref.mean);
    REQUIRE(par.stderror == ref.stderror);
  }
}

TEST_CASE("closed-form sets reproduce V") {
  for (auto mode : {ConstraintMode::Common, ConstraintMode::Independent}) {
    const GameSpec g = exampleGame(mode);
    const StoppingSets s = closedFormSets();
    for (double x0 : {0.0, 1.2, 3.0}) {
      const auto est = simulateGame(g, x0, sup(s.supSet), inf(s.infSet), 200000, 20.0, 7);
      CHECK(std::abs(est.mean - closedform::evalV(explicitSolution(), x0)) <=
            3 * est.stderror + est.truncationBias + 1e-3);
    }
  }
}

TEST_CASE("stopping at the first signal gives lambda times the resolvent of l") {
  const auto est = simulateGame(exampleGame(), 0.0, sup(IntervalUnion::whole()),
                                inf(IntervalUnion()), 400000, 20.0, 3);
  CHECK(std::abs(est.mean - kFirstSignalValue) <= 3 * est.stderror);
}

TEST_CASE("no stopping pays zero") {
  const auto est =
      simulateGame(exampleGame(), 0.0, sup(IntervalUnion()), inf(IntervalUnion()), 1000, 20.0, 1);
  CHECK(est.mean == 0.0);
  CHECK(est.stderror == 0.0);
}

TEST_CASE("truncation bias bound") {
  const auto est = simulateGame(exampleGame(), 0.0, sup(IntervalUnion()), inf(IntervalUnion()),
                                10, defaultHorizon(exampleGame()), 1);
  CHECK(est.truncationBias <= 1e-6 * exampleGame().payoffScale(-kInf, kInf));
  CHECK(est.truncationBias > 0.0);
}

TEST_CASE("argument errors") {
  const StoppingSets s = closedFormSets();
  CHECK_THROWS_AS(simulateGame(exampleGame(), 0.0, inf(s.supSet), sup(s.infSet), 10, 20.0, 1),
                  InvalidParameters);
  CHECK_THROWS_AS(simulateGame(exampleGame(), 0.0, sup(s.supSet), inf(s.infSet), 10, 0.0, 1),
                  InvalidParameters);
  CHECK_THROWS_AS(simulateGame(exampleGame(), 0.0, sup(s.supSet), inf(s.infSet), 10, kInf, 1),
                  InvalidParameters);
}

TEST_CASE("start index delays the sup player") {
  // Stopping at the second signal: E[e^{-r T_2} l(X_{T_2})] < first-signal value.
  HittingStrategy late = sup(IntervalUnion::whole());
  late.startIndex = 2;
  const auto est =
      simulateGame(exampleGame(), 0.0, late, inf(IntervalUnion()), 100000, 20.0, 3);
  CHECK(est.mean < kFirstSignalValue - 0.05);
}

TEST_CASE("embedded chain: state at the first signal has variance 1/lambda") {
  const GameSpec g = exampleGame();
  const StoppedSample s = sampleThinnedStops(g, 0.0, IntervalUnion::whole(), IntervalUnion(),
                                             ThinningApproach::DropBlue, 100000, 20.0, 9, 0);
  Moments sq;
  for (double x : s.states) sq.add(x * x);
  CHECK(std::abs(sq.mean - 1.0 / g.signalRate()) <= 3 * sq.stderror());
}

TEST_CASE("independent streams never tie") {
  CHECK(countIndependentTies(1.0, 10000000, 17) == 0);
}

TEST_CASE("coupling: identical approaches when the inf set is empty") {
  const GameSpec g = exampleGame();
  const CouplingReport rep =
      couplingCheck(g, 0.0, closedFormSets().supSet, IntervalUnion(), 20000, 1);
  CHECK(rep.timeKs < 0.02);
  CHECK(rep.stateKs < 0.02);
}

TEST_CASE("coupling: corrupted thinning is detected") {
  const StoppingSets s = closedFormSets();
  const CouplingReport rep = couplingCheck(exampleGame(), 0.0, s.supSet, s.infSet, 20000, 1, true);
  CHECK(rep.timePValue < 0.01);
  CHECK(rep.statePValue < 0.01);
}

TEST_CASE("coupling hypotheses") {
  const StoppingSets s = closedFormSets();
  CHECK_THROWS_AS(couplingCheck(exampleGame(), 0.0, s.supSet, s.supSet, 20000, 1),
                  HypothesisViolation);
  CHECK_THROWS_AS(couplingCheck(exampleGame(), 0.0, s.supSet, s.infSet, 100, 1),
                  InvalidParameters);
}

TEST_CASE("set perturbations") {
  const IntervalUnion a({{-1.0, 1.0}});
  const auto grown = perturb(a, PerturbKind::Grow, 0.1).parts();
  CHECK(grown[0].lo == doctest::Approx(-1.1));
  CHECK(grown[0].hi == doctest::Approx(1.1));
  const auto shifted = perturb(a, PerturbKind::Shift, 0.2).parts();
  CHECK(shifted[0].lo == doctest::Approx(-0.8));
  CHECK(perturb(a, PerturbKind::Shrink, 1.5).empty());
  // Growing two nearby pieces merges them.
  const IntervalUnion b({{-2.0, -1.0, true, false}, {-0.9, 0.0}});
  CHECK(perturb(b, PerturbKind::Grow, 0.1).parts().size() == 1);
  const IntervalUnion half({{1.0, kInf, true, false}});
  CHECK(perturb(half, PerturbKind::Shift, -0.5).parts()[0].hi == kInf);
}

TEST_CASE("standard deviations cycle grow, shrink, shift") {
  const auto d = standardDeviations(Player::Sup, 5);
  REQUIRE(d.size() == 5);
  CHECK((d[0].kind == PerturbKind::Grow));
  CHECK((d[1].kind == PerturbKind::Shrink));
  CHECK((d[2].kind == PerturbKind::Shift));
  CHECK((d[3].kind == PerturbKind::Grow));
  CHECK(d[3].amount == doctest::Approx(0.2));
}

TEST_CASE("a zero deviation is tight under common random numbers") {
  const StoppingSets s = closedFormSets();
  const DeviationReport rep =
      evaluateDeviations(exampleGame(), 0.0, s,
                         {{Player::Sup, PerturbKind::Shift, 0.0},
                          {Player::Inf, PerturbKind::Shift, 0.0}},
                         20000, 3, 20.0);
  for (const auto& r : rep.results) {
    CHECK(r.diffMean == 0.0);
    CHECK(r.mean == rep.optimalMean);
    CHECK_FALSE(r.violation);
  }
}

TEST_CASE("deviation battery on the explicit example has no violations") {
  for (auto mode : {ConstraintMode::Common, ConstraintMode::Independent}) {
    const DeviationReport rep =
        saddleDeviationBattery(exampleGame(mode), 0.0, closedFormSets(), 5, 100000, 11);
    CHECK(rep.results.size() == 10);
    CHECK(rep.violations() == 0);
  }
}

}  // TEST_SUITE
