#include "dynkin/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "dynkin/stats.hpp"

namespace dynkin::mc {

namespace {

rng::Channel gapChannel(SignalRole role) {
  switch (role) {
    case SignalRole::CommonBoth:
    case SignalRole::SupOnly: return rng::Channel::SupSignal;
    case SignalRole::InfOnly: return rng::Channel::InfSignal;
    case SignalRole::MergedTwoColor: return rng::Channel::Merged;
  }
  return rng::Channel::SupSignal;
}

void checkHorizon(double horizonCap) {
  if (!(horizonCap > 0.0) || !std::isfinite(horizonCap))
    throw InvalidParameters("horizon cap must be positive and finite");
}

}  // namespace

SignalStream::SignalStream(double rate, SignalRole role, std::uint64_t seed, std::uint64_t path)
    : rate_(rate),
      role_(role),
      gaps_(seed, path, gapChannel(role)),
      colors_(seed, path, rng::Channel::Color),
      exp_(role == SignalRole::MergedTwoColor ? 2.0 * rate : rate) {
  if (!(rate > 0.0)) throw InvalidParameters("signal rate must be positive");
}

Signal SignalStream::next() {
  time_ += exp_(gaps_);
  Color c = Color::Red;
  if (role_ == SignalRole::MergedTwoColor) c = (colors_() >> 63) ? Color::Blue : Color::Red;
  return {time_, c};
}

double simulatePath(const GameSpec& game, double x0, const HittingStrategy& sup,
                    const HittingStrategy& inf, double horizonCap, std::uint64_t seed,
                    std::uint64_t path) {
  const DiffusionSpec& X = game.diffusion();
  const FunctionSpec& l = game.lower();
  const FunctionSpec& u = game.upper();
  const double r = game.discount();
  const double lam = game.signalRate();
  rng::CounterStream gauss(seed, path, rng::Channel::Gaussian);
  std::normal_distribution<double> normal;

  double t = 0.0;
  double x = x0;
  if (game.mode() == ConstraintMode::Common) {
    SignalStream signals(lam, SignalRole::CommonBoth, seed, path);
    for (int n = 1;; ++n) {
      const double next = signals.next().time;
      if (next > horizonCap) return 0.0;
      x = X.transition(x, next - t, normal(gauss));
      t = next;
      const bool supStops = sup.fires(n, x);
      const bool infStops = inf.fires(n, x);
      if (supStops) {
        const double lv = l.valueUnchecked(x);
        return std::exp(-r * t) * (infStops ? payoffOnTie(lv, u.valueUnchecked(x)) : lv);
      }
      if (infStops) return std::exp(-r * t) * u.valueUnchecked(x);
    }
  }

  SignalStream supSignals(lam, SignalRole::SupOnly, seed, path);
  SignalStream infSignals(lam, SignalRole::InfOnly, seed, path);
  double nextSup = supSignals.next().time;
  double nextInf = infSignals.next().time;
  int nSup = 0;
  int nInf = 0;
  for (;;) {
    const double next = std::min(nextSup, nextInf);
    if (next > horizonCap) return 0.0;
    x = X.transition(x, next - t, normal(gauss));
    t = next;
    const bool supEvent = nextSup <= nextInf;
    const bool infEvent = nextInf <= nextSup;
    const bool supStops = supEvent && sup.fires(++nSup, x);
    const bool infStops = infEvent && inf.fires(++nInf, x);
    if (supStops) return std::exp(-r * t) * l.valueUnchecked(x);
    if (infStops) return std::exp(-r * t) * u.valueUnchecked(x);
    if (supEvent) nextSup = supSignals.next().time;
    if (infEvent) nextInf = infSignals.next().time;
  }
}

namespace {

void checkStrategies(const GameSpec& game, double x0, const HittingStrategy& sup,
                     const HittingStrategy& inf, double horizonCap) {
  if (sup.player != Player::Sup || inf.player != Player::Inf)
    throw InvalidParameters("strategy role mismatch: expected (sup, inf)");
  if (!game.diffusion().stateSpace().contains(x0))
    throw DomainError("initial state outside the state space");
  checkHorizon(horizonCap);
}

template <bool Parallel>
SimulationEstimate simulateImpl(const GameSpec& game, double x0, const HittingStrategy& sup,
                                const HittingStrategy& inf, std::uint64_t nPaths,
                                double horizonCap, std::uint64_t seed) {
  checkStrategies(game, x0, sup, inf, horizonCap);
  if (nPaths == 0) throw InvalidParameters("need at least one path");
  auto fn = [&](std::uint64_t p, std::span<double> out) {
    out[0] = simulatePath(game, x0, sup, inf, horizonCap, seed, p);
  };
  const std::vector<Moments> m = Parallel ? runPathsParallel(nPaths, 1, fn)
                                          : runPathsSerial(nPaths, 1, fn);
  SimulationEstimate est;
  est.mean = m[0].mean;
  est.stderror = m[0].stderror();
  est.nPaths = nPaths;
  est.seed = seed;
  est.horizonCap = horizonCap;
  est.truncationBias = std::exp(-game.discount() * horizonCap) *
                       game.payoffScale(-kInf, kInf);
  return est;
}

}  // namespace

SimulationEstimate simulateGame(const GameSpec& game, double x0, const HittingStrategy& sup,
                                const HittingStrategy& inf, std::uint64_t nPaths,
                                double horizonCap, std::uint64_t seed) {
  return simulateImpl<true>(game, x0, sup, inf, nPaths, horizonCap, seed);
}

SimulationEstimate simulateGameSerial(const GameSpec& game, double x0,
                                      const HittingStrategy& sup, const HittingStrategy& inf,
                                      std::uint64_t nPaths, double horizonCap,
                                      std::uint64_t seed) {
  return simulateImpl<false>(game, x0, sup, inf, nPaths, horizonCap, seed);
}

std::uint64_t countIndependentTies(double rate, std::uint64_t nPairs, std::uint64_t seed) {
  std::uint64_t ties = 0;
  const auto n = static_cast<std::ptrdiff_t>(nPairs);
#pragma omp parallel for reduction(+ : ties) schedule(static)
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    SignalStream a(rate, SignalRole::SupOnly, seed, static_cast<std::uint64_t>(p));
    SignalStream b(rate, SignalRole::InfOnly, seed, static_cast<std::uint64_t>(p));
    if (a.next().time == b.next().time) ++ties;
  }
  return ties;
}

StoppedSample sampleThinnedStops(const GameSpec& game, double x0, const IntervalUnion& supSet,
                                 const IntervalUnion& infSet, ThinningApproach approach,
                                 std::uint64_t nSamples, double horizonCap, std::uint64_t seed,
                                 std::uint64_t firstPath) {
  checkHorizon(horizonCap);
  StoppedSample out;
  out.times.assign(nSamples, kInf);
  out.states.assign(nSamples, kInf);
  const DiffusionSpec& X = game.diffusion();
  const double lam = game.signalRate();
  const auto n = static_cast<std::ptrdiff_t>(nSamples);
#pragma omp parallel for schedule(dynamic, 1024)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::uint64_t path = firstPath + static_cast<std::uint64_t>(i);
    SignalStream marks(lam, SignalRole::MergedTwoColor, seed, path);
    rng::CounterStream gauss(seed, path, rng::Channel::Gaussian);
    std::normal_distribution<double> normal;
    double t = 0.0;
    double x = x0;
    for (;;) {
      const Signal s = marks.next();
      if (s.time > horizonCap) break;
      x = X.transition(x, s.time - t, normal(gauss));
      t = s.time;
      const bool red = s.color == Color::Red;
      const bool inD = supSet.contains(x);
      const bool inE = infSet.contains(x);
      bool stop = false;
      switch (approach) {
        case ThinningApproach::DropBlue: stop = red && (inD || inE); break;
        case ThinningApproach::ColorBySet: stop = (red && inD) || (!red && inE); break;
        case ThinningApproach::CorruptedColorBySet: stop = !red && inE; break;
      }
      if (stop) {
        out.times[static_cast<std::size_t>(i)] = t;
        out.states[static_cast<std::size_t>(i)] = x;
        break;
      }
    }
  }
  return out;
}

CouplingReport couplingCheck(const GameSpec& game, double x0, const IntervalUnion& supSet,
                             const IntervalUnion& infSet, std::uint64_t nSamples,
                             std::uint64_t seed, bool corruptApproach2) {
  if (supSet.intersects(infSet))
    throw HypothesisViolation("coupling needs disjoint stopping sets");
  if (nSamples < kMinKsSamples)
    throw InvalidParameters("coupling check needs at least 10^4 samples per arm");
  const double cap = defaultHorizon(game);
  // The two arms use disjoint path ranges, so the samples are independent.
  const StoppedSample a =
      sampleThinnedStops(game, x0, supSet, infSet, ThinningApproach::DropBlue, nSamples, cap,
                         seed, 0);
  const StoppedSample b = sampleThinnedStops(
      game, x0, supSet, infSet,
      corruptApproach2 ? ThinningApproach::CorruptedColorBySet : ThinningApproach::ColorBySet,
      nSamples, cap, seed, nSamples);
  const KsResult kt = ksTwoSample(a.times, b.times);
  const KsResult ks = ksTwoSample(a.states, b.states);
  CouplingReport rep;
  rep.nSamples = nSamples;
  rep.seed = seed;
  rep.timeKs = kt.statistic;
  rep.timePValue = kt.pValue;
  rep.stateKs = ks.statistic;
  rep.statePValue = ks.pValue;
  rep.corrupted = corruptApproach2;
  return rep;
}

const char* toString(PerturbKind k) {
  switch (k) {
    case PerturbKind::Shift: return "shift";
    case PerturbKind::Shrink: return "shrink";
    case PerturbKind::Grow: return "grow";
  }
  return "?";
}

IntervalUnion perturb(const IntervalUnion& set, PerturbKind kind, double amount) {
  std::vector<Interval> moved;
  for (Interval iv : set.parts()) {
    switch (kind) {
      case PerturbKind::Shift:
        iv.lo += amount;
        iv.hi += amount;
        break;
      case PerturbKind::Shrink:
        iv.lo += amount;
        iv.hi -= amount;
        break;
      case PerturbKind::Grow:
        iv.lo -= amount;
        iv.hi += amount;
        break;
    }
    if (iv.lo < iv.hi || (iv.lo == iv.hi && iv.loClosed && iv.hiClosed)) moved.push_back(iv);
  }
  std::sort(moved.begin(), moved.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const Interval& iv : moved) {
    if (!merged.empty() && merged.back().intersects(iv)) {
      Interval& last = merged.back();
      if (iv.hi > last.hi || (iv.hi == last.hi && iv.hiClosed)) {
        last.hi = iv.hi;
        last.hiClosed = iv.hiClosed;
      }
    } else if (!merged.empty() && merged.back().hi == iv.lo &&
               (merged.back().hiClosed || iv.loClosed)) {
      merged.back().hi = iv.hi;
      merged.back().hiClosed = iv.hiClosed;
    } else {
      merged.push_back(iv);
    }
  }
  return IntervalUnion(std::move(merged));
}

std::vector<Deviation> standardDeviations(Player player, int count) {
  static constexpr PerturbKind cycle[] = {PerturbKind::Grow, PerturbKind::Shrink,
                                          PerturbKind::Shift};
  std::vector<Deviation> out;
  for (int k = 0; k < count; ++k) out.push_back({player, cycle[k % 3], 0.1 * (k / 3 + 1)});
  return out;
}

int DeviationReport::violations() const {
  return static_cast<int>(std::count_if(results.begin(), results.end(),
                                        [](const DeviationResult& r) { return r.violation; }));
}

double DeviationReport::bestSupImprovementMargin() const {
  double best = -kInf;
  for (const auto& r : results)
    if (r.deviation.player == Player::Sup) best = std::max(best, r.diffMean - 3.0 * r.pooledSE);
  return best;
}

DeviationReport evaluateDeviations(const GameSpec& game, double x0, const StoppingSets& sets,
                                   const std::vector<Deviation>& deviations,
                                   std::uint64_t nPaths, std::uint64_t seed,
                                   double horizonCap) {
  const HittingStrategy supOpt{Player::Sup, sets.supSet};
  const HittingStrategy infOpt{Player::Inf, sets.infSet};
  checkStrategies(game, x0, supOpt, infOpt, horizonCap);

  struct Arm {
    HittingStrategy sup;
    HittingStrategy inf;
  };
  std::vector<Arm> arms;
  for (const Deviation& d : deviations) {
    if (d.player == Player::Sup)
      arms.push_back({{Player::Sup, perturb(sets.supSet, d.kind, d.amount)}, infOpt});
    else
      arms.push_back({supOpt, {Player::Inf, perturb(sets.infSet, d.kind, d.amount)}});
  }
  const std::size_t k = arms.size();
  // Slots: [optimal, arm_1..arm_k, arm_1 - optimal .. arm_k - optimal].
  auto fn = [&](std::uint64_t p, std::span<double> out) {
    const double base = simulatePath(game, x0, supOpt, infOpt, horizonCap, seed, p);
    out[0] = base;
    for (std::size_t a = 0; a < k; ++a) {
      const double v = simulatePath(game, x0, arms[a].sup, arms[a].inf, horizonCap, seed, p);
      out[1 + a] = v;
      out[1 + k + a] = v - base;
    }
  };
  const std::vector<Moments> m = runPathsParallel(nPaths, 1 + 2 * k, fn);

  DeviationReport rep;
  rep.x0 = x0;
  rep.mode = game.mode();
  rep.nPaths = nPaths;
  rep.seed = seed;
  rep.optimalMean = m[0].mean;
  rep.optimalStderror = m[0].stderror();
  for (std::size_t a = 0; a < k; ++a) {
    DeviationResult r;
    r.id = static_cast<int>(a);
    r.deviation = deviations[a];
    r.mean = m[1 + a].mean;
    r.stderror = m[1 + a].stderror();
    r.diffMean = m[1 + k + a].mean;
    r.diffStderror = m[1 + k + a].stderror();
    r.pooledSE = std::hypot(r.stderror, rep.optimalStderror);
    r.violation = deviations[a].player == Player::Sup ? r.diffMean > 3.0 * r.pooledSE
                                                      : r.diffMean < -3.0 * r.pooledSE;
    rep.results.push_back(r);
  }
  return rep;
}

DeviationReport saddleDeviationBattery(const GameSpec& game, double x0, const StoppingSets& sets,
                                       int deviations, std::uint64_t nPaths, std::uint64_t seed) {
  std::vector<Deviation> devs = standardDeviations(Player::Sup, deviations);
  const std::vector<Deviation> infDevs = standardDeviations(Player::Inf, deviations);
  devs.insert(devs.end(), infDevs.begin(), infDevs.end());
  return evaluateDeviations(game, x0, sets, devs, nPaths, seed, defaultHorizon(game));
}

DeviationReport saddleDeviationBattery(const GameSpec& game, double x0,
                                       const GameSolution& solution, int deviations,
                                       std::uint64_t nPaths, std::uint64_t seed) {
  return saddleDeviationBattery(game, x0, solution.sets, deviations, nPaths, seed);
}

}  // namespace dynkin::mc
