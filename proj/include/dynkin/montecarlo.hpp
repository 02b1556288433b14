#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dynkin/model.hpp"
#include "dynkin/rng.hpp"
#include "dynkin/solver.hpp"

namespace dynkin::mc {

enum class SignalRole { CommonBoth, SupOnly, InfOnly, MergedTwoColor };

enum class Color { Red, Blue };

struct Signal {
  double time;
  Color color;  // always Red unless the stream is MergedTwoColor
};

/// Poisson signal times for one path. Gaps are exponential(rate); a
/// MergedTwoColor stream runs at 2 rate and tags each event with a fair colour.
class SignalStream {
 public:
  SignalStream(double rate, SignalRole role, std::uint64_t seed, std::uint64_t path);

  Signal next();
  double rate() const { return rate_; }
  SignalRole role() const { return role_; }

 private:
  double rate_;
  SignalRole role_;
  rng::CounterStream gaps_;
  rng::CounterStream colors_;
  std::exponential_distribution<double> exp_;
  double time_ = 0.0;
};

enum class Player { Sup, Inf };

/// Stop at the first own signal (counting from startIndex) at which the state
/// lies in `set`.
struct HittingStrategy {
  Player player;
  IntervalUnion set;
  int startIndex = 1;

  bool fires(int ownSignalIndex, double x) const {
    return ownSignalIndex >= startIndex && set.contains(x);
  }
};

struct SimulationEstimate {
  double mean = 0.0;
  double stderror = 0.0;
  std::uint64_t nPaths = 0;
  std::uint64_t seed = 0;
  double horizonCap = 0.0;
  double truncationBias = 0.0;  // a priori bound e^{-r cap} sup max(l, u)
};

inline double defaultHorizon(const GameSpec& game) { return 20.0 / game.discount(); }

// One path's discounted payoff R(tau, sigma). Paths still running at the
// horizon cap pay 0. Signal and Gaussian draws come from the (seed, path)
// substreams, so two calls with the same path index share randomness.
double simulatePath(const GameSpec& game, double x0, const HittingStrategy& sup,
                    const HittingStrategy& inf, double horizonCap, std::uint64_t seed,
                    std::uint64_t path);

SimulationEstimate simulateGame(const GameSpec& game, double x0, const HittingStrategy& sup,
                                const HittingStrategy& inf, std::uint64_t nPaths,
                                double horizonCap, std::uint64_t seed);
// Reference implementation without OpenMP; bit-identical to simulateGame.
SimulationEstimate simulateGameSerial(const GameSpec& game, double x0,
                                      const HittingStrategy& sup, const HittingStrategy& inf,
                                      std::uint64_t nPaths, double horizonCap,
                                      std::uint64_t seed);

// Counts exact coincidences between the first events of the two independent
// signal streams over nPairs paths.
std::uint64_t countIndependentTies(double rate, std::uint64_t nPairs, std::uint64_t seed);

// Thinning approach used by the coupling check.
enum class ThinningApproach {
  DropBlue,            // keep red marks only
  ColorBySet,          // keep red marks in D and blue marks outside D
  CorruptedColorBySet  // negative control: keep blue marks outside D only
};

struct StoppedSample {
  std::vector<double> times;   // +inf when not stopped before the cap
  std::vector<double> states;  // +inf when not stopped before the cap
};

StoppedSample sampleThinnedStops(const GameSpec& game, double x0, const IntervalUnion& supSet,
                                 const IntervalUnion& infSet, ThinningApproach approach,
                                 std::uint64_t nSamples, double horizonCap, std::uint64_t seed,
                                 std::uint64_t firstPath);

struct CouplingReport {
  std::uint64_t nSamples = 0;
  std::uint64_t seed = 0;
  double timeKs = 0.0;
  double timePValue = 0.0;
  double stateKs = 0.0;
  double statePValue = 0.0;
  bool corrupted = false;
};

inline constexpr std::uint64_t kMinKsSamples = 10000;

// Compares the laws of (stop time, stop state) under the two thinnings of a
// two-colour stream. Throws HypothesisViolation when the sets overlap.
CouplingReport couplingCheck(const GameSpec& game, double x0, const IntervalUnion& supSet,
                             const IntervalUnion& infSet, std::uint64_t nSamples,
                             std::uint64_t seed, bool corruptApproach2 = false);

enum class PerturbKind { Shift, Shrink, Grow };

const char* toString(PerturbKind k);

IntervalUnion perturb(const IntervalUnion& set, PerturbKind kind, double amount);

struct Deviation {
  Player player;
  PerturbKind kind;
  double amount;
};

// k-th deviation of `count`: kinds cycle grow, shrink, shift with amounts
// 0.1, 0.2, ... per full cycle.
std::vector<Deviation> standardDeviations(Player player, int count);

struct DeviationResult {
  int id = 0;
  Deviation deviation;
  double mean = 0.0;
  double stderror = 0.0;
  double diffMean = 0.0;      // J(deviation) - J(optimal), paired
  double diffStderror = 0.0;  // paired standard error under common random numbers
  double pooledSE = 0.0;      // sqrt(se_dev^2 + se_opt^2)
  bool violation = false;
};

struct DeviationReport {
  double x0 = 0.0;
  ConstraintMode mode = ConstraintMode::Common;
  std::uint64_t nPaths = 0;
  std::uint64_t seed = 0;
  double optimalMean = 0.0;
  double optimalStderror = 0.0;
  std::vector<DeviationResult> results;

  int violations() const;
  // Largest sup-player gain (diffMean - 3 pooledSE), negative when none improves.
  double bestSupImprovementMargin() const;
};

DeviationReport evaluateDeviations(const GameSpec& game, double x0, const StoppingSets& sets,
                                   const std::vector<Deviation>& deviations,
                                   std::uint64_t nPaths, std::uint64_t seed,
                                   double horizonCap);

DeviationReport saddleDeviationBattery(const GameSpec& game, double x0, const StoppingSets& sets,
                                       int deviations, std::uint64_t nPaths, std::uint64_t seed);
DeviationReport saddleDeviationBattery(const GameSpec& game, double x0,
                                       const GameSolution& solution, int deviations,
                                       std::uint64_t nPaths, std::uint64_t seed);

}  // namespace dynkin::mc
