#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace dynkin {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Error hierarchy. The CLI maps these onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidParameters : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class HypothesisViolation : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, int iterations, double lastChange)
      : Error(what), iterations_(iterations), lastChange_(lastChange) {}
  int iterations() const { return iterations_; }
  double lastChange() const { return lastChange_; }

 private:
  int iterations_;
  double lastChange_;
};

// Open interval (lo, hi); either end may be infinite.
struct StateSpace {
  double lo = -kInf;
  double hi = kInf;

  bool contains(double x) const { return x > lo && x < hi; }
};

enum class DiffusionKind { BrownianMotion, GeometricBM, OrnsteinUhlenbeck };

/// One-dimensional time-homogeneous diffusion.
///
///   BrownianMotion:     dX = mu dt + sigma dW            on (-inf, inf)
///   GeometricBM:        dX = mu X dt + sigma X dW        on (0, inf)
///   OrnsteinUhlenbeck:  dX = -mu X dt + sigma dW, mu > 0 on (-inf, inf)
class DiffusionSpec {
 public:
  DiffusionSpec(DiffusionKind kind, double drift, double volatility);

  static DiffusionSpec brownian(double drift = 0.0, double volatility = 1.0) {
    return {DiffusionKind::BrownianMotion, drift, volatility};
  }

  DiffusionKind kind() const { return kind_; }
  double drift() const { return drift_; }
  double volatility() const { return volatility_; }
  StateSpace stateSpace() const;

  // Generator coefficients: L f = driftAt(x) f' + diffusionAt(x) f''.
  double driftAt(double x) const;
  double diffusionAt(double x) const;

  // Exact transition X_{t+dt} given X_t = x and a standard normal z.
  double transition(double x, double dt, double z) const;

 private:
  DiffusionKind kind_;
  double drift_;
  double volatility_;
};

struct Constant {
  double c;
};
// a*x + b
struct Affine {
  double a;
  double b;
};
// max(a*x + b, 0)
struct PositivePartAffine {
  double a;
  double b;
};
// Linear interpolation through (x[i], y[i]); flat beyond the table ends.
struct Tabulated {
  std::vector<double> x;
  std::vector<double> y;
};

using Piece = std::variant<Constant, Affine, PositivePartAffine, Tabulated>;

/// Piecewise non-negative function. Breakpoints b_0 < ... < b_{m-1} split the
/// line into m+1 cells; cell i is [b_{i-1}, b_i), so evaluation at a
/// breakpoint uses the right-hand cell.
class FunctionSpec {
 public:
  FunctionSpec() : pieces_{Constant{0.0}} {}
  FunctionSpec(std::vector<double> breakpoints, std::vector<Piece> pieces,
               StateSpace domain = {});

  static FunctionSpec constant(double c, StateSpace domain = {}) {
    return FunctionSpec({}, {Constant{c}}, domain);
  }

  // Throws DomainError outside the domain.
  double operator()(double x) const;
  double valueUnchecked(double x) const;
  double leftLimit(double x) const;

  // Supremum over [lo, hi] intersected with the domain (may be +inf).
  double supOn(double lo, double hi) const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const StateSpace& domain() const { return domain_; }
  FunctionSpec withDomain(StateSpace domain) const;

 private:
  std::size_t cellOf(double x) const;

  std::vector<double> breakpoints_;
  std::vector<Piece> pieces_;
  StateSpace domain_;
};

double evalFunction(const FunctionSpec& f, double x);

// Payoff when both players stop at the same signal: the sup player wins.
inline double payoffOnTie(double lVal, double /*uVal*/) { return lVal; }

enum class ConstraintMode { Common, Independent };

const char* toString(ConstraintMode mode);
ConstraintMode parseMode(const std::string& s);

class GameSpec {
 public:
  GameSpec(DiffusionSpec diffusion, FunctionSpec lower, FunctionSpec upper,
           double discount, double signalRate, ConstraintMode mode,
           double terminalPayoff = 0.0);

  const DiffusionSpec& diffusion() const { return diffusion_; }
  const FunctionSpec& lower() const { return lower_; }
  const FunctionSpec& upper() const { return upper_; }
  double discount() const { return discount_; }
  double signalRate() const { return signalRate_; }
  ConstraintMode mode() const { return mode_; }
  double terminalPayoff() const { return 0.0; }

  GameSpec withMode(ConstraintMode mode) const;
  GameSpec withPayoffs(FunctionSpec lower, FunctionSpec upper) const;

  // sup of max(l, u) over [lo, hi].
  double payoffScale(double lo, double hi) const;

 private:
  DiffusionSpec diffusion_;
  FunctionSpec lower_;
  FunctionSpec upper_;
  double discount_;
  double signalRate_;
  ConstraintMode mode_;
};

struct Interval {
  double lo;
  double hi;
  bool loClosed = true;
  bool hiClosed = true;

  bool contains(double x) const {
    return (x > lo || (loClosed && x == lo)) && (x < hi || (hiClosed && x == hi));
  }
  bool intersects(const Interval& o) const;
};

/// Sorted union of pairwise-disjoint intervals.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<Interval> parts);

  static IntervalUnion whole() { return IntervalUnion({{-kInf, kInf, false, false}}); }

  bool contains(double x) const;
  bool empty() const { return parts_.empty(); }
  bool intersects(const IntervalUnion& o) const;
  const std::vector<Interval>& parts() const { return parts_; }

 private:
  std::vector<Interval> parts_;
};

struct StoppingSets {
  IntervalUnion supSet;  // A
  IntervalUnion infSet;  // B
};

}  // namespace dynkin
