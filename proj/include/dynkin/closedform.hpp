#pragma once

#include <optional>
#include <string>

#include "dynkin/model.hpp"

// Exact solution of the Brownian game with
//   l(x) = 1{|x| <= 1},
//   u(x) = lambda/(lambda+r) 1{|x| <= 1} + 1/(1+eps) 1{|x| > 1},
// and the modified payoffs under which common and independent values split.
namespace dynkin::closedform {

class NoRootAboveOne : public InvalidParameters {
 public:
  using InvalidParameters::InvalidParameters;
};

struct ClosedFormSolution {
  double r = 0.0;
  double lambda = 0.0;
  double theta = 0.0;  // sqrt(2 r)
  double phi = 0.0;    // sqrt(2 (lambda + r))
  double eps = 0.0;
  double xStar = 0.0;  // free boundary of the inf player's region
  double coeffA = 0.0;
  double coeffB = 0.0;
  double coeffC = 0.0;
  double coeffD = 0.0;
};

// Right-hand side of the admissibility bound on eps.
double epsLowerBound(double theta, double phi);

// f(x) = theta (theta sinh(phi x) + phi cosh(phi x)).
double freeBoundaryFunction(double theta, double phi, double x);

// Unique root of f(x) = (phi^2 - theta^2) eps sinh(phi), which lies in (1, inf).
double solveXStar(double theta, double phi, double eps);

ClosedFormSolution buildSolution(double r, double lambda, double eps);

// Five-branch value function; even in x.
double evalV(const ClosedFormSolution& sol, double x);

enum class Side { Left, Right };

// Analytic derivatives of the branch active on the given side of x.
double evalVPrime(const ClosedFormSolution& sol, double x, Side side = Side::Right);
double evalVSecond(const ClosedFormSolution& sol, double x, Side side = Side::Right);

// The payoffs with the closed interval [-1, 1] exactly as in the model.
double exampleL(double x);
double exampleU(const ClosedFormSolution& sol, double x);

// Same payoffs as FunctionSpecs (right-continuous at the breakpoints +-1).
FunctionSpec exampleLower();
FunctionSpec exampleUpper(const ClosedFormSolution& sol);
GameSpec exampleGame(const ClosedFormSolution& sol, ConstraintMode mode);

struct DiagnosticsReport {
  double gridStep = 0.0;
  double range = 0.0;
  double rootResidual = 0.0;  // relative
  double valueAtXStarError = 0.0;
  bool signsOk = false;
  double evennessError = 0.0;
  double monotoneViolation = 0.0;
  double c1MismatchAtOne = 0.0;    // max over x = +-1
  double c1MismatchAtXStar = 0.0;  // max over x = +-x*
  double maxHjbResidual = 0.0;
  long orderingFailures = 0;
  double orderingMinMargin = 0.0;  // smallest strict-inequality slack seen

  bool passed(double residualTol = 1e-8, double c1Tol = 1e-10) const;
};

DiagnosticsReport verifyClosedForm(const ClosedFormSolution& sol, double gridStep,
                                double range = 8.0);

struct CounterexamplePayoffs {
  FunctionSpec lower;  // l~
  FunctionSpec upper;  // u~ = u
  double delta = 0.0;
  double shoulderValue = 0.0;  // V(x* - delta)
  double shoulderLo = 0.0;     // 1
  double shoulderHi = 0.0;     // x* - 2 delta
};

CounterexamplePayoffs buildCounterexamplePayoffs(const ClosedFormSolution& sol, double delta);

// Minimum over grid nodes in (1, x* - 2 delta) of
//   V''/2 - phi^2/2 V + (phi^2 - theta^2)/2 max(min(u~, V), l~),
// the common-constraint HJB residual of V under the modified payoffs.
double counterexampleResidualMin(const ClosedFormSolution& sol,
                                 const CounterexamplePayoffs& payoffs, double gridStep);

GameSpec counterexampleGame(const ClosedFormSolution& sol, const CounterexamplePayoffs& payoffs,
                            ConstraintMode mode);

// CSV over [-3, 3] at step 1e-3: "x,l,u,V", or "x,l_tilde,u_tilde,V" when the
// counterexample payoffs are given.
void emitFigureData(const ClosedFormSolution& sol,
                    const std::optional<CounterexamplePayoffs>& payoffs, const std::string& path);

}  // namespace dynkin::closedform
