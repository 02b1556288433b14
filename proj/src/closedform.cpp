#include "dynkin/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace dynkin::closedform {

double epsLowerBound(double theta, double phi) {
  if (!(theta > 0.0) || !(phi > theta))
    throw InvalidParameters("need phi > theta > 0 for the eps bound");
  const double num = theta * theta * std::sinh(phi) + theta * phi * std::cosh(phi);
  return num / ((phi * phi - theta * theta) * std::sinh(phi));
}

double freeBoundaryFunction(double theta, double phi, double x) {
  return theta * (theta * std::sinh(phi * x) + phi * std::cosh(phi * x));
}

double solveXStar(double theta, double phi, double eps) {
  if (!(theta > 0.0) || !(phi > theta))
    throw InvalidParameters("need phi > theta > 0 for the free boundary");
  const double rhs = (phi * phi - theta * theta) * eps * std::sinh(phi);
  auto g = [&](double x) { return freeBoundaryFunction(theta, phi, x) - rhs; };
  if (!(g(1.0) < 0.0)) {
    std::ostringstream os;
    os << "eps = " << eps << " is not above the bound " << epsLowerBound(theta, phi)
       << "; no free boundary above 1";
    throw NoRootAboveOne(os.str());
  }
  double lo = 1.0;
  double hi = 2.0;
  while (g(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(g(hi))) throw NoRootAboveOne("free boundary bracket overflowed");
  }
  for (int it = 0; it < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi;
       ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) <= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  // Of the final bracket ends, return the one with the smaller residual.
  return std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi;
}

ClosedFormSolution buildSolution(double r, double lambda, double eps) {
  if (!(r > 0.0) || !(lambda > 0.0)) throw InvalidParameters("need r > 0 and lambda > 0");
  ClosedFormSolution s;
  s.r = r;
  s.lambda = lambda;
  s.eps = eps;
  s.theta = std::sqrt(2.0 * r);
  s.phi = std::sqrt(2.0 * (lambda + r));
  s.xStar = solveXStar(s.theta, s.phi, eps);

  const double th = s.theta;
  const double ph = s.phi;
  const double ph2 = ph * ph;
  const double k = 1.0 / (1.0 + eps);
  s.coeffA = (th * th - th * ph) / ph2 * k * std::exp(-ph * s.xStar) -
             (ph2 - th * th) / ph2 * eps * k * std::exp(-ph);
  s.coeffB = (th * th - th * ph) / (2.0 * ph2) * k * std::exp(-ph * s.xStar);
  s.coeffC = (th * th + th * ph) / (2.0 * ph2) * k * std::exp(ph * s.xStar);
  s.coeffD = k * std::exp(th * s.xStar);
  return s;
}

namespace {

enum class Branch { Center, Shoulder, Outer };

// Branch in terms of s = |x|: center on [0, 1], shoulder on (1, x*], outer beyond.
Branch branchAt(const ClosedFormSolution& sol, double s, Side side) {
  // The left-hand branch at a junction is the one ending there.
  if (side == Side::Left) {
    if (s <= 1.0) return Branch::Center;
    return s <= sol.xStar ? Branch::Shoulder : Branch::Outer;
  }
  if (s < 1.0) return Branch::Center;
  return s < sol.xStar ? Branch::Shoulder : Branch::Outer;
}

double ratio(const ClosedFormSolution& sol) {
  return (sol.phi * sol.phi - sol.theta * sol.theta) / (sol.phi * sol.phi);
}

// d^order/ds^order of the given branch at s >= 0.
double branchEval(const ClosedFormSolution& sol, Branch b, double s, int order) {
  const double ph = sol.phi;
  const double th = sol.theta;
  switch (b) {
    case Branch::Center: {
      if (order == 0) return sol.coeffA * std::cosh(ph * s) + ratio(sol);
      if (order == 1) return sol.coeffA * ph * std::sinh(ph * s);
      return sol.coeffA * ph * ph * std::cosh(ph * s);
    }
    case Branch::Shoulder: {
      const double ep = std::exp(ph * s);
      const double em = std::exp(-ph * s);
      if (order == 0) return sol.coeffB * ep + sol.coeffC * em + ratio(sol) / (1.0 + sol.eps);
      if (order == 1) return ph * (sol.coeffB * ep - sol.coeffC * em);
      return ph * ph * (sol.coeffB * ep + sol.coeffC * em);
    }
    case Branch::Outer: {
      const double e = sol.coeffD * std::exp(-th * s);
      if (order == 0) return e;
      if (order == 1) return -th * e;
      return th * th * e;
    }
  }
  return 0.0;
}

}  // namespace

double evalV(const ClosedFormSolution& sol, double x) {
  const double s = std::abs(x);
  const Branch b = s <= 1.0 ? Branch::Center : (s <= sol.xStar ? Branch::Shoulder : Branch::Outer);
  return branchEval(sol, b, s, 0);
}

double evalVPrime(const ClosedFormSolution& sol, double x, Side side) {
  // For x < 0 the left side of x corresponds to the right side of |x|.
  const double s = std::abs(x);
  const Side sSide = x < 0.0 ? (side == Side::Left ? Side::Right : Side::Left) : side;
  const double d = branchEval(sol, branchAt(sol, s, sSide), s, 1);
  return x < 0.0 ? -d : d;
}

double evalVSecond(const ClosedFormSolution& sol, double x, Side side) {
  const double s = std::abs(x);
  const Side sSide = x < 0.0 ? (side == Side::Left ? Side::Right : Side::Left) : side;
  return branchEval(sol, branchAt(sol, s, sSide), s, 2);
}

double exampleL(double x) { return std::abs(x) <= 1.0 ? 1.0 : 0.0; }

double exampleU(const ClosedFormSolution& sol, double x) {
  return std::abs(x) <= 1.0 ? sol.lambda / (sol.lambda + sol.r) : 1.0 / (1.0 + sol.eps);
}

FunctionSpec exampleLower() {
  return FunctionSpec({-1.0, 1.0}, {Constant{0.0}, Constant{1.0}, Constant{0.0}});
}

FunctionSpec exampleUpper(const ClosedFormSolution& sol) {
  const double outside = 1.0 / (1.0 + sol.eps);
  return FunctionSpec({-1.0, 1.0}, {Constant{outside}, Constant{sol.lambda / (sol.lambda + sol.r)},
                                    Constant{outside}});
}

GameSpec exampleGame(const ClosedFormSolution& sol, ConstraintMode mode) {
  return GameSpec(DiffusionSpec::brownian(), exampleLower(), exampleUpper(sol), sol.r,
                  sol.lambda, mode);
}

bool DiagnosticsReport::passed(double residualTol, double c1Tol) const {
  return rootResidual <= 1e-10 && valueAtXStarError <= 1e-12 && signsOk &&
         evennessError == 0.0 && monotoneViolation == 0.0 && c1MismatchAtOne <= c1Tol &&
         c1MismatchAtXStar <= c1Tol && maxHjbResidual <= residualTol && orderingFailures == 0;
}

DiagnosticsReport verifyClosedForm(const ClosedFormSolution& sol, double gridStep, double range) {
  if (!(gridStep > 0.0)) throw InvalidParameters("gridStep must be positive");
  DiagnosticsReport rep;
  rep.gridStep = gridStep;
  rep.range = range;

  const double ph = sol.phi;
  const double th = sol.theta;
  const double rhs = (ph * ph - th * th) * sol.eps * std::sinh(ph);
  rep.rootResidual = std::abs(freeBoundaryFunction(th, ph, sol.xStar) - rhs) / rhs;
  rep.valueAtXStarError = std::abs(evalV(sol, sol.xStar) - 1.0 / (1.0 + sol.eps));
  rep.signsOk = sol.coeffA < 0.0 && sol.coeffB < 0.0 && sol.coeffC > 0.0 && sol.coeffD > 0.0;

  for (double junction : {1.0, sol.xStar}) {
    double mismatch = 0.0;
    for (double x : {junction, -junction})
      mismatch = std::max(mismatch, std::abs(evalVPrime(sol, x, Side::Left) -
                                             evalVPrime(sol, x, Side::Right)));
    (junction == 1.0 ? rep.c1MismatchAtOne : rep.c1MismatchAtXStar) = mismatch;
  }

  constexpr double margin = 1e-12;
  const double k = 0.5 * (ph * ph - th * th);
  const long n = std::lround(2.0 * range / gridStep);
  rep.orderingMinMargin = kInf;
  double prevV = 0.0;
  for (long i = 0; i <= n; ++i) {
    const double x = -range + static_cast<double>(i) * gridStep;
    const double v = evalV(sol, x);
    const double l = exampleL(x);
    const double u = exampleU(sol, x);
    rep.evennessError = std::max(rep.evennessError, std::abs(v - evalV(sol, -x)));
    if (x >= 0.0 && i > 0 && -range + static_cast<double>(i - 1) * gridStep >= 0.0)
      rep.monotoneViolation = std::max(rep.monotoneViolation, std::max(0.0, v - prevV));
    prevV = v;

    if (std::abs(std::abs(x) - 1.0) >= gridStep) {
      const double resid = 0.5 * evalVSecond(sol, x) - 0.5 * ph * ph * v +
                           k * std::max(std::min(v, u), l);
      rep.maxHjbResidual = std::max(rep.maxHjbResidual, std::abs(resid));
    }

    // l > u > V on [-1,1]; V >= u > l on 1 < |x| <= x*; u > V > l beyond.
    const double s = std::abs(x);
    bool ok;
    double slack;
    if (s <= 1.0) {
      slack = std::min(l - u, u - v);
      ok = slack >= margin;
    } else if (s <= sol.xStar) {
      slack = u - l;
      ok = slack >= margin && v >= u - margin;
    } else {
      slack = std::min(u - v, v - l);
      ok = slack >= margin;
    }
    rep.orderingMinMargin = std::min(rep.orderingMinMargin, slack);
    if (!ok) ++rep.orderingFailures;
  }
  return rep;
}

CounterexamplePayoffs buildCounterexamplePayoffs(const ClosedFormSolution& sol, double delta) {
  const double maxDelta = (sol.xStar - 1.0) / 3.0;
  if (!(delta > 0.0) || !(delta < maxDelta)) {
    std::ostringstream os;
    os << "delta = " << delta << " outside (0, " << maxDelta << ")";
    throw InvalidParameters(os.str());
  }
  CounterexamplePayoffs p;
  p.delta = delta;
  p.shoulderValue = evalV(sol, sol.xStar - delta);
  p.shoulderLo = 1.0;
  p.shoulderHi = sol.xStar - 2.0 * delta;
  const double c = p.shoulderValue;
  p.lower = FunctionSpec({-p.shoulderHi, -1.0, 1.0, p.shoulderHi},
                         {Constant{0.0}, Constant{c}, Constant{1.0}, Constant{c}, Constant{0.0}});
  p.upper = exampleUpper(sol);
  return p;
}

double counterexampleResidualMin(const ClosedFormSolution& sol,
                                 const CounterexamplePayoffs& payoffs, double gridStep) {
  const double ph = sol.phi;
  const double k = 0.5 * (ph * ph - sol.theta * sol.theta);
  double best = kInf;
  const long n = std::lround((payoffs.shoulderHi - payoffs.shoulderLo) / gridStep);
  for (long i = 1; i < n; ++i) {
    const double x = payoffs.shoulderLo + static_cast<double>(i) * gridStep;
    if (!(x > payoffs.shoulderLo && x < payoffs.shoulderHi)) continue;
    const double v = evalV(sol, x);
    const double l = payoffs.lower(x);
    const double u = payoffs.upper(x);
    const double resid = 0.5 * evalVSecond(sol, x) - 0.5 * ph * ph * v +
                         k * std::max(std::min(u, v), l);
    best = std::min(best, resid);
  }
  return best;
}

GameSpec counterexampleGame(const ClosedFormSolution& sol, const CounterexamplePayoffs& payoffs,
                            ConstraintMode mode) {
  return GameSpec(DiffusionSpec::brownian(), payoffs.lower, payoffs.upper, sol.r, sol.lambda,
                  mode);
}

void emitFigureData(const ClosedFormSolution& sol,
                    const std::optional<CounterexamplePayoffs>& payoffs, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  const FunctionSpec lower = payoffs ? payoffs->lower : exampleLower();
  const FunctionSpec upper = payoffs ? payoffs->upper : exampleUpper(sol);
  out << (payoffs ? "x,l_tilde,u_tilde,V\n" : "x,l,u,V\n");
  out << std::setprecision(12);
  constexpr double step = 1e-3;
  const long n = std::lround(6.0 / step);
  for (long i = 0; i <= n; ++i) {
    const double x = -3.0 + static_cast<double>(i) * step;
    out << x << ',' << lower(x) << ',' << upper(x) << ',' << evalV(sol, x) << '\n';
  }
}

}  // namespace dynkin::closedform
