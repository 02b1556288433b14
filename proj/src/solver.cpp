#include "dynkin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dynkin {

const char* toString(BoundaryClosure b) {
  return b == BoundaryClosure::RobinDecay ? "robin" : "dirichlet";
}

BoundaryClosure parseBoundary(const std::string& s) {
  if (s == "robin" || s == "RobinDecay") return BoundaryClosure::RobinDecay;
  if (s == "dirichlet" || s == "DirichletZero") return BoundaryClosure::DirichletZero;
  throw ConfigError("unknown boundary closure '" + s + "'");
}

void GridConfig::validate() const {
  if (!std::isfinite(domainLo) || !std::isfinite(domainHi) || !(domainLo < domainHi))
    throw ConfigError("grid needs finite domainLo < domainHi");
  if (!(step > 0.0)) throw ConfigError("grid step must be positive");
  const double cells = (domainHi - domainLo) / step;
  if (std::abs(cells - std::round(cells)) > 1e-6 * std::max(1.0, cells))
    throw ConfigError("(domainHi - domainLo)/step must be an integer");
  if (std::round(cells) < 10.0) throw ConfigError("grid needs at least 10 cells");
  if (maxIterations <= 0) throw ConfigError("maxIterations must be positive");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
}

std::size_t GridConfig::nodes() const {
  return static_cast<std::size_t>(std::llround((domainHi - domainLo) / step)) + 1;
}

ValueGrid::ValueGrid(GridConfig config, std::vector<double> values, ConstraintMode mode)
    : config_(config), values_(std::move(values)), mode_(mode) {
  if (values_.size() != config_.nodes()) throw Error("value grid size does not match config");
}

double ValueGrid::interpolate(double x) const {
  if (x <= config_.domainLo) return values_.front();
  if (x >= config_.domainHi) return values_.back();
  const double pos = (x - config_.domainLo) / config_.step;
  const auto i = std::min(static_cast<std::size_t>(pos), values_.size() - 2);
  const double w = pos - static_cast<double>(i);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

Resolvent::Resolvent(const DiffusionSpec& diffusion, double rate, const GridConfig& cfg,
                     std::optional<double> closureRate)
    : rate_(rate),
      dirichletLo_(cfg.boundary == BoundaryClosure::DirichletZero ||
                   !(diffusion.diffusionAt(cfg.domainLo) > 0.0)),
      dirichletHi_(cfg.boundary == BoundaryClosure::DirichletZero ||
                   !(diffusion.diffusionAt(cfg.domainHi) > 0.0)),
      matrix_(assemble(diffusion, rate, closureRate.value_or(rate), cfg)) {}

Tridiagonal Resolvent::assemble(const DiffusionSpec& diffusion, double rate,
                                double closureRate, const GridConfig& cfg) {
  cfg.validate();
  if (!(rate > 0.0) || !(closureRate > 0.0))
    throw InvalidParameters("resolvent rate must be positive");
  const StateSpace space = diffusion.stateSpace();
  if (cfg.domainLo < space.lo || cfg.domainHi > space.hi)
    throw ConfigError("grid domain extends outside the state space");

  const std::size_t n = cfg.nodes();
  const double h = cfg.step;
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cfg.node(i);
    const double d = diffusion.diffusionAt(x);
    const double mu = diffusion.driftAt(x);
    const double a = d / (h * h);
    double cl, cu, cd;
    if (std::abs(mu) * h <= 2.0 * d) {
      const double b = mu / (2.0 * h);
      cl = -(a - b);
      cu = -(a + b);
      cd = rate + 2.0 * a;
    } else if (mu > 0.0) {
      cl = -a;
      cu = -(a + mu / h);
      cd = rate + 2.0 * a + mu / h;
    } else {
      cl = -(a - mu / h);
      cu = -a;
      cd = rate + 2.0 * a - mu / h;
    }
    lower[i] = cl;
    diag[i] = cd;
    upper[i] = cu;
  }

  // Decay rates of the frozen-coefficient homogeneous solutions at each end.
  auto decayRoot = [&](double x, bool left) {
    const double d = diffusion.diffusionAt(x);
    const double mu = diffusion.driftAt(x);
    const double disc = std::sqrt(mu * mu + 4.0 * d * closureRate);
    return left ? (-mu + disc) / (2.0 * d) : (-mu - disc) / (2.0 * d);
  };
  const bool robinLo =
      cfg.boundary == BoundaryClosure::RobinDecay && diffusion.diffusionAt(cfg.domainLo) > 0.0;
  const bool robinHi =
      cfg.boundary == BoundaryClosure::RobinDecay && diffusion.diffusionAt(cfg.domainHi) > 0.0;
  if (robinLo) {
    // Ghost node w_{-1} = w_1 - 2 h k w_0.
    const double k = decayRoot(cfg.domainLo, true);
    diag[0] -= 2.0 * h * k * lower[0];
    upper[0] += lower[0];
  } else {
    diag[0] = 1.0;
    upper[0] = 0.0;
  }
  lower[0] = 0.0;
  if (robinHi) {
    // Ghost node w_n = w_{n-2} + 2 h k w_{n-1}, k < 0.
    const double k = decayRoot(cfg.domainHi, false);
    diag[n - 1] += 2.0 * h * k * upper[n - 1];
    lower[n - 1] += upper[n - 1];
  } else {
    diag[n - 1] = 1.0;
    lower[n - 1] = 0.0;
  }
  upper[n - 1] = 0.0;
  return Tridiagonal(std::move(lower), std::move(diag), std::move(upper));
}

void Resolvent::apply(std::span<const double> g, std::span<double> w) const {
  const std::size_t n = matrix_.size();
  if (g.size() != n || w.size() != n) throw Error("resolvent input size mismatch");
  if (!dirichletLo_ && !dirichletHi_) {
    matrix_.solve(g, w);
    return;
  }
  // Dirichlet rows carry a zero right-hand side.
  std::vector<double> rhs(g.begin(), g.end());
  if (dirichletLo_) rhs[0] = 0.0;
  if (dirichletHi_) rhs[n - 1] = 0.0;
  matrix_.solve(rhs, w);
}

std::vector<double> resolventApply(const DiffusionSpec& diffusion, double rate,
                                   const GridConfig& cfg, std::span<const double> g) {
  for (double x : g)
    if (!std::isfinite(x)) throw InvalidParameters("resolvent data must be finite");
  const Resolvent res(diffusion, rate, cfg);
  std::vector<double> w(g.size());
  res.apply(g, w);
  return w;
}

void driverSerial(ConstraintMode mode, double lambda, std::span<const double> l,
                  std::span<const double> u, std::span<const double> v, std::span<double> out) {
  const std::size_t n = v.size();
  if (mode == ConstraintMode::Common) {
    for (std::size_t i = 0; i < n; ++i) out[i] = lambda * std::max(l[i], std::min(v[i], u[i]));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = lambda * std::max(l[i], v[i]) + lambda * std::min(v[i], u[i]);
  }
}

void driverParallel(ConstraintMode mode, double lambda, std::span<const double> l,
                    std::span<const double> u, std::span<const double> v, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(v.size());
  if (mode == ConstraintMode::Common) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = lambda * std::max(l[i], std::min(v[i], u[i]));
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[i] = lambda * std::max(l[i], v[i]) + lambda * std::min(v[i], u[i]);
  }
}

namespace {

double resolventRate(const GameSpec& game, ConstraintMode mode) {
  const double lam = game.signalRate();
  return mode == ConstraintMode::Common ? lam + game.discount() : 2.0 * lam + game.discount();
}

std::vector<double> sampleNodes(const FunctionSpec& f, const GridConfig& cfg) {
  std::vector<double> out(cfg.nodes());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.valueUnchecked(cfg.node(i));
  return out;
}

}  // namespace

FixedPointMap::FixedPointMap(const GameSpec& game, const GridConfig& cfg, ConstraintMode mode)
    : mode_(mode),
      lambda_(game.signalRate()),
      discount_(game.discount()),
      l_(sampleNodes(game.lower(), cfg)),
      u_(sampleNodes(game.upper(), cfg)),
      resolvent_(game.diffusion(), resolventRate(game, mode), cfg),
      scratch_(cfg.nodes()) {}

double FixedPointMap::contractionFactor() const {
  return mode_ == ConstraintMode::Common ? lambda_ / (lambda_ + discount_)
                                         : 2.0 * lambda_ / (2.0 * lambda_ + discount_);
}

void FixedPointMap::apply(std::span<const double> v, std::span<double> out) const {
  driverParallel(mode_, lambda_, l_, u_, v, scratch_);
  resolvent_.apply(scratch_, out);
}

namespace {

GameSolution iterate(const GameSpec& game, const GridConfig& cfg, ConstraintMode mode) {
  cfg.validate();
  const FixedPointMap map(game, cfg, mode);
  const std::size_t n = cfg.nodes();
  std::vector<double> v(n, 0.0), next(n, 0.0);
  double change = kInf;
  int it = 0;
  while (it < cfg.maxIterations) {
    map.apply(v, next);
    ++it;
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(next[i] - v[i]));
    v.swap(next);
    if (change <= cfg.tolerance) break;
  }
  if (!(change <= cfg.tolerance)) {
    std::ostringstream os;
    os << "value iteration did not converge in " << it << " iterations (last change " << change
       << ")";
    throw NonConvergence(os.str(), it, change);
  }
  ValueGrid grid(cfg, std::move(v), mode);
  StoppingSets sets = extractSets(grid, game.lower(), game.upper(), mode);
  return GameSolution{std::move(grid), std::move(sets), it, change};
}

}  // namespace

GameSolution solveCommon(const GameSpec& game, const GridConfig& cfg) {
  if (game.mode() != ConstraintMode::Common)
    throw InvalidParameters("solveCommon needs a common-constraint game");
  return iterate(game, cfg, ConstraintMode::Common);
}

GameSolution solveIndependent(const GameSpec& game, const GridConfig& cfg) {
  if (game.mode() != ConstraintMode::Independent)
    throw InvalidParameters("solveIndependent needs an independent-constraint game");
  return iterate(game, cfg, ConstraintMode::Independent);
}

GameSolution solve(const GameSpec& game, const GridConfig& cfg) {
  return game.mode() == ConstraintMode::Common ? solveCommon(game, cfg)
                                               : solveIndependent(game, cfg);
}

bool inSupSet(ConstraintMode mode, double v, double l, double u) {
  if (v < l - kSetTolerance) return true;
  return mode == ConstraintMode::Common && v > l + kSetTolerance && l > u + kSetTolerance;
}

bool inInfSet(double v, double u) { return v >= u - kSetTolerance; }

namespace {

// Merge runs of flagged nodes into intervals. Interior ends sit midway
// between the last flagged node and its unflagged neighbour; runs that reach
// the grid edge extend to the edge of the state space.
IntervalUnion mergeRuns(const std::vector<char>& flag, const GridConfig& cfg, StateSpace space,
                        bool closedEnds) {
  std::vector<Interval> parts;
  const std::size_t n = flag.size();
  std::size_t i = 0;
  while (i < n) {
    if (!flag[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && flag[j + 1]) ++j;
    Interval iv;
    if (i == 0) {
      iv.lo = space.lo;
      iv.loClosed = false;
    } else {
      iv.lo = 0.5 * (cfg.node(i - 1) + cfg.node(i));
      iv.loClosed = closedEnds;
    }
    if (j == n - 1) {
      iv.hi = space.hi;
      iv.hiClosed = false;
    } else {
      iv.hi = 0.5 * (cfg.node(j) + cfg.node(j + 1));
      iv.hiClosed = closedEnds;
    }
    parts.push_back(iv);
    i = j + 1;
  }
  return IntervalUnion(std::move(parts));
}

}  // namespace

StoppingSets extractSets(const ValueGrid& value, const FunctionSpec& l, const FunctionSpec& u,
                         ConstraintMode mode) {
  const GridConfig& cfg = value.config();
  const std::size_t n = value.size();
  std::vector<char> inA(n), inB(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = cfg.node(i);
    const double v = value.values()[i];
    const double lv = l.valueUnchecked(x);
    const double uv = u.valueUnchecked(x);
    inA[i] = inSupSet(mode, v, lv, uv);
    inB[i] = inInfSet(v, uv);
  }
  const StateSpace space = l.domain();
  return {mergeRuns(inA, cfg, space, false), mergeRuns(inB, cfg, space, true)};
}

}  // namespace dynkin
