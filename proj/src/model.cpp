#include "dynkin/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dynkin {

DiffusionSpec::DiffusionSpec(DiffusionKind kind, double drift, double volatility)
    : kind_(kind), drift_(drift), volatility_(volatility) {
  if (!(volatility > 0.0) || !std::isfinite(volatility))
    throw InvalidParameters("diffusion volatility must be positive");
  if (!std::isfinite(drift)) throw InvalidParameters("diffusion drift must be finite");
  if (kind == DiffusionKind::OrnsteinUhlenbeck && !(drift > 0.0))
    throw InvalidParameters("Ornstein-Uhlenbeck mean-reversion speed must be positive");
}

StateSpace DiffusionSpec::stateSpace() const {
  if (kind_ == DiffusionKind::GeometricBM) return {0.0, kInf};
  return {-kInf, kInf};
}

double DiffusionSpec::driftAt(double x) const {
  switch (kind_) {
    case DiffusionKind::BrownianMotion: return drift_;
    case DiffusionKind::GeometricBM: return drift_ * x;
    case DiffusionKind::OrnsteinUhlenbeck: return -drift_ * x;
  }
  return 0.0;
}

double DiffusionSpec::diffusionAt(double x) const {
  const double s = kind_ == DiffusionKind::GeometricBM ? volatility_ * x : volatility_;
  return 0.5 * s * s;
}

double DiffusionSpec::transition(double x, double dt, double z) const {
  switch (kind_) {
    case DiffusionKind::BrownianMotion:
      return x + drift_ * dt + volatility_ * std::sqrt(dt) * z;
    case DiffusionKind::GeometricBM:
      return x * std::exp((drift_ - 0.5 * volatility_ * volatility_) * dt +
                          volatility_ * std::sqrt(dt) * z);
    case DiffusionKind::OrnsteinUhlenbeck: {
      const double decay = std::exp(-drift_ * dt);
      const double var = volatility_ * volatility_ * (-std::expm1(-2.0 * drift_ * dt)) /
                         (2.0 * drift_);
      return x * decay + std::sqrt(var) * z;
    }
  }
  return x;
}

namespace {

double evalPiece(const Piece& p, double x) {
  return std::visit(
      [x](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Constant>) {
          return q.c;
        } else if constexpr (std::is_same_v<T, Affine>) {
          return q.a * x + q.b;
        } else if constexpr (std::is_same_v<T, PositivePartAffine>) {
          return std::max(q.a * x + q.b, 0.0);
        } else {
          if (x <= q.x.front()) return q.y.front();
          if (x >= q.x.back()) return q.y.back();
          const auto it = std::upper_bound(q.x.begin(), q.x.end(), x);
          const auto i = static_cast<std::size_t>(it - q.x.begin());
          const double w = (x - q.x[i - 1]) / (q.x[i] - q.x[i - 1]);
          return (1.0 - w) * q.y[i - 1] + w * q.y[i];
        }
      },
      p);
}

// Non-negativity of a piece on the cell [lo, hi].
void checkPieceNonNegative(const Piece& p, double lo, double hi, std::size_t cell) {
  constexpr double slack = 1e-12;
  auto fail = [cell]() {
    std::ostringstream os;
    os << "payoff piece " << cell << " takes negative values";
    throw InvalidParameters(os.str());
  };
  std::visit(
      [&](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Constant>) {
          if (!(q.c >= 0.0) || !std::isfinite(q.c)) fail();
        } else if constexpr (std::is_same_v<T, Affine>) {
          if (!std::isfinite(q.a) || !std::isfinite(q.b)) fail();
          if (std::isinf(lo) && q.a > 0.0) fail();
          if (std::isinf(hi) && q.a < 0.0) fail();
          if (std::isfinite(lo) && q.a * lo + q.b < -slack) fail();
          if (std::isfinite(hi) && q.a * hi + q.b < -slack) fail();
        } else if constexpr (std::is_same_v<T, PositivePartAffine>) {
          if (!std::isfinite(q.a) || !std::isfinite(q.b)) fail();
        } else {
          if (q.x.size() < 2 || q.x.size() != q.y.size())
            throw InvalidParameters("tabulated piece needs matching x/y of length >= 2");
          for (std::size_t i = 1; i < q.x.size(); ++i)
            if (!(q.x[i] > q.x[i - 1]))
              throw InvalidParameters("tabulated piece grid must be strictly increasing");
          for (double y : q.y)
            if (!(y >= 0.0) || !std::isfinite(y)) fail();
        }
      },
      p);
}

}  // namespace

FunctionSpec::FunctionSpec(std::vector<double> breakpoints, std::vector<Piece> pieces,
                           StateSpace domain)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)), domain_(domain) {
  if (pieces_.size() != breakpoints_.size() + 1)
    throw InvalidParameters("need exactly one piece per cell (breakpoints + 1)");
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!std::isfinite(breakpoints_[i]))
      throw InvalidParameters("breakpoints must be finite");
    if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1]))
      throw InvalidParameters("breakpoints must be strictly increasing");
  }
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    double lo = i == 0 ? -kInf : breakpoints_[i - 1];
    double hi = i == breakpoints_.size() ? kInf : breakpoints_[i];
    lo = std::max(lo, domain_.lo);
    hi = std::min(hi, domain_.hi);
    if (lo < hi) checkPieceNonNegative(pieces_[i], lo, hi, i);
  }
}

std::size_t FunctionSpec::cellOf(double x) const {
  return static_cast<std::size_t>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin());
}

double FunctionSpec::valueUnchecked(double x) const { return evalPiece(pieces_[cellOf(x)], x); }

double FunctionSpec::operator()(double x) const {
  if (!domain_.contains(x)) {
    std::ostringstream os;
    os << "x = " << x << " outside the state space (" << domain_.lo << ", " << domain_.hi << ")";
    throw DomainError(os.str());
  }
  return valueUnchecked(x);
}

double FunctionSpec::leftLimit(double x) const {
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), x);
  return evalPiece(pieces_[static_cast<std::size_t>(it - breakpoints_.begin())], x);
}

double FunctionSpec::supOn(double lo, double hi) const {
  lo = std::max(lo, domain_.lo);
  hi = std::min(hi, domain_.hi);
  if (!(lo <= hi)) return 0.0;
  double best = 0.0;
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double a = std::max(lo, i == 0 ? -kInf : breakpoints_[i - 1]);
    const double b = std::min(hi, i == breakpoints_.size() ? kInf : breakpoints_[i]);
    if (a > b) continue;
    const Piece& p = pieces_[i];
    std::vector<double> probes{a, b};
    if (const auto* t = std::get_if<Tabulated>(&p))
      for (double x : t->x)
        if (x > a && x < b) probes.push_back(x);
    for (double x : probes) {
      double v;
      if (std::isinf(x)) {
        // Unbounded affine growth toward an infinite end.
        if (const auto* q = std::get_if<Affine>(&p)) {
          v = q->a == 0.0 ? q->b : kInf;
        } else if (const auto* q2 = std::get_if<PositivePartAffine>(&p)) {
          v = q2->a == 0.0 ? std::max(q2->b, 0.0) : ((x > 0) == (q2->a > 0) ? kInf : 0.0);
        } else {
          v = evalPiece(p, x > 0 ? std::numeric_limits<double>::max()
                                 : std::numeric_limits<double>::lowest());
        }
      } else {
        v = evalPiece(p, x);
      }
      best = std::max(best, v);
    }
  }
  return best;
}

FunctionSpec FunctionSpec::withDomain(StateSpace domain) const {
  return FunctionSpec(breakpoints_, pieces_, domain);
}

double evalFunction(const FunctionSpec& f, double x) { return f(x); }

const char* toString(ConstraintMode mode) {
  return mode == ConstraintMode::Common ? "common" : "independent";
}

ConstraintMode parseMode(const std::string& s) {
  if (s == "common" || s == "Common") return ConstraintMode::Common;
  if (s == "independent" || s == "Independent") return ConstraintMode::Independent;
  throw ConfigError("unknown constraint mode '" + s + "'");
}

GameSpec::GameSpec(DiffusionSpec diffusion, FunctionSpec lower, FunctionSpec upper,
                   double discount, double signalRate, ConstraintMode mode,
                   double terminalPayoff)
    : diffusion_(diffusion),
      lower_(lower.withDomain(diffusion.stateSpace())),
      upper_(upper.withDomain(diffusion.stateSpace())),
      discount_(discount),
      signalRate_(signalRate),
      mode_(mode) {
  if (!(discount > 0.0) || !std::isfinite(discount))
    throw InvalidParameters("discount rate r must be positive");
  if (!(signalRate > 0.0) || !std::isfinite(signalRate))
    throw InvalidParameters("signal rate lambda must be positive");
  if (terminalPayoff != 0.0)
    throw InvalidParameters("only a zero terminal payoff (M_inf = 0) is supported");
}

GameSpec GameSpec::withMode(ConstraintMode mode) const {
  GameSpec g = *this;
  g.mode_ = mode;
  return g;
}

GameSpec GameSpec::withPayoffs(FunctionSpec lower, FunctionSpec upper) const {
  return GameSpec(diffusion_, std::move(lower), std::move(upper), discount_, signalRate_, mode_);
}

double GameSpec::payoffScale(double lo, double hi) const {
  return std::max(lower_.supOn(lo, hi), upper_.supOn(lo, hi));
}

bool Interval::intersects(const Interval& o) const {
  const double l = std::max(lo, o.lo);
  const bool lc = lo > o.lo ? loClosed : (lo < o.lo ? o.loClosed : loClosed && o.loClosed);
  const double h = std::min(hi, o.hi);
  const bool hc = hi < o.hi ? hiClosed : (hi > o.hi ? o.hiClosed : hiClosed && o.hiClosed);
  if (l < h) return true;
  return l == h && lc && hc;
}

IntervalUnion::IntervalUnion(std::vector<Interval> parts) : parts_(std::move(parts)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    const Interval& p = parts_[i];
    if (!(p.lo <= p.hi) || (p.lo == p.hi && !(p.loClosed && p.hiClosed)))
      throw InvalidParameters("empty or inverted interval in union");
    if (i > 0) {
      const Interval& q = parts_[i - 1];
      if (q.hi > p.lo || q.intersects(p))
        throw InvalidParameters("intervals in a union must be sorted and disjoint");
    }
  }
}

bool IntervalUnion::contains(double x) const {
  return std::any_of(parts_.begin(), parts_.end(),
                     [x](const Interval& p) { return p.contains(x); });
}

bool IntervalUnion::intersects(const IntervalUnion& o) const {
  for (const auto& a : parts_)
    for (const auto& b : o.parts_)
      if (a.intersects(b)) return true;
  return false;
}

}  // namespace dynkin
