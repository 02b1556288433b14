#include "dynkin/json_io.hpp"

#include <cmath>
#include <fstream>

namespace dynkin {

namespace {

const char* kindName(DiffusionKind k) {
  switch (k) {
    case DiffusionKind::BrownianMotion: return "brownian";
    case DiffusionKind::GeometricBM: return "gbm";
    case DiffusionKind::OrnsteinUhlenbeck: return "ou";
  }
  return "?";
}

DiffusionKind parseKind(const std::string& s) {
  if (s == "brownian" || s == "BrownianMotion" || s == "bm") return DiffusionKind::BrownianMotion;
  if (s == "gbm" || s == "GeometricBM") return DiffusionKind::GeometricBM;
  if (s == "ou" || s == "OrnsteinUhlenbeck") return DiffusionKind::OrnsteinUhlenbeck;
  throw ConfigError("unknown diffusion kind '" + s + "'");
}

double numberOr(const Json& j, double fallback) {
  if (j.is_null()) return fallback;
  if (!j.is_number()) throw ConfigError("expected a number or null");
  return j.get<double>();
}

Json pieceToJson(const Piece& p, double lo, double hi) {
  Json out;
  out["cell"] = Json::array({finiteOrNull(lo), finiteOrNull(hi)});
  std::visit(
      [&out](const auto& q) {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Constant>) {
          out["kind"] = "const";
          out["params"] = {q.c};
        } else if constexpr (std::is_same_v<T, Affine>) {
          out["kind"] = "affine";
          out["params"] = {q.a, q.b};
        } else if constexpr (std::is_same_v<T, PositivePartAffine>) {
          out["kind"] = "pospart";
          out["params"] = {q.a, q.b};
        } else {
          Json params = Json::array();
          for (std::size_t i = 0; i < q.x.size(); ++i) {
            params.push_back(q.x[i]);
            params.push_back(q.y[i]);
          }
          out["kind"] = "table";
          out["params"] = params;
        }
      },
      p);
  return out;
}

Piece pieceFromJson(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const std::vector<double> params = j.at("params").get<std::vector<double>>();
  auto need = [&](std::size_t n) {
    if (params.size() != n)
      throw ConfigError("piece kind '" + kind + "' expects " + std::to_string(n) + " params");
  };
  if (kind == "const") {
    need(1);
    return Constant{params[0]};
  }
  if (kind == "affine") {
    need(2);
    return Affine{params[0], params[1]};
  }
  if (kind == "pospart") {
    need(2);
    return PositivePartAffine{params[0], params[1]};
  }
  if (kind == "table") {
    if (params.size() < 4 || params.size() % 2 != 0)
      throw ConfigError("table piece expects an even number (>= 4) of params");
    Tabulated t;
    for (std::size_t i = 0; i < params.size(); i += 2) {
      t.x.push_back(params[i]);
      t.y.push_back(params[i + 1]);
    }
    return t;
  }
  throw ConfigError("unknown piece kind '" + kind + "'");
}

}  // namespace

Json toJson(const FunctionSpec& f) {
  Json arr = Json::array();
  const auto& bp = f.breakpoints();
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    const double lo = i == 0 ? -kInf : bp[i - 1];
    const double hi = i == bp.size() ? kInf : bp[i];
    arr.push_back(pieceToJson(f.pieces()[i], lo, hi));
  }
  return arr;
}

FunctionSpec functionFromJson(const Json& j, StateSpace domain) {
  if (!j.is_array() || j.empty()) throw ConfigError("payoff must be a non-empty array of pieces");
  std::vector<double> breakpoints;
  std::vector<Piece> pieces;
  double prevHi = 0.0;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& cell = j[i].at("cell");
    if (!cell.is_array() || cell.size() != 2) throw ConfigError("cell must be [lo, hi]");
    const double lo = numberOr(cell[0], -kInf);
    const double hi = numberOr(cell[1], kInf);
    if (i == 0) {
      if (lo > domain.lo) throw ConfigError("first cell must start at or below the state space");
    } else {
      if (lo != prevHi) throw ConfigError("cells must be contiguous");
      breakpoints.push_back(lo);
    }
    if (i + 1 == j.size() && hi < domain.hi)
      throw ConfigError("last cell must extend to the end of the state space");
    prevHi = hi;
    pieces.push_back(pieceFromJson(j[i]));
  }
  try {
    return FunctionSpec(std::move(breakpoints), std::move(pieces), domain);
  } catch (const InvalidParameters& e) {
    throw ConfigError(e.what());
  }
}

Json toJson(const GameSpec& game) {
  Json j;
  j["diffusion"] = {{"kind", kindName(game.diffusion().kind())},
                    {"mu", game.diffusion().drift()},
                    {"sigma", game.diffusion().volatility()}};
  j["lower"] = toJson(game.lower());
  j["upper"] = toJson(game.upper());
  j["r"] = game.discount();
  j["lambda"] = game.signalRate();
  j["mode"] = toString(game.mode());
  return j;
}

GameSpec gameFromJson(const Json& j) {
  try {
    const Json& d = j.at("diffusion");
    const DiffusionSpec diffusion(parseKind(d.at("kind").get<std::string>()),
                                  d.value("mu", 0.0), d.value("sigma", 1.0));
    const StateSpace space = diffusion.stateSpace();
    double terminal = 0.0;
    if (j.contains("terminal")) terminal = j.at("terminal").get<double>();
    return GameSpec(diffusion, functionFromJson(j.at("lower"), space),
                    functionFromJson(j.at("upper"), space), j.at("r").get<double>(),
                    j.at("lambda").get<double>(), parseMode(j.value("mode", "common")), terminal);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed game config: ") + e.what());
  } catch (const InvalidParameters& e) {
    throw ConfigError(e.what());
  }
}

Json toJson(const IntervalUnion& u) {
  Json arr = Json::array();
  for (const auto& p : u.parts()) arr.push_back({finiteOrNull(p.lo), finiteOrNull(p.hi)});
  return arr;
}

GameSpec loadGame(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return gameFromJson(j);
}

void saveJson(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace dynkin
