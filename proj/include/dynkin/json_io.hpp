#pragma once

#include <cmath>
#include <json.hpp>
#include <string>

#include "dynkin/model.hpp"

namespace dynkin {

using Json = nlohmann::json;

// GameSpec <-> JSON:
//   {"diffusion": {"kind": "brownian"|"gbm"|"ou", "mu": .., "sigma": ..},
//    "lower": [piece...], "upper": [piece...], "r": .., "lambda": .., "mode": ..}
// piece: {"cell": [lo, hi], "kind": "const"|"affine"|"pospart"|"table",
//         "params": [...]}, null cell ends mean unbounded. Table params are
// flattened pairs [x0, y0, x1, y1, ...].
Json toJson(const GameSpec& game);
GameSpec gameFromJson(const Json& j);

Json toJson(const FunctionSpec& f);
FunctionSpec functionFromJson(const Json& j, StateSpace domain = {});

Json toJson(const IntervalUnion& u);

GameSpec loadGame(const std::string& path);
void saveJson(const Json& j, const std::string& path);

// JSON numbers cannot be infinite; unbounded ends are written as null.
inline Json finiteOrNull(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace dynkin
