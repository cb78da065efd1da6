/*
   Copyright 2026 The conelab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <nlohmann/json.hpp>

#include "conelab/geometry.hpp"

namespace conelab {

// Region documents look like {"type": "cone_annulus", "sign": 1, "N": 1, "L": 0.01}.
// Infinite reals are written as the string "inf" (or "-inf"); vectors are
// arrays [x, y]; intervals are [lo, hi]; boxes carry "tau", "xi1", "xi2".
// Combinators nest: translate {"offset": [tau, x, y], "inner": {...}},
// reflect {"inner": {...}}, intersect {"items": [...]}.
// Parse failures throw ParseError, invalid parameters DomainError.

nlohmann::json real_to_json(double v);
double real_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Region& R);
Region region_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Box& b);
Box box_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DyadicParams& p);
DyadicParams params_from_json(const nlohmann::json& j);

} // namespace conelab
