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

#include "conelab/region_json.hpp"

#include <cmath>
#include <limits>

#include "conelab/error.hpp"

namespace conelab {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
    {
        throw ParseError(std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

json vec_to_json(Vec2 v) { return json::array({real_to_json(v.x), real_to_json(v.y)}); }

Vec2 vec_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2)
    {
        throw ParseError("expected a 2-vector [x, y]");
    }
    return {real_from_json(j[0]), real_from_json(j[1])};
}

json interval_to_json(Interval I) { return json::array({real_to_json(I.lo), real_to_json(I.hi)}); }

Interval interval_from_json(const json& j)
{
    if (!j.is_array() || j.size() != 2)
    {
        throw ParseError("expected an interval [lo, hi]");
    }
    return {real_from_json(j[0]), real_from_json(j[1])};
}

Sign sign_from_json(const json& j)
{
    if (!j.is_number_integer())
    {
        throw ParseError("sign must be the integer 1 or -1");
    }
    const auto v = j.get<long long>();
    if (v != 1 && v != -1)
    {
        throw ParseError("sign must be the integer 1 or -1");
    }
    return v == 1 ? Sign::Plus : Sign::Minus;
}

template <class Alt>
const Alt* as(const Region& R)
{
    return std::get_if<Alt>(&R.shape());
}

} // namespace

json real_to_json(double v)
{
    if (std::isinf(v))
    {
        return v > 0 ? "inf" : "-inf";
    }
    return v;
}

double real_from_json(const json& j)
{
    if (j.is_number())
    {
        return j.get<double>();
    }
    if (j.is_string())
    {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf" || s == "+inf")
        {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf")
        {
            return -std::numeric_limits<double>::infinity();
        }
    }
    throw ParseError("expected a number or \"inf\", got " + j.dump());
}

json to_json(const Box& b)
{
    return {{"type", "box"},
            {"tau", interval_to_json(b.tau)},
            {"xi1", interval_to_json(b.xi1)},
            {"xi2", interval_to_json(b.xi2)}};
}

Box box_from_json(const json& j)
{
    return {interval_from_json(field(j, "tau")), interval_from_json(field(j, "xi1")),
            interval_from_json(field(j, "xi2"))};
}

json to_json(const Region& R)
{
    if (auto* c = as<shape::ConeBall>(R))
    {
        return {{"type", "cone_ball"}, {"sign", static_cast<int>(c->sign)}, {"N", c->N}, {"L", real_to_json(c->L)}};
    }
    if (auto* c = as<shape::ConeAnnulus>(R))
    {
        return {{"type", "cone_annulus"}, {"sign", static_cast<int>(c->sign)}, {"N", c->N}, {"L", real_to_json(c->L)}};
    }
    if (auto* c = as<shape::ConeSector>(R))
    {
        return {{"type", "cone_sector"}, {"sign", static_cast<int>(c->sign)}, {"N", c->N},
                {"L", real_to_json(c->L)}, {"gamma", c->gamma}, {"omega", vec_to_json(c->omega)}};
    }
    if (auto* s = as<shape::SpatialStrip>(R))
    {
        return {{"type", "spatial_strip"}, {"r", s->r}, {"omega", vec_to_json(s->omega)}};
    }
    if (auto* s = as<shape::Slab>(R))
    {
        return {{"type", "slab"}, {"omega", vec_to_json(s->omega)}, {"interval", interval_to_json(s->interval)}};
    }
    if (auto* s = as<shape::NullSlab>(R))
    {
        return {{"type", "null_slab"}, {"d", s->d}, {"omega", vec_to_json(s->omega)}};
    }
    if (auto* b = as<shape::SpatialBall>(R))
    {
        return {{"type", "spatial_ball"}, {"center", vec_to_json(b->center)}, {"radius", b->radius}};
    }
    if (auto* b = as<Box>(R))
    {
        return to_json(*b);
    }
    if (auto* t = as<shape::Translate>(R))
    {
        return {{"type", "translate"},
                {"offset", json::array({t->offset.tau, t->offset.xi.x, t->offset.xi.y})},
                {"inner", to_json(*t->inner)}};
    }
    if (auto* r = as<shape::Reflect>(R))
    {
        return {{"type", "reflect"}, {"inner", to_json(*r->inner)}};
    }
    const auto& in = std::get<shape::Intersect>(R.shape());
    json items = json::array();
    for (const auto& item : in.items)
    {
        items.push_back(to_json(item));
    }
    return {{"type", "intersect"}, {"items", items}};
}

Region region_from_json(const json& j)
{
    const json& type_field = field(j, "type");
    if (!type_field.is_string())
    {
        throw ParseError("\"type\" must be a string");
    }
    const auto& type = type_field.get_ref<const std::string&>();
    if (type == "cone_ball")
    {
        return Region::cone_ball(sign_from_json(field(j, "sign")), real_from_json(field(j, "N")),
                                 real_from_json(field(j, "L")));
    }
    if (type == "cone_annulus")
    {
        return Region::cone_annulus(sign_from_json(field(j, "sign")), real_from_json(field(j, "N")),
                                    real_from_json(field(j, "L")));
    }
    if (type == "cone_sector")
    {
        return Region::cone_sector(sign_from_json(field(j, "sign")), real_from_json(field(j, "N")),
                                   real_from_json(field(j, "L")), real_from_json(field(j, "gamma")),
                                   vec_from_json(field(j, "omega")));
    }
    if (type == "spatial_strip")
    {
        return Region::spatial_strip(real_from_json(field(j, "r")), vec_from_json(field(j, "omega")));
    }
    if (type == "slab")
    {
        return Region::slab(vec_from_json(field(j, "omega")), interval_from_json(field(j, "interval")));
    }
    if (type == "null_slab")
    {
        return Region::null_slab(real_from_json(field(j, "d")), vec_from_json(field(j, "omega")));
    }
    if (type == "spatial_ball")
    {
        return Region::spatial_ball(vec_from_json(field(j, "center")), real_from_json(field(j, "radius")));
    }
    if (type == "box")
    {
        return Region::box(box_from_json(j));
    }
    if (type == "translate")
    {
        const json& off = field(j, "offset");
        if (!off.is_array() || off.size() != 3)
        {
            throw ParseError("translate offset must be [tau, xi1, xi2]");
        }
        return Region::translate({real_from_json(off[0]), {real_from_json(off[1]), real_from_json(off[2])}},
                                 region_from_json(field(j, "inner")));
    }
    if (type == "reflect")
    {
        return Region::reflect(region_from_json(field(j, "inner")));
    }
    if (type == "intersect")
    {
        const json& items = field(j, "items");
        if (!items.is_array())
        {
            throw ParseError("intersect items must be an array");
        }
        std::vector<Region> regions;
        for (const auto& item : items)
        {
            regions.push_back(region_from_json(item));
        }
        return Region::intersect(std::move(regions));
    }
    throw ParseError("unknown region type \"" + type + "\"");
}

json to_json(const DyadicParams& p)
{
    json N = json::array(), L = json::array(), s = json::array();
    for (int k = 0; k < 3; ++k)
    {
        N.push_back(real_to_json(p.N[k]));
        L.push_back(real_to_json(p.L[k]));
        s.push_back(static_cast<int>(p.signs[k]));
    }
    return {{"N", N}, {"L", L}, {"signs", s}};
}

DyadicParams params_from_json(const json& j)
{
    DyadicParams p;
    const json& N = field(j, "N");
    const json& L = field(j, "L");
    if (!N.is_array() || N.size() != 3 || !L.is_array() || L.size() != 3)
    {
        throw ParseError("params N and L must be 3-element arrays");
    }
    for (int k = 0; k < 3; ++k)
    {
        p.N[k] = real_from_json(N[k]);
        p.L[k] = real_from_json(L[k]);
    }
    if (j.contains("signs"))
    {
        const json& s = j.at("signs");
        if (!s.is_array() || s.size() != 3)
        {
            throw ParseError("params signs must be a 3-element array");
        }
        for (int k = 0; k < 3; ++k)
        {
            p.signs[k] = sign_from_json(s[k]);
        }
    }
    p.validate();
    return p;
}

} // namespace conelab
