// Boolean clipping and offsetting, backed by Boost.Geometry.

#include <algorithm>
#include <cmath>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

#include "camforge/polygon.hpp"

namespace bg = boost::geometry;

namespace camforge {
namespace {

using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint, /*ClockWise=*/false, /*Closed=*/false>;
using BgMulti = bg::model::multi_polygon<BgPolygon>;

constexpr double kMiterLimit = 4.0;

void append_ring(const Contour& c, auto& ring) {
    ring.reserve(c.points.size());
    for (const Vec2& p : c.points) ring.push_back(BgPoint(p.x, p.y));
}

BgMulti to_boost(const PolygonSet& set) {
    const auto groups = group_polygons(set);
    BgMulti multi;
    multi.resize(groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
        append_ring(set.contours[groups[k].outer], multi[k].outer());
        for (std::size_t h : groups[k].holes) {
            multi[k].inners().emplace_back();
            append_ring(set.contours[h], multi[k].inners().back());
        }
    }
    return multi;
}

Contour from_ring(const auto& ring) {
    Contour c;
    c.points.reserve(ring.size());
    for (const auto& p : ring) c.points.push_back({p.x(), p.y()});
    return remove_duplicate_points(c);
}

PolygonSet from_boost(const BgMulti& multi) {
    std::vector<Contour> contours;
    for (const auto& poly : multi) {
        Contour outer = from_ring(poly.outer());
        if (outer.points.size() < 3) continue;
        contours.push_back(std::move(outer));
        for (const auto& inner : poly.inners()) {
            Contour hole = from_ring(inner);
            if (hole.points.size() >= 3) contours.push_back(std::move(hole));
        }
    }
    std::erase_if(contours, [](const Contour& c) { return signed_area(c) == 0.0; });
    return normalize_polygonset(std::move(contours), false);
}

}  // namespace

PolygonSet boolean_op(const PolygonSet& a, const PolygonSet& b, BooleanOp op) {
    const BgMulti ma = to_boost(a);
    const BgMulti mb = to_boost(b);
    BgMulti out;
    switch (op) {
        case BooleanOp::Union: bg::union_(ma, mb, out); break;
        case BooleanOp::Intersection: bg::intersection(ma, mb, out); break;
        case BooleanOp::Difference: bg::difference(ma, mb, out); break;
    }
    return from_boost(out);
}

namespace {

BgPolygon piece(std::initializer_list<Vec2> pts) {
    BgPolygon poly;
    for (Vec2 p : pts) poly.outer().push_back(BgPoint(p.x, p.y));
    bg::correct(poly);
    return poly;
}

// Pairwise union keeps the intermediate results small.
BgMulti union_all(std::vector<BgMulti> parts) {
    if (parts.empty()) return {};
    while (parts.size() > 1) {
        std::vector<BgMulti> next;
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
            BgMulti u;
            bg::union_(parts[i], parts[i + 1], u);
            next.push_back(std::move(u));
        }
        if (parts.size() % 2 == 1) next.push_back(std::move(parts.back()));
        parts = std::move(next);
    }
    return std::move(parts.front());
}

Contour drop_collinear(Contour c) {
    bool changed = true;
    while (changed && c.points.size() > 3) {
        changed = false;
        const std::size_t n = c.points.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 a = c.points[(i + n - 1) % n];
            const Vec2 b = c.points[i];
            const Vec2 d = c.points[(i + 1) % n];
            const double base = distance(a, d);
            if (base > 0.0 && std::abs(cross(d - a, b - a)) / base < 1e-9 && dot(b - a, d - b) > 0.0) {
                c.points.erase(c.points.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return c;
}

struct HalfPlane {
    Vec2 point;
    Vec2 inward;  // points into the kept side
};

std::vector<Vec2> clip(const std::vector<Vec2>& poly, const HalfPlane& h) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = poly[i];
        const Vec2 q = poly[(i + 1) % n];
        const double dp = dot(p - h.point, h.inward);
        const double dq = dot(q - h.point, h.inward);
        if (dp >= 0.0) out.push_back(p);
        if ((dp >= 0.0) != (dq >= 0.0)) out.push_back(p + (q - p) * (dp / (dp - dq)));
    }
    return out;
}

bool is_convex(const Contour& c) {
    const std::size_t n = c.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = c.points[i];
        const Vec2 b = c.points[(i + 1) % n];
        const Vec2 d = c.points[(i + 2) % n];
        if (cross(b - a, d - b) < 0.0) return false;
    }
    return true;
}

// A convex region offsets to an intersection of half-planes: one per
// displaced edge, plus a bevel line wherever the miter exceeds the limit.
PolygonSet offset_convex(const Contour& c, double delta) {
    const std::size_t n = c.points.size();
    const Aabb2 b = *contour_bounds(c);
    const double pad = std::abs(delta) * (kMiterLimit + 1.0) + 1.0;
    std::vector<Vec2> poly = make_rectangle(b.min - Vec2{pad, pad}, b.max + Vec2{pad, pad}).points;
    std::vector<Vec2> normals(n);
    for (std::size_t i = 0; i < n && !poly.empty(); ++i) {
        const Vec2 e = c.points[(i + 1) % n] - c.points[i];
        const double len = norm(e);
        if (len == 0.0) continue;
        normals[i] = Vec2{e.y / len, -e.x / len};
        poly = clip(poly, HalfPlane{c.points[i] + normals[i] * delta, normals[i] * -1.0});
    }
    if (delta > 0.0) {
        for (std::size_t i = 0; i < n && !poly.empty(); ++i) {
            const Vec2 n1 = normals[(i + n - 1) % n];
            const Vec2 n2 = normals[i];
            const double denom = 1.0 + dot(n1, n2);
            if (denom > 0.0 && norm(n1 + n2) / denom <= kMiterLimit) continue;
            const Vec2 v = c.points[i];
            const Vec2 p1 = v + n1 * delta;
            const Vec2 p2 = v + n2 * delta;
            const Vec2 e = p2 - p1;
            poly = clip(poly, HalfPlane{p1, Vec2{-e.y, e.x}});
        }
    }
    Contour out{std::move(poly), true};
    out = drop_collinear(remove_duplicate_points(out));
    if (out.points.size() < 3 || signed_area(out) <= 0.0) return {};
    return PolygonSet{{std::move(out)}};
}

}  // namespace

OffsetResult offset_polygonset(const PolygonSet& set, double delta) {
    OffsetResult result;
    if (delta == 0.0 || set.empty()) {
        result.polygons = set;
        return result;
    }
    if (set.contours.size() == 1 && signed_area(set.contours[0]) > 0.0 && is_convex(set.contours[0])) {
        result.polygons = offset_convex(set.contours[0], delta);
        result.collapsed = result.polygons.empty();
        return result;
    }
    // Material lies to the left of every normalized contour, so the outward
    // normal is the right-hand one. Each edge sweeps a quad of width |delta|
    // and every vertex where neighbouring sweeps separate gets a miter (or a
    // bevel past the limit). Growing unions the pieces, shrinking subtracts them.
    const double sign = delta > 0.0 ? 1.0 : -1.0;
    const double d = std::abs(delta);
    std::vector<BgMulti> pieces;
    for (const Contour& c : set.contours) {
        const std::size_t n = c.points.size();
        std::vector<Vec2> normals(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 e = c.points[(i + 1) % n] - c.points[i];
            const double len = norm(e);
            normals[i] = len > 0.0 ? Vec2{e.y / len, -e.x / len} * sign : Vec2{};
            if (len > 0.0) {
                const Vec2 a = c.points[i];
                const Vec2 b = c.points[(i + 1) % n];
                pieces.push_back(BgMulti{piece({a, b, b + normals[i] * d, a + normals[i] * d})});
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t prev = (i + n - 1) % n;
            const Vec2 v = c.points[i];
            const Vec2 e1 = v - c.points[prev];
            const Vec2 e2 = c.points[(i + 1) % n] - v;
            if (sign * cross(e1, e2) <= 0.0) continue;
            const Vec2 n1 = normals[prev];
            const Vec2 n2 = normals[i];
            const double denom = 1.0 + dot(n1, n2);
            const Vec2 p1 = v + n1 * d;
            const Vec2 p2 = v + n2 * d;
            if (denom > 0.0 && norm(n1 + n2) / denom <= kMiterLimit) {
                pieces.push_back(BgMulti{piece({v, p1, v + (n1 + n2) * (d / denom), p2})});
            } else {
                pieces.push_back(BgMulti{piece({v, p1, p2})});
            }
        }
    }
    const BgMulti sweep = union_all(std::move(pieces));
    const BgMulti in = to_boost(set);
    BgMulti out;
    if (delta > 0.0) {
        bg::union_(in, sweep, out);
    } else {
        bg::difference(in, sweep, out);
    }
    const PolygonSet raw = from_boost(out);
    std::vector<Contour> cleaned;
    for (const Contour& c : raw.contours) {
        Contour k = drop_collinear(c);
        if (k.points.size() >= 3 && signed_area(k) != 0.0) cleaned.push_back(std::move(k));
    }
    result.polygons = normalize_polygonset(std::move(cleaned), false);
    if (delta < 0.0) {
        const std::size_t before = set.outer_count();
        const std::size_t after = result.polygons.outer_count();
        result.collapsed = (before > 0 && after == 0) || after < before;
    }
    return result;
}

}  // namespace camforge
