#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/polygon.hpp"

namespace camforge {

namespace {

// Final rounding step of Shewchuk's exact summation (as in Python's math.fsum).
double round_partials(const std::vector<double>& partials) {
    if (partials.empty()) return 0.0;
    std::size_t i = partials.size() - 1;
    double hi = partials[i];
    double lo = 0.0;
    while (i > 0) {
        const double x = hi;
        const double y = partials[--i];
        hi = x + y;
        lo = y - (hi - x);
        if (lo != 0.0) break;
    }
    if (i > 0 && ((lo < 0.0 && partials[i - 1] < 0.0) || (lo > 0.0 && partials[i - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        if (y == x - hi) hi = x;
    }
    return hi;
}

}  // namespace

double signed_area(const Contour& contour) {
    if (!contour.closed) throw Error(ErrorCode::NotClosed, "signed area of an open contour");
    const auto& p = contour.points;
    const std::size_t n = p.size();
    // Correctly rounded sum, so the result does not depend on traversal direction.
    std::vector<double> partials;
    for (std::size_t i = 0; i < n; ++i) {
        double x = cross(p[i], p[(i + 1) % n]);
        std::size_t used = 0;
        for (double y : partials) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials[used++] = lo;
            x = hi;
        }
        partials.resize(used);
        partials.push_back(x);
    }
    return 0.5 * round_partials(partials);
}

double contour_length(const Contour& contour) {
    const auto& p = contour.points;
    if (p.size() < 2) return 0.0;
    double len = 0.0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) len += distance(p[i], p[i + 1]);
    if (contour.closed) len += distance(p.back(), p.front());
    return len;
}

Contour reversed(const Contour& contour) {
    Contour r = contour;
    std::reverse(r.points.begin(), r.points.end());
    return r;
}

std::optional<Aabb2> contour_bounds(const Contour& contour) {
    if (contour.points.empty()) return std::nullopt;
    Aabb2 b{contour.points.front(), contour.points.front()};
    for (const Vec2& p : contour.points) {
        b.min = {std::min(b.min.x, p.x), std::min(b.min.y, p.y)};
        b.max = {std::max(b.max.x, p.x), std::max(b.max.y, p.y)};
    }
    return b;
}

bool point_in_contour(const Contour& contour, Vec2 p) {
    const auto& v = contour.points;
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            const double x = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

namespace {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

}  // namespace

double distance_to_contour(const Contour& contour, Vec2 p) {
    const auto& v = contour.points;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = v.size();
    const std::size_t edges = contour.closed ? n : (n == 0 ? 0 : n - 1);
    for (std::size_t i = 0; i < edges; ++i) best = std::min(best, point_segment_distance(p, v[i], v[(i + 1) % n]));
    return best;
}

double distance_to_boundary(const PolygonSet& set, Vec2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : set.contours) best = std::min(best, distance_to_contour(c, p));
    return best;
}

double PolygonSet::area() const {
    double a = 0.0;
    for (const auto& c : contours) a += signed_area(c);
    return a;
}

double PolygonSet::perimeter() const {
    double len = 0.0;
    for (const auto& c : contours) len += contour_length(c);
    return len;
}

std::optional<Aabb2> PolygonSet::bounds() const {
    std::optional<Aabb2> out;
    for (const auto& c : contours) {
        auto b = contour_bounds(c);
        if (!b) continue;
        if (!out) {
            out = b;
        } else {
            out->min = {std::min(out->min.x, b->min.x), std::min(out->min.y, b->min.y)};
            out->max = {std::max(out->max.x, b->max.x), std::max(out->max.y, b->max.y)};
        }
    }
    return out;
}

bool PolygonSet::contains(Vec2 p) const {
    bool inside = false;
    for (const auto& c : contours) {
        if (point_in_contour(c, p)) inside = !inside;
    }
    return inside;
}

std::size_t PolygonSet::outer_count() const {
    return static_cast<std::size_t>(
        std::count_if(contours.begin(), contours.end(), [](const Contour& c) { return signed_area(c) > 0.0; }));
}

PolygonSet PolygonSet::translated(Vec2 offset) const {
    PolygonSet out = *this;
    for (auto& c : out.contours) {
        for (auto& p : c.points) p = p + offset;
    }
    return out;
}

double BendTable::total_length() const {
    double len = 0.0;
    for (const auto& r : rows) len += r.feed_mm;
    return len;
}

Contour remove_duplicate_points(const Contour& contour, double tolerance) {
    Contour out;
    out.closed = contour.closed;
    for (const Vec2& p : contour.points) {
        if (!out.points.empty() && distance(out.points.back(), p) <= tolerance) continue;
        out.points.push_back(p);
    }
    while (out.closed && out.points.size() > 1 && distance(out.points.back(), out.points.front()) <= tolerance) {
        out.points.pop_back();
    }
    return out;
}

namespace {

bool segments_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

bool boxes_overlap(const Aabb2& a, const Aabb2& b) {
    return a.min.x <= b.max.x && b.min.x <= a.max.x && a.min.y <= b.max.y && b.min.y <= a.max.y;
}

bool contours_cross(const Contour& a, const Contour& b) {
    const std::size_t na = a.points.size();
    const std::size_t nb = b.points.size();
    for (std::size_t i = 0; i < na; ++i) {
        const Vec2 p0 = a.points[i];
        const Vec2 p1 = a.points[(i + 1) % na];
        const Aabb2 ea{{std::min(p0.x, p1.x), std::min(p0.y, p1.y)}, {std::max(p0.x, p1.x), std::max(p0.y, p1.y)}};
        for (std::size_t j = 0; j < nb; ++j) {
            const Vec2 q0 = b.points[j];
            const Vec2 q1 = b.points[(j + 1) % nb];
            const Aabb2 eb{{std::min(q0.x, q1.x), std::min(q0.y, q1.y)}, {std::max(q0.x, q1.x), std::max(q0.y, q1.y)}};
            if (boxes_overlap(ea, eb) && segments_cross(p0, p1, q0, q1)) return true;
        }
    }
    return false;
}

// A point of `c` that is not on the boundary of `other`, for containment tests.
Vec2 probe_point(const Contour& c, const Contour& other) {
    for (const Vec2& p : c.points) {
        if (distance_to_contour(other, p) > 1e-9) return p;
    }
    const Vec2 a = c.points[0];
    const Vec2 b = c.points[1 % c.points.size()];
    return (a + b) * 0.5;
}

}  // namespace

PolygonSet normalize_polygonset(std::vector<Contour> contours, bool check_crossings) {
    PolygonSet out;
    std::vector<Aabb2> boxes;
    for (auto& c : contours) {
        if (!c.closed) throw Error(ErrorCode::NotClosed, "cannot normalize an open contour");
        c = remove_duplicate_points(c);
        if (c.points.size() < 3) continue;
        out.contours.push_back(std::move(c));
        boxes.push_back(*contour_bounds(out.contours.back()));
    }
    const std::size_t n = out.contours.size();
    if (check_crossings) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (boxes_overlap(boxes[i], boxes[j]) && contours_cross(out.contours[i], out.contours[j])) {
                    throw Error(ErrorCode::CrossingContours, fmt::format("contours {} and {} cross", i, j));
                }
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        int depth = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || !boxes_overlap(boxes[i], boxes[j])) continue;
            if (point_in_contour(out.contours[j], probe_point(out.contours[i], out.contours[j]))) ++depth;
        }
        const double a = signed_area(out.contours[i]);
        const bool want_ccw = depth % 2 == 0;
        if ((a > 0.0) != want_ccw) std::reverse(out.contours[i].points.begin(), out.contours[i].points.end());
    }
    return out;
}

Contour simplify_polyline(const Contour& contour, double tolerance) {
    Contour src = remove_duplicate_points(contour, 0.0);
    const std::size_t n = src.points.size();
    if (n <= 2 || (src.closed && n <= 3)) return src;

    const auto& p = src.points;
    std::vector<bool> keep(n, false);
    // Recursive split on the farthest vertex; vertices deviating by at least
    // `tolerance` from the chord are kept.
    auto split = [&](auto&& self, std::size_t first, std::size_t last, const std::vector<Vec2>& pts) -> void {
        if (last <= first + 1) return;
        double worst = -1.0;
        std::size_t idx = first;
        for (std::size_t i = first + 1; i < last; ++i) {
            const double d = point_segment_distance(pts[i], pts[first], pts[last]);
            if (d > worst) {
                worst = d;
                idx = i;
            }
        }
        if (worst >= tolerance) {
            keep[idx % n] = true;
            self(self, first, idx, pts);
            self(self, idx, last, pts);
        }
    };

    Contour out;
    out.closed = src.closed;
    if (!src.closed) {
        keep[0] = keep[n - 1] = true;
        split(split, 0, n - 1, p);
    } else {
        // Anchor the loop at vertex 0 and its farthest vertex.
        std::size_t far = 0;
        double best = -1.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double d = distance(p[i], p[0]);
            if (d > best) {
                best = d;
                far = i;
            }
        }
        keep[0] = keep[far] = true;
        std::vector<Vec2> loop = p;
        loop.push_back(p[0]);
        split(split, 0, far, loop);
        split(split, far, n, loop);
        if (std::count(keep.begin(), keep.end(), true) < 3) {
            // Keep the vertex farthest from the anchor chord so the loop stays a polygon.
            std::size_t extra = 0;
            double dmax = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (keep[i]) continue;
                const double d = point_segment_distance(p[i], p[0], p[far]);
                if (d > dmax) {
                    dmax = d;
                    extra = i;
                }
            }
            keep[extra] = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) out.points.push_back(p[i]);
    }
    return out;
}

BendTable polyline_to_bends(const Contour& contour) {
    const auto& p = contour.points;
    const std::size_t n = p.size();
    if (n < 2) throw Error(ErrorCode::DegeneratePoint, "wire needs at least 2 points");
    const std::size_t segments = contour.closed ? n : n - 1;
    std::vector<Vec2> dirs(segments);
    BendTable table;
    table.closed = contour.closed;
    for (std::size_t i = 0; i < segments; ++i) {
        dirs[i] = p[(i + 1) % n] - p[i];
        if (norm(dirs[i]) <= 0.0) {
            throw Error(ErrorCode::DegeneratePoint, fmt::format("zero-length segment at vertex {}", i));
        }
    }
    for (std::size_t i = 0; i < segments; ++i) {
        double bend = 0.0;
        const bool has_next = contour.closed || i + 1 < segments;
        if (has_next) {
            const Vec2 a = dirs[i];
            const Vec2 b = dirs[(i + 1) % segments];
            bend = std::atan2(cross(a, b), dot(a, b)) * 180.0 / std::numbers::pi;
            if (std::abs(bend) >= 180.0 - 1e-12) {
                throw Error(ErrorCode::DegeneratePoint, fmt::format("wire folds back on itself at vertex {}", i + 1));
            }
        }
        table.rows.push_back({norm(dirs[i]), bend});
    }
    return table;
}

Contour bends_to_polyline(const BendTable& table, Vec2 start, double heading_deg) {
    Contour out;
    out.closed = table.closed;
    out.points.push_back(start);
    double heading = heading_deg * std::numbers::pi / 180.0;
    Vec2 pos = start;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        pos = pos + Vec2{std::cos(heading), std::sin(heading)} * row.feed_mm;
        const bool closing_feed = table.closed && i + 1 == table.rows.size();
        if (!closing_feed) out.points.push_back(pos);
        heading += row.bend_deg * std::numbers::pi / 180.0;
    }
    return out;
}

Contour make_circle(Vec2 center, double radius, int segments) {
    Contour c;
    c.points.reserve(static_cast<std::size_t>(segments));
    for (int i = 0; i < segments; ++i) {
        const double a = 2.0 * std::numbers::pi * i / segments;
        c.points.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    return c;
}

Contour make_rectangle(Vec2 min, Vec2 max) {
    return Contour{{{min.x, min.y}, {max.x, min.y}, {max.x, max.y}, {min.x, max.y}}, true};
}

}  // namespace camforge

namespace camforge {

std::vector<PolygonGroup> group_polygons(const PolygonSet& set) {
    std::vector<PolygonGroup> groups;
    std::vector<double> areas(set.contours.size());
    std::vector<std::size_t> holes;
    for (std::size_t i = 0; i < set.contours.size(); ++i) {
        areas[i] = signed_area(set.contours[i]);
        if (areas[i] > 0.0) {
            groups.push_back({i, {}});
        } else {
            holes.push_back(i);
        }
    }
    for (std::size_t h : holes) {
        const Contour& hole = set.contours[h];
        std::size_t best = groups.size();
        for (std::size_t k = 0; k < groups.size(); ++k) {
            const std::size_t o = groups[k].outer;
            if (areas[o] < std::abs(areas[h])) continue;
            bool inside = false;
            for (const Vec2& p : hole.points) {
                if (distance_to_contour(set.contours[o], p) > 1e-9) {
                    inside = point_in_contour(set.contours[o], p);
                    break;
                }
            }
            if (inside && (best == groups.size() || areas[o] < areas[groups[best].outer])) best = k;
        }
        if (best != groups.size()) groups[best].holes.push_back(h);
    }
    return groups;
}

}  // namespace camforge
