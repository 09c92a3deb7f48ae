#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "camforge/tessellate.hpp"

namespace camforge {
namespace {

struct Loop {
    std::vector<std::uint32_t> idx;
};

bool proper_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

bool segment_blocked(Vec2 a, Vec2 b, const std::vector<Vec2>& v, const std::vector<const Loop*>& loops) {
    for (const Loop* loop : loops) {
        const auto& l = loop->idx;
        for (std::size_t i = 0; i < l.size(); ++i) {
            const Vec2 c = v[l[i]];
            const Vec2 d = v[l[(i + 1) % l.size()]];
            if (proper_cross(a, b, c, d)) return true;
            // Passing straight through another vertex is also a blockage.
            if (c != a && c != b) {
                const Vec2 ab = b - a;
                const double len2 = dot(ab, ab);
                const double t = len2 > 0 ? dot(c - a, ab) / len2 : 0.0;
                if (t > 0.0 && t < 1.0 && std::abs(cross(ab, c - a)) <= 1e-12 * std::max(1.0, len2)) return true;
            }
        }
    }
    return false;
}

// Splices each hole into the outer loop through a bridge edge to the
// nearest mutually visible vertex.
Loop bridge_holes(const std::vector<Vec2>& v, Loop outer, std::vector<Loop> holes) {
    std::sort(holes.begin(), holes.end(), [&](const Loop& a, const Loop& b) {
        auto maxx = [&](const Loop& l) {
            double m = -std::numeric_limits<double>::infinity();
            for (auto i : l.idx) m = std::max(m, v[i].x);
            return m;
        };
        return maxx(a) > maxx(b);
    });
    for (std::size_t h = 0; h < holes.size(); ++h) {
        const Loop& hole = holes[h];
        std::size_t m_pos = 0;
        for (std::size_t i = 1; i < hole.idx.size(); ++i) {
            const Vec2 p = v[hole.idx[i]];
            const Vec2 q = v[hole.idx[m_pos]];
            if (p.x > q.x || (p.x == q.x && p.y < q.y)) m_pos = i;
        }
        const Vec2 m = v[hole.idx[m_pos]];

        std::vector<const Loop*> blockers{&outer};
        for (std::size_t k = h; k < holes.size(); ++k) blockers.push_back(&holes[k]);

        std::vector<std::size_t> order(outer.idx.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return distance(v[outer.idx[a]], m) < distance(v[outer.idx[b]], m);
        });
        std::size_t bridge = order.front();
        for (std::size_t cand : order) {
            if (!segment_blocked(m, v[outer.idx[cand]], v, blockers)) {
                bridge = cand;
                break;
            }
        }
        Loop merged;
        merged.idx.reserve(outer.idx.size() + hole.idx.size() + 2);
        merged.idx.insert(merged.idx.end(), outer.idx.begin(), outer.idx.begin() + static_cast<std::ptrdiff_t>(bridge) + 1);
        for (std::size_t k = 0; k <= hole.idx.size(); ++k) merged.idx.push_back(hole.idx[(m_pos + k) % hole.idx.size()]);
        merged.idx.insert(merged.idx.end(), outer.idx.begin() + static_cast<std::ptrdiff_t>(bridge), outer.idx.end());
        outer = std::move(merged);
    }
    return outer;
}

bool strictly_inside_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
    return cross(b - a, p - a) > 0.0 && cross(c - b, p - b) > 0.0 && cross(a - c, p - c) > 0.0;
}

void ear_clip(const std::vector<Vec2>& v, std::vector<std::uint32_t> poly, std::vector<Triangle>& out) {
    while (poly.size() > 3) {
        const std::size_t n = poly.size();
        std::size_t ear = n;
        for (std::size_t i = 0; i < n && ear == n; ++i) {
            const auto ia = poly[(i + n - 1) % n];
            const auto ib = poly[i];
            const auto ic = poly[(i + 1) % n];
            const Vec2 a = v[ia], b = v[ib], c = v[ic];
            if (cross(b - a, c - b) <= 0.0) continue;
            bool blocked = false;
            for (std::size_t k = 0; k < n && !blocked; ++k) {
                const auto ip = poly[k];
                if (ip == ia || ip == ib || ip == ic) continue;
                const Vec2 p = v[ip];
                if (p == a || p == b || p == c) continue;
                blocked = strictly_inside_triangle(p, a, b, c);
            }
            if (!blocked) ear = i;
        }
        if (ear == n) {
            // No clean ear (numerically degenerate input): clip the most convex corner.
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < n; ++i) {
                const Vec2 a = v[poly[(i + n - 1) % n]], b = v[poly[i]], c = v[poly[(i + 1) % n]];
                const double turn = cross(b - a, c - b);
                if (turn > best) {
                    best = turn;
                    ear = i;
                }
            }
        }
        const auto ia = poly[(ear + n - 1) % n];
        const auto ib = poly[ear];
        const auto ic = poly[(ear + 1) % n];
        if (cross(v[ib] - v[ia], v[ic] - v[ib]) > 0.0) out.push_back({ia, ib, ic});
        poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(ear));
    }
    if (poly.size() == 3 && cross(v[poly[1]] - v[poly[0]], v[poly[2]] - v[poly[1]]) > 0.0) {
        out.push_back({poly[0], poly[1], poly[2]});
    }
}

}  // namespace

Triangulation triangulate(const PolygonSet& set) {
    Triangulation tri;
    std::vector<Loop> loops(set.contours.size());
    for (std::size_t i = 0; i < set.contours.size(); ++i) {
        for (const Vec2& p : set.contours[i].points) {
            loops[i].idx.push_back(static_cast<std::uint32_t>(tri.vertices.size()));
            tri.vertices.push_back(p);
        }
    }
    for (const auto& group : group_polygons(set)) {
        std::vector<Loop> holes;
        for (auto h : group.holes) holes.push_back(loops[h]);
        Loop merged = bridge_holes(tri.vertices, loops[group.outer], std::move(holes));
        ear_clip(tri.vertices, std::move(merged.idx), tri.triangles);
    }
    return tri;
}

TriangleMesh extrude(const PolygonSet& set, const PlaneFrame& frame, double shift_from, double shift_to,
                     std::string name) {
    TriangleMesh mesh;
    mesh.name = std::move(name);
    const Triangulation tri = triangulate(set);
    const auto n = static_cast<std::uint32_t>(tri.vertices.size());
    const bool up = shift_to >= shift_from;
    const double lo = up ? shift_from : shift_to;
    const double hi = up ? shift_to : shift_from;
    mesh.vertices.reserve(2 * n);
    for (const Vec2& p : tri.vertices) mesh.vertices.push_back(frame.to_world(p, lo));
    for (const Vec2& p : tri.vertices) mesh.vertices.push_back(frame.to_world(p, hi));
    for (const auto& t : tri.triangles) {
        mesh.triangles.push_back({t[0], t[2], t[1]});
        mesh.triangles.push_back({t[0] + n, t[1] + n, t[2] + n});
    }
    std::uint32_t base = 0;
    for (const auto& c : set.contours) {
        const auto m = static_cast<std::uint32_t>(c.points.size());
        for (std::uint32_t i = 0; i < m; ++i) {
            const std::uint32_t a = base + i;
            const std::uint32_t b = base + (i + 1) % m;
            mesh.triangles.push_back({a, b, b + n});
            mesh.triangles.push_back({a, b + n, a + n});
        }
        base += m;
    }
    return mesh;
}

TriangleMesh make_box(Vec3 min, Vec3 max, std::string name) {
    PlaneFrame frame = plane_frame(Plane{{0.0, 0.0, 1.0}, 0.0});
    PolygonSet rect{{make_rectangle({min.x, min.y}, {max.x, max.y})}};
    return extrude(rect, frame, min.z, max.z, std::move(name));
}

TriangleMesh make_rod(Vec3 from, Vec3 to, double width) {
    const Vec3 axis = to - from;
    const double len = norm(axis);
    PlaneFrame frame = plane_frame(Plane{axis, 0.0});
    frame.offset = dot(from, frame.normal);
    const Vec2 c = frame.to_plane(from);
    const double h = 0.5 * width;
    PolygonSet square{{make_rectangle({c.x - h, c.y - h}, {c.x + h, c.y + h})}};
    return extrude(square, frame, 0.0, len);
}

void append_mesh(TriangleMesh& into, const TriangleMesh& part) {
    const auto base = static_cast<std::uint32_t>(into.vertices.size());
    into.vertices.insert(into.vertices.end(), part.vertices.begin(), part.vertices.end());
    for (const auto& t : part.triangles) into.triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

}  // namespace camforge
