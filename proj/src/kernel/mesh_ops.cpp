#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/mesh.hpp"

namespace camforge {

void TriangleMesh::validate() const {
    if (triangles.empty()) throw Error(ErrorCode::EmptyMesh, "mesh has no triangles");
    for (const Vec3& v : vertices) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z)) {
            throw Error(ErrorCode::NonFiniteCoordinate, "mesh vertex is not finite");
        }
    }
    for (const auto& t : triangles) {
        for (auto idx : t) {
            if (idx >= vertices.size()) {
                throw Error(ErrorCode::InvalidMesh,
                            fmt::format("triangle index {} out of range ({} vertices)", idx, vertices.size()));
            }
        }
    }
}

Aabb3 TriangleMesh::bounds() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    Aabb3 box{{inf, inf, inf}, {-inf, -inf, -inf}};
    for (const auto& t : triangles) {
        for (auto idx : t) {
            const Vec3 v = vertices[idx];
            box.min = {std::min(box.min.x, v.x), std::min(box.min.y, v.y), std::min(box.min.z, v.z)};
            box.max = {std::max(box.max.x, v.x), std::max(box.max.y, v.y), std::max(box.max.z, v.z)};
        }
    }
    return box;
}

PlaneFrame plane_frame(const Plane& plane) {
    const double len = norm(plane.normal);
    PlaneFrame f;
    f.normal = plane.normal * (1.0 / len);
    f.offset = plane.offset / len;
    if (std::abs(f.normal.z) > 0.9) {
        f.u = normalized(cross(Vec3{0.0, 1.0, 0.0}, f.normal));
    } else {
        f.u = normalized(cross(Vec3{0.0, 0.0, 1.0}, f.normal));
    }
    f.v = cross(f.normal, f.u);
    return f;
}

MeshStats mesh_stats(const TriangleMesh& mesh) {
    MeshStats s;
    const Aabb3 box = mesh.bounds();
    s.bbox_min = box.min;
    s.bbox_max = box.max;

    std::unordered_map<std::uint64_t, int> directed;
    directed.reserve(mesh.triangles.size() * 3);
    auto key = [](std::uint32_t a, std::uint32_t b) { return (static_cast<std::uint64_t>(a) << 32) | b; };
    bool repeated_edge = false;
    for (const auto& t : mesh.triangles) {
        const Vec3 a = mesh.vertices[t[0]];
        const Vec3 b = mesh.vertices[t[1]];
        const Vec3 c = mesh.vertices[t[2]];
        s.volume += dot(a, cross(b, c)) / 6.0;
        if (0.5 * norm(cross(b - a, c - a)) < 1e-8) ++s.degenerate_triangles;
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
        for (int i = 0; i < 3; ++i) {
            if (++directed[key(t[i], t[(i + 1) % 3])] > 1) repeated_edge = true;
        }
    }
    s.watertight = !repeated_edge && !directed.empty();
    if (s.watertight) {
        for (const auto& [k, count] : directed) {
            const auto a = static_cast<std::uint32_t>(k >> 32);
            const auto b = static_cast<std::uint32_t>(k & 0xffffffffu);
            if (!directed.contains(key(b, a))) {
                s.watertight = false;
                break;
            }
        }
    }
    return s;
}

namespace {

using EdgeKey = std::uint64_t;

EdgeKey edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct Crossing {
    EdgeKey edge;
    Vec3 point;
};

struct Segment {
    Crossing start;
    Crossing end;
};

// Evaluated with the lower vertex index first so both triangles sharing an
// edge produce a bit-identical point.
Vec3 edge_point(const TriangleMesh& mesh, const std::vector<double>& dist, std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    const double t = dist[a] / (dist[a] - dist[b]);
    const Vec3 pa = mesh.vertices[a];
    return pa + (mesh.vertices[b] - pa) * t;
}

std::vector<Vec3> join_chain_points(const std::vector<Segment>& segs, const std::vector<std::size_t>& order) {
    std::vector<Vec3> pts;
    pts.reserve(order.size() + 1);
    pts.push_back(segs[order.front()].start.point);
    for (auto i : order) pts.push_back(segs[i].end.point);
    return pts;
}

Contour clean_contour(const std::vector<Vec2>& raw) {
    Contour c = remove_duplicate_points(Contour{raw, true});
    // Drop vertices lying on the chord of their neighbours (e.g. face diagonals).
    bool changed = true;
    while (changed && c.points.size() >= 3) {
        changed = false;
        std::vector<Vec2> kept;
        kept.reserve(c.points.size());
        const std::size_t n = c.points.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 prev = kept.empty() ? c.points[(i + n - 1) % n] : kept.back();
            const Vec2 cur = c.points[i];
            const Vec2 next = c.points[(i + 1) % n];
            const double chord = distance(prev, next);
            const double dev = chord > 0.0 ? std::abs(cross(next - prev, cur - prev)) / chord : distance(cur, prev);
            const bool between = chord > 0.0 && dot(cur - prev, next - prev) > 0.0 && dot(cur - next, prev - next) > 0.0;
            if (dev < 1e-9 && between) {
                changed = true;
                continue;
            }
            kept.push_back(cur);
        }
        c.points = std::move(kept);
    }
    return c;
}

}  // namespace

PlaneSection section_plane(const TriangleMesh& mesh, const Plane& plane) {
    const PlaneFrame frame0 = plane_frame(plane);
    PlaneSection result;
    result.applied_offset = frame0.offset;
    if (mesh.vertices.empty() || mesh.triangles.empty()) return result;

    std::vector<double> proj(mesh.vertices.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        proj[i] = dot(frame0.normal, mesh.vertices[i]);
        lo = std::min(lo, proj[i]);
        hi = std::max(hi, proj[i]);
    }
    double offset = frame0.offset;
    const double extent = hi - lo;
    if (extent <= 0.0 || offset < lo || offset > hi) return result;

    const double tol = kPlanePerturbation * extent;
    for (int attempt = 0; attempt < 64; ++attempt) {
        const bool near_vertex =
            std::any_of(proj.begin(), proj.end(), [&](double p) { return std::abs(p - offset) < tol; });
        if (!near_vertex) break;
        // Step toward the interior when the upward dodge would leave the mesh.
        offset += (offset + tol > hi && offset - tol >= lo) ? -tol : tol;
    }
    result.applied_offset = offset;
    if (offset <= lo || offset >= hi) return result;

    std::vector<double> dist(proj.size());
    for (std::size_t i = 0; i < proj.size(); ++i) dist[i] = proj[i] - offset;

    std::vector<Segment> segs;
    for (const auto& t : mesh.triangles) {
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
        std::optional<Crossing> down;  // edge leaving the positive side
        std::optional<Crossing> up;    // edge entering the positive side
        for (int i = 0; i < 3; ++i) {
            const auto a = t[i];
            const auto b = t[(i + 1) % 3];
            const bool pa = dist[a] > 0.0;
            const bool pb = dist[b] > 0.0;
            if (pa == pb) continue;
            Crossing c{edge_key(a, b), edge_point(mesh, dist, a, b)};
            (pa ? down : up) = c;
        }
        if (down && up) segs.push_back({*down, *up});
    }
    if (segs.empty()) return result;

    std::unordered_map<EdgeKey, std::size_t> by_start;
    std::unordered_map<EdgeKey, std::size_t> end_count;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        by_start.emplace(segs[i].start.edge, i);
        ++end_count[segs[i].end.edge];
    }

    std::vector<bool> used(segs.size(), false);
    std::vector<std::vector<Vec3>> closed;
    std::vector<std::vector<Vec3>> open;
    auto walk = [&](std::size_t first) {
        std::vector<std::size_t> order;
        std::size_t cur = first;
        for (;;) {
            used[cur] = true;
            order.push_back(cur);
            auto it = by_start.find(segs[cur].end.edge);
            if (it != by_start.end() && it->second == first) {
                auto pts = join_chain_points(segs, order);
                pts.pop_back();
                closed.push_back(std::move(pts));
                return;
            }
            if (it == by_start.end() || used[it->second]) {
                open.push_back(join_chain_points(segs, order));
                return;
            }
            cur = it->second;
        }
    };
    // Chain heads first so open chains are walked whole.
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (!used[i] && !end_count.contains(segs[i].start.edge)) walk(i);
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (!used[i]) walk(i);
    }

    // Unwelded input can leave chains whose ends coincide geometrically.
    bool merged = true;
    while (merged && !open.empty()) {
        merged = false;
        for (std::size_t i = 0; i < open.size() && !merged; ++i) {
            if (norm(open[i].back() - open[i].front()) <= kChainSnapTolerance && open[i].size() > 3) {
                open[i].pop_back();
                closed.push_back(std::move(open[i]));
                open.erase(open.begin() + static_cast<std::ptrdiff_t>(i));
                merged = true;
                break;
            }
            for (std::size_t j = 0; j < open.size(); ++j) {
                if (i == j) continue;
                if (norm(open[i].back() - open[j].front()) <= kChainSnapTolerance) {
                    open[i].insert(open[i].end(), open[j].begin() + 1, open[j].end());
                    open.erase(open.begin() + static_cast<std::ptrdiff_t>(j));
                    merged = true;
                    break;
                }
            }
        }
    }
    result.open_chains = open.size();

    PlaneFrame frame = frame0;
    frame.offset = offset;
    std::vector<Contour> contours;
    for (const auto& chain : closed) {
        std::vector<Vec2> pts2;
        pts2.reserve(chain.size());
        for (const Vec3& p : chain) pts2.push_back(frame.to_plane(p));
        Contour c = clean_contour(pts2);
        if (c.points.size() >= 3 && std::abs(signed_area(c)) > 0.0) contours.push_back(std::move(c));
    }
    try {
        result.polygons = normalize_polygonset(contours, true);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::CrossingContours) throw;
        result.crossing_contours = true;
        result.polygons = normalize_polygonset(std::move(contours), false);
    }
    return result;
}

PolygonSet intersect_plane(const TriangleMesh& mesh, const Plane& plane) {
    PlaneSection s = section_plane(mesh, plane);
    if (s.open_chains > 0) {
        throw Error(ErrorCode::OpenChains,
                    fmt::format("{} unclosed chain(s) at plane offset {}", s.open_chains, s.applied_offset));
    }
    if (s.crossing_contours) throw Error(ErrorCode::CrossingContours, "section contours cross each other");
    return std::move(s.polygons);
}

Contour convex_hull_2d(const std::vector<Vec2>& input) {
    constexpr double kCollinear = 1e-9;
    std::vector<Vec2> pts = input;
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) throw Error(ErrorCode::DegenerateInput, "fewer than 3 distinct points");

    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    auto turn = [](Vec2 o, Vec2 a, Vec2 b) { return cross(a - o, b - o); };
    for (const Vec2& p : pts) {
        while (k >= 2 && turn(hull[k - 2], hull[k - 1], p) < kCollinear) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = pts.size() - 1; i-- > 0;) {
        while (k >= lower && turn(hull[k - 2], hull[k - 1], pts[i]) < kCollinear) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) throw Error(ErrorCode::DegenerateInput, "points are collinear");
    return Contour{std::move(hull), true};
}

}  // namespace camforge
