#include "fixtures.hpp"

#include <cmath>
#include <map>
#include <numbers>

#include "camforge/tessellate.hpp"

namespace camforge::fixtures {

TriangleMesh box(Vec3 min, Vec3 max) { return make_box(min, max, "box"); }

TriangleMesh cube(double size, Vec3 center) {
    const Vec3 h{size / 2, size / 2, size / 2};
    TriangleMesh m = make_box(center - h, center + h, "cube");
    return m;
}

TriangleMesh icosphere(double radius, int subdivisions, Vec3 center) {
    const double lat = std::atan(0.5);
    std::vector<Vec3> v{{0, 0, 1}};
    for (int i = 0; i < 5; ++i) {
        const double a = 2 * std::numbers::pi * i / 5;
        v.push_back({std::cos(lat) * std::cos(a), std::cos(lat) * std::sin(a), std::sin(lat)});
    }
    for (int i = 0; i < 5; ++i) {
        const double a = 2 * std::numbers::pi * i / 5 + std::numbers::pi / 5;
        v.push_back({std::cos(lat) * std::cos(a), std::cos(lat) * std::sin(a), -std::sin(lat)});
    }
    v.push_back({0, 0, -1});
    std::vector<Triangle> f;
    for (std::uint32_t i = 0; i < 5; ++i) {
        const std::uint32_t n = (i + 1) % 5;
        f.push_back({0, 1 + i, 1 + n});
        f.push_back({11, 6 + n, 6 + i});
        f.push_back({1 + i, 6 + i, 1 + n});
        f.push_back({1 + n, 6 + i, 6 + n});
    }
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            v.push_back(normalized(v[a] + v[b]));
            const auto idx = static_cast<std::uint32_t>(v.size() - 1);
            mid.emplace(key, idx);
            return idx;
        };
        std::vector<Triangle> next;
        for (const auto& t : f) {
            const auto ab = midpoint(t[0], t[1]);
            const auto bc = midpoint(t[1], t[2]);
            const auto ca = midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        f = std::move(next);
    }
    TriangleMesh m;
    m.name = "icosphere";
    for (const Vec3& p : v) m.vertices.push_back(center + p * radius);
    m.triangles = std::move(f);
    return m;
}

TriangleMesh hemisphere(double radius, bool flat_down, int rings, int segments) {
    TriangleMesh m;
    m.name = flat_down ? "hemisphere" : "dome";
    const auto seg = static_cast<std::uint32_t>(segments);
    for (int j = 0; j < rings; ++j) {
        const double phi = (std::numbers::pi / 2) * j / rings;
        for (int k = 0; k < segments; ++k) {
            const double th = 2 * std::numbers::pi * k / segments;
            m.vertices.push_back({radius * std::cos(phi) * std::cos(th), radius * std::cos(phi) * std::sin(th),
                                  radius * std::sin(phi)});
        }
    }
    const auto pole = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back({0, 0, radius});
    const auto centre = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back({0, 0, 0});
    auto at = [&](int j, std::uint32_t k) { return static_cast<std::uint32_t>(j) * seg + (k % seg); };
    for (std::uint32_t k = 0; k < seg; ++k) {
        m.triangles.push_back({centre, at(0, k + 1), at(0, k)});
        for (int j = 0; j + 1 < rings; ++j) {
            m.triangles.push_back({at(j, k), at(j, k + 1), at(j + 1, k + 1)});
            m.triangles.push_back({at(j, k), at(j + 1, k + 1), at(j + 1, k)});
        }
        m.triangles.push_back({at(rings - 1, k), at(rings - 1, k + 1), pole});
    }
    if (!flat_down) {
        for (auto& p : m.vertices) p.z = -p.z;
        for (auto& t : m.triangles) std::swap(t[1], t[2]);
    }
    return m;
}

TriangleMesh cylinder_x(double radius, double length, int segments) {
    const PlaneFrame frame = plane_frame(Plane{{1, 0, 0}, 0});
    PolygonSet disc{{make_circle({0, 0}, radius, segments)}};
    return extrude(disc, frame, -length / 2, length / 2, "cylinder");
}

TriangleMesh translated(TriangleMesh mesh, Vec3 offset) {
    for (auto& v : mesh.vertices) v = v + offset;
    return mesh;
}

TriangleMesh merged(const TriangleMesh& a, const TriangleMesh& b, std::string name) {
    TriangleMesh m = a;
    append_mesh(m, b);
    m.name = std::move(name);
    return m;
}

TriangleMesh two_blob() {
    return merged(icosphere(10, 2, {-12, 0, -6}), icosphere(10, 2, {12, 0, 6}), "two-blob");
}

TriangleMesh two_spheres() {
    return merged(icosphere(10, 2, {0, 20, 0}), icosphere(10, 2, {20, 0, 0}), "two-spheres");
}

TriangleMesh stool() {
    const PlaneFrame frame = plane_frame(Plane{{0, -1, 0}, 0});
    Contour profile{{{-20, 0}, {-14, 0}, {-14, 25}, {14, 25}, {14, 0}, {20, 0}, {20, 30}, {-20, 30}}, true};
    return extrude(PolygonSet{{profile}}, frame, -15, 15, "stool");
}

TriangleMesh random_convex(std::mt19937& rng) {
    std::uniform_real_distribution<double> scale(8.0, 30.0);
    std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    const double sx = scale(rng), sy = scale(rng), sz = scale(rng);
    const double a = angle(rng), b = angle(rng), c = angle(rng);
    const Vec3 t{shift(rng), shift(rng), shift(rng)};
    TriangleMesh m = icosphere(1.0, 2);
    m.name = "convex";
    for (auto& p : m.vertices) {
        Vec3 q{p.x * sx, p.y * sy, p.z * sz};
        q = {q.x * std::cos(a) - q.y * std::sin(a), q.x * std::sin(a) + q.y * std::cos(a), q.z};
        q = {q.x, q.y * std::cos(b) - q.z * std::sin(b), q.y * std::sin(b) + q.z * std::cos(b)};
        q = {q.x * std::cos(c) - q.y * std::sin(c), q.x * std::sin(c) + q.y * std::cos(c), q.z};
        p = q + t;
    }
    return m;
}

}  // namespace camforge::fixtures
