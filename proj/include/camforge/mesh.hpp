#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "camforge/polygon.hpp"
#include "camforge/vec.hpp"

namespace camforge {

inline constexpr double kWeldTolerance = 1e-4;
inline constexpr double kChainSnapTolerance = 1e-6;
inline constexpr double kPlanePerturbation = 1e-5;

using Triangle = std::array<std::uint32_t, 3>;

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::string name;

    /// Throws InvalidMesh / NonFiniteCoordinate / EmptyMesh.
    void validate() const;
    Aabb3 bounds() const;
};

struct MeshStats {
    Vec3 bbox_min{};
    Vec3 bbox_max{};
    double volume = 0.0;
    bool watertight = false;
    std::size_t degenerate_triangles = 0;
};

/// Plane {p : normal . p = offset}.
struct Plane {
    Vec3 normal{0.0, 0.0, 1.0};
    double offset = 0.0;
};

/// Right-handed in-plane basis: cross(u, v) == normal. For non-horizontal
/// planes v points as close to +z as possible.
struct PlaneFrame {
    Vec3 u{};
    Vec3 v{};
    Vec3 normal{};
    double offset = 0.0;

    Vec3 to_world(Vec2 p, double normal_shift = 0.0) const {
        return u * p.x + v * p.y + normal * (offset + normal_shift);
    }
    Vec2 to_plane(Vec3 p) const { return {dot(p, u), dot(p, v)}; }
};

PlaneFrame plane_frame(const Plane& plane);

/// Reads binary or ASCII STL, welding vertices closer than 1e-4 mm.
TriangleMesh parse_stl(std::string_view bytes);
std::string write_stl(const TriangleMesh& mesh, bool ascii);

MeshStats mesh_stats(const TriangleMesh& mesh);

struct PlaneSection {
    PolygonSet polygons;
    std::size_t open_chains = 0;
    /// Offset actually sliced after the vertex-degeneracy dodge.
    double applied_offset = 0.0;
    /// Contours crossed each other; nesting was assigned without the check.
    bool crossing_contours = false;
};

/// Slices the mesh and reports defects instead of throwing.
PlaneSection section_plane(const TriangleMesh& mesh, const Plane& plane);

/// Strict form: throws OpenChains (with the chain count) when the mesh
/// leaves unclosed chains on the plane.
PolygonSet intersect_plane(const TriangleMesh& mesh, const Plane& plane);

/// Counter-clockwise convex hull without collinear vertices.
Contour convex_hull_2d(const std::vector<Vec2>& points);

}  // namespace camforge
