#pragma once

#include <string>
#include <vector>

#include "camforge/mesh.hpp"
#include "camforge/polygon.hpp"

namespace camforge {

/// Triangles index `vertices`, which lists every contour point in set order.
struct Triangulation {
    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;
};

/// Ear clipping with hole bridging. Triangles are counter-clockwise.
Triangulation triangulate(const PolygonSet& set);

/// Prism over a planar region: the region lives in `frame` and is swept
/// along the frame normal from `shift_from` to `shift_to`.
TriangleMesh extrude(const PolygonSet& set, const PlaneFrame& frame, double shift_from, double shift_to,
                     std::string name = {});

/// Axis-aligned box with outward-facing triangles.
TriangleMesh make_box(Vec3 min, Vec3 max, std::string name = {});

/// Square-section rod between two points.
TriangleMesh make_rod(Vec3 from, Vec3 to, double width);

/// Appends `part` to `into`, offsetting indices.
void append_mesh(TriangleMesh& into, const TriangleMesh& part);

}  // namespace camforge
