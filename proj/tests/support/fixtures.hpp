#pragma once

// Mesh fixtures shared by the unit and acceptance suites.

#include <random>
#include <string>

#include "camforge/mesh.hpp"

namespace camforge::fixtures {

TriangleMesh cube(double size, Vec3 center = {});
TriangleMesh box(Vec3 min, Vec3 max);
TriangleMesh icosphere(double radius, int subdivisions, Vec3 center = {});
/// Dome with its flat face at z = 0, pointing up (or down when `flat_down` is false).
TriangleMesh hemisphere(double radius, bool flat_down = true, int rings = 8, int segments = 32);
/// Polygonal cylinder whose axis is the x axis.
TriangleMesh cylinder_x(double radius, double length, int segments = 48);
/// Two disjoint spheres whose XY footprints do not overlap; one sits higher than the other.
TriangleMesh two_blob();
/// Spheres at (0,20,0) and (20,0,0), radius 10.
TriangleMesh two_spheres();
/// Side profile of a two-legged stool extruded 30 mm deep; 40 x 30 x 30 mm.
TriangleMesh stool();
/// Random rotated, scaled, translated ellipsoid.
TriangleMesh random_convex(std::mt19937& rng);

TriangleMesh translated(TriangleMesh mesh, Vec3 offset);
TriangleMesh merged(const TriangleMesh& a, const TriangleMesh& b, std::string name);

}  // namespace camforge::fixtures
