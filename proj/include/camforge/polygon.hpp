#pragma once

// Planar polygon machinery shared by every workflow. Units are millimetres.
//
// Orientation convention: outer boundaries are counter-clockwise (positive
// signed area), holes are clockwise. Membership follows the even-odd rule.

#include <optional>
#include <vector>

#include "camforge/vec.hpp"

namespace camforge {

struct Contour {
    std::vector<Vec2> points;
    bool closed = true;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

struct PolygonSet {
    std::vector<Contour> contours;

    bool empty() const { return contours.empty(); }
    /// Sum of signed contour areas; equals the enclosed area once normalized.
    double area() const;
    double perimeter() const;
    std::optional<Aabb2> bounds() const;
    /// Even-odd point membership.
    bool contains(Vec2 p) const;
    std::size_t outer_count() const;
    PolygonSet translated(Vec2 offset) const;
};

struct BendRow {
    double feed_mm = 0.0;
    double bend_deg = 0.0;
};

struct BendTable {
    std::vector<BendRow> rows;
    bool closed = false;

    double total_length() const;
};

enum class BooleanOp { Union, Intersection, Difference };

struct OffsetResult {
    PolygonSet polygons;
    /// Set when at least one input region vanished entirely.
    bool collapsed = false;
};

/// Shoelace area; positive iff counter-clockwise. Throws NotClosed for open contours.
double signed_area(const Contour& contour);
double contour_length(const Contour& contour);
Contour reversed(const Contour& contour);
std::optional<Aabb2> contour_bounds(const Contour& contour);

/// Ray-casting (even-odd) point-in-contour test. Points on the boundary may go either way.
bool point_in_contour(const Contour& contour, Vec2 p);
/// Distance from p to the nearest edge of the contour.
double distance_to_contour(const Contour& contour, Vec2 p);
double distance_to_boundary(const PolygonSet& set, Vec2 p);

/// An outer contour with the holes directly inside it.
struct PolygonGroup {
    std::size_t outer = 0;
    std::vector<std::size_t> holes;
};

/// Attaches every hole of a normalized set to the smallest enclosing outer.
std::vector<PolygonGroup> group_polygons(const PolygonSet& set);

/// Drops consecutive points closer than `tolerance` (and a closing duplicate).
Contour remove_duplicate_points(const Contour& contour, double tolerance = 1e-9);

/// Assigns nesting depth by ray casting and fixes orientations: even depth
/// becomes a CCW outer, odd depth a CW hole. Throws CrossingContours when two
/// contours properly cross and `check_crossings` is set.
PolygonSet normalize_polygonset(std::vector<Contour> contours, bool check_crossings = true);

PolygonSet boolean_op(const PolygonSet& a, const PolygonSet& b, BooleanOp op);

/// Displaces every edge by `delta` along its outward normal with mitered
/// joins (limit 4 x delta). Negative deltas shrink outers and grow holes.
OffsetResult offset_polygonset(const PolygonSet& set, double delta);

/// Douglas-Peucker simplification. A vertex is dropped only when its
/// deviation from the simplified chain is strictly below `tolerance`.
Contour simplify_polyline(const Contour& contour, double tolerance);

/// Feed lengths and signed in-plane turn angles (left turns positive).
BendTable polyline_to_bends(const Contour& contour);

/// Dead-reckoning reconstruction of a bend table.
Contour bends_to_polyline(const BendTable& table, Vec2 start, double heading_deg);

/// Counter-clockwise polygon approximating a circle.
Contour make_circle(Vec2 center, double radius, int segments);
Contour make_rectangle(Vec2 min, Vec2 max);

}  // namespace camforge
