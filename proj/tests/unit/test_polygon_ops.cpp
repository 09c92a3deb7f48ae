#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "camforge/error.hpp"
#include "camforge/polygon.hpp"
#include "oracles.hpp"

using namespace camforge;
using namespace camforge::oracles;

namespace {

Contour square(double size, Vec2 origin = {}) { return make_rectangle(origin, origin + Vec2{size, size}); }

Contour centered_square(double size) { return make_rectangle({-size / 2, -size / 2}, {size / 2, size / 2}); }

}  // namespace

TEST_CASE("signed area") {
    const Contour sq = square(10);
    CHECK(signed_area(sq) == 100.0);
    CHECK(signed_area(reversed(sq)) == -100.0);
    const Contour l{{{0, 0}, {20, 0}, {20, 10}, {10, 10}, {10, 20}, {0, 20}}, true};
    // Two rectangles: 20x10 plus 10x10.
    CHECK(signed_area(l) == doctest::Approx(20.0 * 10.0 + 10.0 * 10.0));
    Contour open = sq;
    open.closed = false;
    CHECK_THROWS_AS(signed_area(open), Error);
    try {
        signed_area(open);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotClosed);
    }
}

TEST_CASE("reversal negates area exactly") {
    std::mt19937 rng(5);
    for (int i = 0; i < 100; ++i) {
        const Contour c = random_convex_polygon(rng, {0, 0}, 37.3);
        CHECK(signed_area(reversed(c)) == -signed_area(c));
    }
}

TEST_CASE("normalize orientation and nesting") {
    PolygonSet one = normalize_polygonset({reversed(square(10))});
    REQUIRE(one.contours.size() == 1);
    CHECK(signed_area(one.contours[0]) == 100.0);

    PolygonSet ring = normalize_polygonset({centered_square(20), centered_square(10)});
    REQUIRE(ring.contours.size() == 2);
    CHECK(signed_area(ring.contours[0]) == 400.0);
    CHECK(signed_area(ring.contours[1]) == -100.0);
    CHECK(ring.area() == 300.0);

    PolygonSet three = normalize_polygonset({centered_square(10), centered_square(30), reversed(centered_square(20))});
    REQUIRE(three.contours.size() == 3);
    CHECK(three.outer_count() == 2);
    CHECK(three.area() == doctest::Approx(900 - 400 + 100));
    CHECK(three.contains({0, 0}));
    CHECK_FALSE(three.contains({7, 0}));
    CHECK(three.contains({12, 0}));

    try {
        normalize_polygonset({square(10), square(10, {5, 5})});
        FAIL("expected CrossingContours");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CrossingContours);
    }
}

TEST_CASE("normalize is idempotent") {
    std::mt19937 rng(9);
    for (int i = 0; i < 30; ++i) {
        std::vector<Contour> in{random_convex_polygon(rng, {0, 0}, 50), reversed(centered_square(10)),
                                random_convex_polygon(rng, {200, 0}, 20)};
        const PolygonSet once = normalize_polygonset(in);
        const PolygonSet twice = normalize_polygonset(once.contours);
        REQUIRE(once.contours.size() == twice.contours.size());
        for (std::size_t k = 0; k < once.contours.size(); ++k) CHECK(once.contours[k].points == twice.contours[k].points);
    }
}

TEST_CASE("boolean examples") {
    const PolygonSet a{{square(10)}};
    const PolygonSet far{{square(10, {100, 100})}};
    const PolygonSet diff = boolean_op(a, far, BooleanOp::Difference);
    CHECK(diff.area() == doctest::Approx(100.0));
    REQUIRE(diff.contours.size() == 1);
    for (Vec2 p : diff.contours[0].points) CHECK(polyline_distance(a.contours[0].points, p, true) <= 1e-9);

    CHECK(boolean_op(a, a, BooleanOp::Difference).empty());

    const PolygonSet frame = boolean_op(PolygonSet{{centered_square(60)}}, PolygonSet{{centered_square(40)}},
                                        BooleanOp::Difference);
    REQUIRE(frame.contours.size() == 2);
    CHECK(frame.outer_count() == 1);
    CHECK(frame.area() == doctest::Approx(3600.0 - 1600.0));

    // Collinear overlapping edges.
    const PolygonSet u = boolean_op(PolygonSet{{square(10)}}, PolygonSet{{square(10, {10, 0})}}, BooleanOp::Union);
    CHECK(u.area() == doctest::Approx(200.0));
    CHECK(u.contours.size() == 1);
}

TEST_CASE("difference plus intersection recovers A") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> shift(-30.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        const PolygonSet a{{random_convex_polygon(rng, {0, 0}, 40)}};
        const PolygonSet b{{random_convex_polygon(rng, {shift(rng), shift(rng)}, 35)}};
        const double lhs = boolean_op(a, b, BooleanOp::Difference).area() + boolean_op(a, b, BooleanOp::Intersection).area();
        CHECK(std::abs(lhs - a.area()) <= 1e-6 * a.area());
    }
}

TEST_CASE("union is commutative") {
    std::mt19937 rng(33);
    std::uniform_real_distribution<double> shift(-30.0, 30.0);
    std::uniform_real_distribution<double> probe(-80.0, 80.0);
    for (int i = 0; i < 20; ++i) {
        const PolygonSet a{{random_convex_polygon(rng, {0, 0}, 40)}};
        const PolygonSet b{{random_convex_polygon(rng, {shift(rng), shift(rng)}, 35)}};
        const PolygonSet ab = boolean_op(a, b, BooleanOp::Union);
        const PolygonSet ba = boolean_op(b, a, BooleanOp::Union);
        CHECK(std::abs(ab.area() - ba.area()) <= 1e-9 * ab.area());
        for (int k = 0; k < 1000; ++k) {
            const Vec2 p{probe(rng), probe(rng)};
            const bool oracle = a.contains(p) || b.contains(p);
            if (distance_to_boundary(ab, p) < 1e-6) continue;
            CHECK(ab.contains(p) == oracle);
            CHECK(ba.contains(p) == oracle);
        }
    }
}

TEST_CASE("offset examples") {
    const PolygonSet sq40{{centered_square(40)}};
    const OffsetResult same = offset_polygonset(sq40, 0.0);
    CHECK(same.polygons.contours[0].points == sq40.contours[0].points);
    CHECK_FALSE(same.collapsed);

    const OffsetResult grown = offset_polygonset(sq40, 1.0);
    CHECK(grown.polygons.area() == doctest::Approx(1764.0));
    CHECK(hausdorff(grown.polygons.contours.at(0), centered_square(42)) < 1e-9);

    const OffsetResult gone = offset_polygonset(PolygonSet{{square(10)}}, -6.0);
    CHECK(gone.polygons.empty());
    CHECK(gone.collapsed);

    const OffsetResult shrunk = offset_polygonset(PolygonSet{{square(10)}}, -2.0);
    CHECK(shrunk.polygons.area() == doctest::Approx(36.0));
    CHECK_FALSE(shrunk.collapsed);

    // Holes shrink as outers grow.
    const PolygonSet ring = normalize_polygonset({centered_square(60), centered_square(20)});
    const OffsetResult r = offset_polygonset(ring, 1.0);
    CHECK(r.polygons.area() == doctest::Approx(62.0 * 62.0 - 18.0 * 18.0));
}

TEST_CASE("offset round trip on convex polygons") {
    std::mt19937 rng(44);
    int tested = 0;
    while (tested < 50) {
        const Contour c = random_convex_polygon(rng, {10, -5}, 30);
        // Corners sharper than this get truncated by the miter limit and cannot round-trip.
        if (min_interior_angle_deg(c) < 30.0) continue;
        ++tested;
        const PolygonSet p{{c}};
        const PolygonSet back = offset_polygonset(offset_polygonset(p, 1.5).polygons, -1.5).polygons;
        REQUIRE(back.contours.size() == 1);
        CHECK(hausdorff(back.contours[0], c) <= 1e-6);
    }
}

TEST_CASE("simplify polyline") {
    const Contour line{{{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}}, false};
    const Contour s = simplify_polyline(line, 0.01);
    REQUIRE(s.points.size() == 2);
    CHECK(s.points.front() == Vec2{0, 0});
    CHECK(s.points.back() == Vec2{4, 0});

    const Contour dup{{{0, 0}, {1, 1}, {1, 1}, {2, 0}, {3, 1}}, false};
    CHECK(simplify_polyline(dup, 0.0).points == std::vector<Vec2>{{0, 0}, {1, 1}, {2, 0}, {3, 1}});

    Contour zig{{}, false};
    for (int i = 0; i <= 40; ++i) zig.points.push_back({double(i), (i % 2) ? 1.0 : 0.0});
    const Contour z = simplify_polyline(zig, 2.0);
    CHECK(z.points.size() == 2);
    for (Vec2 p : zig.points) CHECK(polyline_distance(z.points, p, false) <= 2.0);
}

TEST_CASE("simplify keeps deviation within tolerance") {
    std::mt19937 rng(2);
    std::normal_distribution<double> step(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Contour c{{{0, 0}}, false};
        for (int i = 0; i < 200; ++i) c.points.push_back(c.points.back() + Vec2{1.0 + std::abs(step(rng)), step(rng)});
        const double tol = 0.1 * (trial % 10 + 1);
        const Contour s = simplify_polyline(c, tol);
        CHECK(s.points.front() == c.points.front());
        CHECK(s.points.back() == c.points.back());
        for (Vec2 p : s.points) CHECK(std::find(c.points.begin(), c.points.end(), p) != c.points.end());
        for (Vec2 p : c.points) CHECK(polyline_distance(s.points, p, false) <= tol + 1e-12);
    }
}

TEST_CASE("bend tables") {
    const BendTable line = polyline_to_bends(Contour{{{0, 0}, {5, 0}, {12, 0}}, false});
    REQUIRE(line.rows.size() == 2);
    CHECK(line.rows[0].feed_mm == 5.0);
    CHECK(line.rows[0].bend_deg == 0.0);
    CHECK(line.rows[1].feed_mm == 7.0);

    const BendTable sq = polyline_to_bends(square(40));
    CHECK(sq.closed);
    REQUIRE(sq.rows.size() == 4);
    for (const auto& r : sq.rows) {
        CHECK(r.feed_mm == doctest::Approx(40.0));
        CHECK(r.bend_deg == doctest::Approx(90.0));
    }

    const double h = std::sqrt(3.0) / 2 * 30;
    const BendTable tri = polyline_to_bends(Contour{{{0, 0}, {30, 0}, {15, h}}, true});
    REQUIRE(tri.rows.size() == 3);
    for (const auto& r : tri.rows) {
        CHECK(r.feed_mm == doctest::Approx(30.0));
        CHECK(r.bend_deg == doctest::Approx(120.0));
    }

    const BendTable cw = polyline_to_bends(reversed(square(40)));
    for (const auto& r : cw.rows) CHECK(r.bend_deg == doctest::Approx(-90.0));

    try {
        polyline_to_bends(Contour{{{0, 0}, {0, 0}, {1, 0}}, false});
        FAIL("expected DegeneratePoint");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegeneratePoint);
    }
}

TEST_CASE("bends to polyline") {
    const Contour back = bends_to_polyline(polyline_to_bends(square(40)), {0, 0}, 0.0);
    const Contour sq = square(40);
    REQUIRE(back.points.size() == sq.points.size());
    for (std::size_t i = 0; i < sq.points.size(); ++i) CHECK(norm(back.points[i] - sq.points[i]) < 1e-9);
    CHECK(back.closed);

    BendTable straight;
    straight.rows = {{3.0, 0.0}, {4.5, 0.0}};
    const Contour l = bends_to_polyline(straight, {0, 0}, 0.0);
    REQUIRE(l.points.size() == 3);
    CHECK(norm(l.points.back() - Vec2{7.5, 0}) < 1e-12);
}

TEST_CASE("bend round trip up to rigid motion") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> len(1.0, 20.0);
    std::uniform_real_distribution<double> turn(-150.0, 150.0);
    for (int trial = 0; trial < 50; ++trial) {
        // Random walk with bounded turns: consecutive segments never fold back.
        Contour c{{{0, 0}}, false};
        double heading = 0.0;
        for (int i = 0; i < 49; ++i) {
            heading += turn(rng) * std::numbers::pi / 180.0;
            const double l = len(rng);
            c.points.push_back(c.points.back() + Vec2{l * std::cos(heading), l * std::sin(heading)});
        }
        const Vec2 start{13.0, -4.0};
        const Vec2 d = c.points[1] - c.points[0];
        const double h0 = std::atan2(d.y, d.x) * 180.0 / std::numbers::pi;
        const Contour back = bends_to_polyline(polyline_to_bends(c), start, h0);
        REQUIRE(back.points.size() == c.points.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < c.points.size(); ++i) worst = std::max(worst, norm(back.points[i] - (c.points[i] + start)));
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("offset of a concave polygon and beveled spikes") {
    const Contour l{{{0, 0}, {20, 0}, {20, 10}, {10, 10}, {10, 20}, {0, 20}}, true};
    const OffsetResult grown = offset_polygonset(PolygonSet{{l}}, 1.0);
    REQUIRE(grown.polygons.contours.size() == 1);
    CHECK(grown.polygons.contours[0].points.size() == 6);
    // Bounding square 22 x 22 minus the displaced 10 x 10 notch.
    CHECK(grown.polygons.area() == doctest::Approx(22.0 * 22.0 - 10.0 * 10.0));
    const OffsetResult shrunk = offset_polygonset(PolygonSet{{l}}, -1.0);
    CHECK(shrunk.polygons.area() == doctest::Approx(18.0 * 8.0 + 8.0 * 10.0));

    const Contour spike{{{0, 0}, {100, 0}, {0, 10}}, true};
    for (const PolygonSet& p : {PolygonSet{{spike}}, PolygonSet{{l, Contour{{{200, 0}, {300, 0}, {200, 10}}, true}}}}) {
        const OffsetResult r = offset_polygonset(p, 1.0);
        double reach = 0.0;
        for (const auto& c : r.polygons.contours) {
            for (Vec2 q : c.points) reach = std::max(reach, distance_to_boundary(p, q));
        }
        CHECK(reach <= 4.0 + 1e-9);
        CHECK(reach >= 1.0 - 1e-9);
    }
    // The sharp tip is cut by a bevel, adding one vertex.
    CHECK(offset_polygonset(PolygonSet{{spike}}, 1.0).polygons.contours[0].points.size() == 4);
}

TEST_CASE("rigid fit oracle") {
    std::mt19937 rng(3);
    const Contour c = random_star_polygon(rng, {5, 5}, 20, 11);
    std::vector<Vec2> moved;
    const double a = 1.1;
    for (Vec2 p : c.points) moved.push_back(Vec2{std::cos(a) * p.x - std::sin(a) * p.y, std::sin(a) * p.x + std::cos(a) * p.y} + Vec2{-30, 7});
    CHECK(rigid_fit_error(c.points, moved) < 1e-12);
    moved[4] = moved[4] + Vec2{0.5, 0};
    CHECK(rigid_fit_error(c.points, moved) > 0.1);
    // Star polygons are simple and counter-clockwise.
    CHECK(signed_area(c) > 0.0);
    CHECK(normalize_polygonset({c}).contours.size() == 1);
}
