// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "camforge/export.hpp"
#include "camforge/slicer.hpp"
#include "camforge/workflows.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace camforge;
namespace fs = std::filesystem;

namespace {

// Collects failures; keeps the first few messages for the report.
struct Tally {
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::vector<std::string> messages;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (ok) return;
        ++failures;
        if (messages.size() < 3) messages.push_back(what);
    }
};

struct Outcome {
    bool pass;
    std::string detail;
};

Outcome finish(const Tally& t, std::string detail) {
    if (t.failures == 0) return {true, fmt::format("{} checks, {}", t.checks, detail)};
    std::string why = fmt::format("{}/{} checks failed", t.failures, t.checks);
    for (const auto& m : t.messages) why += "; " + m;
    return {false, why};
}

std::vector<TriangleMesh> fixture_set() {
    return {fixtures::cube(40), fixtures::icosphere(20, 3), fixtures::two_blob(), fixtures::stool()};
}

// Divergence theorem, summed per triangle.
double oracle_volume(const TriangleMesh& m) {
    double v = 0.0;
    for (const auto& t : m.triangles) {
        const Vec3 a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
        v += (a.x * (b.y * c.z - b.z * c.y) - a.y * (b.x * c.z - b.z * c.x) + a.z * (b.x * c.y - b.y * c.x)) / 6.0;
    }
    return v;
}

std::uint32_t binary_stl_count(const std::string& bytes) {
    std::uint32_t n = 0;
    if (bytes.size() >= 84) std::memcpy(&n, bytes.data() + 80, 4);
    return n;
}

// Criteria -------------------------------------------------------------------

Outcome all_workflows() {
    Tally t;
    const auto& reg = default_registry();
    t.expect(reg.list().size() == 5, "expected five registered workflows");
    std::size_t runs = 0;
    for (const auto& mesh : fixture_set()) {
        for (const auto& d : reg.list()) {
            const std::string where = fmt::format("{} on {}", d.id, mesh.name);
            WorkflowOutput a, b;
            try {
                a = reg.generate(d.id, mesh, {});
                b = reg.generate(d.id, mesh, {});
                check_output(a);
            } catch (const std::exception& e) {
                t.expect(false, where + ": " + e.what());
                continue;
            }
            ++runs;
            // Closure: every referenced file exists, names are unique.
            std::set<std::string> names;
            for (const auto& art : a.artifacts) t.expect(names.insert(art.filename).second, where + ": duplicate file");
            for (const auto& s : a.guide.steps) {
                for (const auto& ref : s.artifact_refs) t.expect(names.count(ref) == 1, where + ": dangling " + ref);
            }
            t.expect(!a.guide.steps.empty() && !a.preview.empty(), where + ": empty guide or preview");

            // Determinism.
            t.expect(a.artifacts.size() == b.artifacts.size(), where + ": artifact count differs");
            for (std::size_t i = 0; i < std::min(a.artifacts.size(), b.artifacts.size()); ++i) {
                t.expect(a.artifacts[i].bytes == b.artifacts[i].bytes, where + ": " + a.artifacts[i].filename + " differs");
            }
            const auto params = resolve_params(d.param_schema, {});
            const std::string zip = export_bundle(a, d, params);
            t.expect(zip == export_bundle(b, d, params), where + ": bundle differs");

            // Format round trips.
            for (const auto& art : a.artifacts) {
                const std::string f = where + ": " + art.filename;
                try {
                    switch (art.format) {
                        case ArtifactFormat::Svg: {
                            const auto svg = parse_svg(art.bytes);
                            t.expect(svg.contour_count() > 0 && svg.parts.size() == svg.labels.size(), f);
                            break;
                        }
                        case ArtifactFormat::Stl:
                            t.expect(parse_stl(art.bytes).triangles.size() == binary_stl_count(art.bytes), f);
                            break;
                        case ArtifactFormat::Csv:
                            if (art.filename.starts_with("wire_")) {
                                const auto w = parse_wire_csv(art.bytes);
                                t.expect(w.size() == 1 && export_wire_csv(w[0].wire_id, w[0].table) == art.bytes, f);
                            } else {
                                t.expect(export_points_csv(parse_points_csv(art.bytes)) == art.bytes, f);
                            }
                            break;
                    }
                } catch (const std::exception& e) {
                    t.expect(false, f + ": " + e.what());
                }
            }
            const std::string doc = export_preview(a.preview);
            t.expect(export_preview(parse_preview(doc)) == doc, where + ": preview round trip");
            t.expect(parse_guide_manifest(export_guide_manifest(a.guide, d, params)).guide == a.guide,
                     where + ": guide round trip");
            const auto entries = read_zip(zip);
            t.expect(write_zip(entries) == zip, where + ": zip round trip");
        }
    }
    return finish(t, fmt::format("{} workflow runs", runs));
}

Outcome slice_convergence() {
    Tally t;
    const TriangleMesh sphere = fixtures::icosphere(20, 3);
    const double v = oracle_volume(sphere);
    const double e5 = std::abs(stack_volume(slice_uniform(sphere, 5.0)) - v);
    const double e25 = std::abs(stack_volume(slice_uniform(sphere, 2.5)) - v);
    t.expect(e25 < e5, fmt::format("icosphere error {:.3g} at 2.5 mm not below {:.3g} at 5 mm", e25, e5));
    const TriangleMesh cube = fixtures::cube(40);
    const double vc = oracle_volume(cube);
    for (double h : {5.0, 2.5}) {
        const double e = std::abs(stack_volume(slice_uniform(cube, h)) - vc);
        t.expect(e < 1e-6, fmt::format("cube error {:.3g} at {} mm", e, h));
    }
    return finish(t, fmt::format("icosphere error {:.1f} -> {:.1f} mm^3", e5, e25));
}

Outcome steinmetz() {
    Tally t;
    const double r = 20;
    const auto plan = plan_hotwire(fixtures::icosphere(r, 3), resolve_params(hotwire_schema(), {}));
    const double margin = std::get<double>(resolve_params(hotwire_schema(), {}).at("block_margin"));
    const auto counts = oracles::steinmetz_voxels(r, margin, kVoxelResolution);
    const double quarter_pi = std::numbers::pi / 4;
    t.expect(std::abs(counts.ratio() - quarter_pi) <= 0.02, fmt::format("voxel oracle {:.4f}", counts.ratio()));
    t.expect(std::abs(plan.fidelity - quarter_pi) <= 0.02, fmt::format("fidelity {:.4f}", plan.fidelity));
    t.expect(std::abs(plan.fidelity - counts.ratio()) <= 0.02, "fidelity disagrees with the voxel oracle");
    const double closed_form = 16 * r * r * r / 3;
    t.expect(std::abs(plan.approx_volume - closed_form) / closed_form < 0.03,
             fmt::format("approximation volume {:.0f} vs {:.0f}", plan.approx_volume, closed_form));
    return finish(t, fmt::format("fidelity {:.4f}, oracle {:.4f}", plan.fidelity, counts.ratio()));
}

Outcome wire_round_trip() {
    Tally t;
    double worst = 0.0;
    std::size_t files = 0;
    const auto params = resolve_params(wire_mesh_schema(), {});
    for (const auto& mesh : fixture_set()) {
        const auto plan = plan_wire_mesh(mesh, params);
        const auto out = default_registry().generate("wire-mesh", mesh, params);
        for (const auto& art : out.artifacts) {
            if (art.format != ArtifactFormat::Csv || !art.filename.starts_with("wire_")) continue;
            ++files;
            const auto parsed = parse_wire_csv(art.bytes);
            if (parsed.size() != 1) {
                t.expect(false, art.filename + ": expected one wire");
                continue;
            }
            const auto it = std::find_if(plan.wires.begin(), plan.wires.end(),
                                         [&](const WirePath& w) { return w.wire_id == parsed[0].wire_id; });
            if (it == plan.wires.end()) {
                t.expect(false, art.filename + ": unknown wire id");
                continue;
            }
            const Contour rebuilt = bends_to_polyline(parsed[0].table, {0, 0}, 0.0);
            std::vector<Vec2> expected = it->contour.points;
            if (it->contour.closed) expected.push_back(expected.front());
            if (rebuilt.points.size() != expected.size()) {
                t.expect(false, fmt::format("{}: {} points, expected {}", art.filename, rebuilt.points.size(),
                                            expected.size()));
                continue;
            }
            const double err = oracles::rigid_fit_error(expected, rebuilt.points);
            worst = std::max(worst, err);
            t.expect(err <= 1e-4, fmt::format("{} on {}: {:.3g} mm", art.filename, mesh.name, err));
        }
    }
    t.expect(files > 0, "no wire files emitted");
    return finish(t, fmt::format("{} wire files, worst {:.2g} mm", files, worst));
}

Outcome slot_conservation() {
    Tally t;
    std::mt19937 rng(5150);
    std::size_t slots = 0;
    double worst = 0.0;
    const auto params = resolve_params(interlocking_schema(), {});
    for (int trial = 0; trial < 20; ++trial) {
        const TriangleMesh mesh = fixtures::random_convex(rng);
        const auto plan = plan_interlocking(mesh, params);
        for (const auto& s : plan.slots) {
            ++slots;
            const double sum = s.depth_a + s.depth_b;
            // The overlap span of two sections of a convex solid is the solid's own vertical extent there.
            const auto part = std::find_if(plan.parts.begin(), plan.parts.end(),
                                           [&](const InterlockPart& p) { return p.id == s.piece_a; });
            if (part == plan.parts.end()) {
                t.expect(false, "slot references unknown part " + s.piece_a);
                continue;
            }
            const Vec3 p = part->frame.to_world(s.location_a);
            const auto ext = oracles::vertical_extent(mesh, p.x, p.y);
            if (!ext) {
                t.expect(false, "slot outside the mesh footprint");
                continue;
            }
            const double err = std::max(std::abs(sum - s.span()), std::abs(sum - (ext->second - ext->first)));
            worst = std::max(worst, err);
            t.expect(err < 1e-3, fmt::format("trial {} slot {}/{}: off by {:.3g}", trial, s.piece_a, s.piece_b, err));
        }
    }
    t.expect(slots > 0, "no slots generated");
    return finish(t, fmt::format("{} slots, worst {:.2g} mm", slots, worst));
}

Outcome mold_conservation() {
    Tally t;
    std::size_t layers = 0;
    double worst = 0.0;
    const auto params = resolve_params(stacked_mold_schema(), {});
    for (const auto& mesh : fixture_set()) {
        const auto plan = plan_stacked_mold(mesh, params);
        for (const auto& l : plan.layers) {
            ++layers;
            const Aabb2 b = plan.block;
            const double block = (b.max.x - b.min.x) * (b.max.y - b.min.y);
            const double rel = std::abs(block - l.mold.area() - l.cross_section.area()) / block;
            worst = std::max(worst, rel);
            t.expect(std::abs(l.block.area() - block) / block < 1e-12, "layer block differs from the plan block");
            t.expect(rel < 1e-6, fmt::format("{} layer {}: relative error {:.3g}", mesh.name, l.index, rel));
        }
    }
    return finish(t, fmt::format("{} layers, worst {:.2g}", layers, worst));
}

std::set<std::string> ids(const std::vector<WorkflowDescriptor>& ds) {
    std::set<std::string> out;
    for (const auto& d : ds) out.insert(d.id);
    return out;
}

Outcome pipeline_facts(const std::string& cli) {
    Tally t;
    // STL in, both encodings.
    for (const auto& mesh : fixture_set()) {
        for (bool ascii : {false, true}) {
            const TriangleMesh back = parse_stl(write_stl(mesh, ascii));
            t.expect(back.triangles.size() == mesh.triangles.size() &&
                         std::abs(oracle_volume(back) - oracle_volume(mesh)) < 1e-3 * std::abs(oracle_volume(mesh)),
                     mesh.name + ": STL read back differs");
        }
    }
    // SVG, CSV and STL out.
    std::set<ArtifactFormat> formats;
    const TriangleMesh cube = fixtures::cube(40);
    for (const auto& d : default_registry().list()) {
        for (const auto& a : default_registry().generate(d.id, cube, {}).artifacts) formats.insert(a.format);
    }
    t.expect(formats == std::set<ArtifactFormat>{ArtifactFormat::Svg, ArtifactFormat::Csv, ArtifactFormat::Stl},
             "workflows do not emit SVG, CSV and STL");

    // 3 mm layers through the command line.
    const fs::path dir = fs::temp_directory_path() / fmt::format("camforge_acceptance_{}", ::getpid());
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream(dir / "cube.stl", std::ios::binary) << write_stl(cube, false);
    }
    const std::string cmd = fmt::format("\"{}\" compile \"{}\" stacked-slices --param layer_height=3 -o \"{}\" > \"{}\" 2>&1",
                                        cli, (dir / "cube.stl").string(), (dir / "out").string(),
                                        (dir / "log.txt").string());
    const int rc = std::system(cmd.c_str());
    t.expect(rc == 0, fmt::format("CLI compile exited with {}", rc));
    bool svg = false;
    if (fs::exists(dir / "out")) {
        for (const auto& e : fs::directory_iterator(dir / "out")) svg = svg || e.path().extension() == ".svg";
    }
    t.expect(svg, "no SVG written by compile");
    t.expect(fs::exists(dir / "out" / "GUIDE.txt"), "no GUIDE.txt written by compile");
    std::ifstream params(dir / "out" / "params.txt");
    std::stringstream ptxt;
    ptxt << params.rdbuf();
    t.expect(ptxt.str().find("layer_height=3\n") != std::string::npos, "params.txt lacks layer_height=3");
    fs::remove_all(dir);

    // Filters against the descriptor table written out by hand.
    const auto& reg = default_registry();
    auto check = [&](const WorkflowFilter& f, std::set<std::string> expected, const std::string& what) {
        t.expect(ids(reg.filter(f)) == expected, "filter " + what);
    };
    const std::vector<std::string> order{"stacked-slices", "interlocking", "stacked-mold", "wire-mesh", "hotwire-foam"};
    const std::map<std::string, std::vector<int>> ratings{{"load_bearing", {2, 2, 3, 1, 0}},
                                                          {"high_temperature_tolerance", {1, 1, 2, 3, 0}},
                                                          {"lightweight", {1, 3, 1, 3, 3}},
                                                          {"detail_fidelity", {2, 1, 2, 1, 1}}};
    const std::map<std::string, std::vector<bool>> flags{{"removable_support", {0, 0, 1, 0, 0}},
                                                         {"integrated_support", {1, 1, 0, 1, 0}},
                                                         {"flexible", {0, 0, 0, 1, 0}},
                                                         {"modular", {0, 1, 1, 0, 0}},
                                                         {"reusable", {0, 1, 1, 0, 0}}};
    for (const auto& [dim, values] : ratings) {
        for (int min = 0; min <= 3; ++min) {
            WorkflowFilter f;
            f.min_ratings[dim] = min;
            std::set<std::string> expected;
            for (std::size_t i = 0; i < order.size(); ++i) {
                if (values[i] >= min) expected.insert(order[i]);
            }
            check(f, expected, fmt::format("{} >= {}", dim, min));
        }
    }
    for (const auto& [flag, values] : flags) {
        for (bool want : {true, false}) {
            WorkflowFilter f;
            f.structure[flag] = want;
            std::set<std::string> expected;
            for (std::size_t i = 0; i < order.size(); ++i) {
                if (values[i] == want) expected.insert(order[i]);
            }
            check(f, expected, fmt::format("{} = {}", flag, want));
        }
    }
    WorkflowFilter laser;
    laser.machines = std::vector<std::string>{"laser_cutter"};
    check(laser, {"stacked-slices", "interlocking", "stacked-mold"}, "machines laser_cutter");
    WorkflowFilter wires;
    wires.machines = std::vector<std::string>{"wire_bender", "hot_wire_cutter"};
    check(wires, {"wire-mesh", "hotwire-foam"}, "machines wire_bender,hot_wire_cutter");
    for (const auto& [kw, expected] : std::vector<std::pair<std::string, std::set<std::string>>>{
             {"wire", {"wire-mesh", "hotwire-foam"}},
             {"MOLD", {"stacked-mold"}},
             {"stacked", {"stacked-slices", "stacked-mold"}},
             {"interlocking structure", {"interlocking"}},
             {"foam", {"hotwire-foam"}},
             {"origami", {}}}) {
        WorkflowFilter f;
        f.keywords = kw;
        check(f, expected, "keyword " + kw);
    }
    return finish(t, "STL in, SVG/CSV/STL out, CLI compile at 3 mm, all filter families");
}

Outcome polygon_suites() {
    Tally t;
    std::mt19937 rng(1000);
    std::uniform_real_distribution<double> shift(-40.0, 40.0);
    std::uniform_real_distribution<double> probe(-100.0, 100.0);
    std::bernoulli_distribution convex(0.5);
    const auto area_ok = [](double lhs, double rhs, double scale) { return std::abs(lhs - rhs) <= 1e-6 * scale; };

    // Boolean area identities, plus sampled membership.
    for (int i = 0; i < 1000; ++i) {
        const Contour ca = convex(rng) ? oracles::random_convex_polygon(rng, {0, 0}, 40)
                                       : oracles::random_star_polygon(rng, {0, 0}, 40, 12);
        const Contour cb = convex(rng) ? oracles::random_convex_polygon(rng, {shift(rng), shift(rng)}, 35)
                                       : oracles::random_star_polygon(rng, {shift(rng), shift(rng)}, 35, 10);
        const PolygonSet a = normalize_polygonset({ca});
        const PolygonSet b = normalize_polygonset({cb});
        const PolygonSet u = boolean_op(a, b, BooleanOp::Union);
        const PolygonSet n = boolean_op(a, b, BooleanOp::Intersection);
        const PolygonSet amb = boolean_op(a, b, BooleanOp::Difference);
        const PolygonSet bma = boolean_op(b, a, BooleanOp::Difference);
        const double scale = a.area() + b.area();
        const std::string c = fmt::format("boolean case {}", i);
        t.expect(area_ok(u.area() + n.area(), a.area() + b.area(), scale), c + ": |A∪B|+|A∩B| != |A|+|B|");
        t.expect(area_ok(amb.area() + n.area(), a.area(), scale), c + ": |A\\B|+|A∩B| != |A|");
        t.expect(area_ok(bma.area() + n.area(), b.area(), scale), c + ": |B\\A|+|A∩B| != |B|");
        t.expect(area_ok(amb.area() + bma.area() + n.area(), u.area(), scale), c + ": pieces do not tile the union");
        for (int k = 0; k < 20; ++k) {
            const Vec2 p{probe(rng), probe(rng)};
            if (distance_to_boundary(a, p) < 1e-6 || distance_to_boundary(b, p) < 1e-6) continue;
            const bool in_a = a.contains(p), in_b = b.contains(p);
            t.expect(u.contains(p) == (in_a || in_b) && n.contains(p) == (in_a && in_b) &&
                         amb.contains(p) == (in_a && !in_b),
                     c + ": membership");
        }
    }

    // Normalization is idempotent, whatever the input orientation.
    for (int i = 0; i < 1000; ++i) {
        std::vector<Contour> in{oracles::random_star_polygon(rng, {0, 0}, 60, 14),
                                reversed(make_rectangle({-5, -5}, {5, 5})),
                                oracles::random_convex_polygon(rng, {300, 0}, 30)};
        if (convex(rng)) in[0] = reversed(in[0]);
        const PolygonSet once = normalize_polygonset(in);
        const PolygonSet twice = normalize_polygonset(once.contours);
        bool same = once.contours.size() == twice.contours.size();
        for (std::size_t k = 0; same && k < once.contours.size(); ++k) {
            same = once.contours[k].points == twice.contours[k].points;
        }
        t.expect(same, fmt::format("normalize case {} not idempotent", i));
    }

    // Offset round trip on convex polygons whose corners stay within the miter limit.
    std::uniform_real_distribution<double> delta(0.2, 5.0);
    int tested = 0;
    double worst = 0.0;
    while (tested < 1000) {
        const Contour c = oracles::random_convex_polygon(rng, {shift(rng), shift(rng)}, 30);
        if (oracles::min_interior_angle_deg(c) < 30.0) continue;
        ++tested;
        const double d = delta(rng);
        const PolygonSet p{{c}};
        const PolygonSet back = offset_polygonset(offset_polygonset(p, d).polygons, -d).polygons;
        if (back.contours.size() != 1) {
            t.expect(false, fmt::format("offset case {} lost its shape", tested));
            continue;
        }
        const double h = oracles::hausdorff(back.contours[0], c);
        worst = std::max(worst, h);
        t.expect(h <= 1e-6, fmt::format("offset case {}: Hausdorff {:.3g}", tested, h));
    }
    return finish(t, fmt::format("1000 boolean, 1000 normalize, 1000 offset cases, worst offset {:.2g} mm", worst));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : CAMFORGE_CLI;
    struct Criterion {
        std::string name;
        double limit_s;  // 0: no runtime bound
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"five workflows on all fixtures: closure, determinism, round trips", 5.0, all_workflows},
        {"slice volume convergence", 1.0, slice_convergence},
        {"Steinmetz fidelity", 10.0, steinmetz},
        {"wire CSV round trip", 0.0, wire_round_trip},
        {"interlocking slot conservation", 0.0, slot_conservation},
        {"mold area conservation", 0.0, mold_conservation},
        {"pipeline facts", 0.0, [&] { return pipeline_facts(cli); }},
        {"boolean and offset property suites", 0.0, polygon_suites},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_s > 0 && secs > c.limit_s) {
            o.pass = false;
            o.detail += fmt::format("; took {:.2f} s, limit {:.0f} s", secs, c.limit_s);
        }
        failed += !o.pass;
        std::cout << fmt::format("{} {} ({}; {:.2f} s)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail, secs);
    }
    return failed == 0 ? 0 : 1;
}
