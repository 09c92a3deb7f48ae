#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/tessellate.hpp"
#include "common.hpp"

namespace camforge {

using namespace detail;

std::vector<ParamSpec> wire_mesh_schema() {
    return {
        length_param("ring_spacing", 10, 0, 1000, true, "Vertical distance between horizontal rings"),
        count_param("meridian_count", 4, 0, 64, "Number of vertical wires through the centre axis"),
        length_param("wire_diameter", 1.5, 0, 20, true, "Wire gauge"),
        length_param("simplify_tol", 0.5, 0, 50, false, "Allowed deviation when reducing bends"),
        length_param("min_contour_len", 15, 0, 10000, false, "Shorter wires are dropped"),
    };
}

namespace {

constexpr double kCsvStep = 1e-4;

double to_csv_precision(double v) { return std::stod(format_fixed4(v)); }

// Rounds a bend table to CSV precision. Closed loops then miss their start
// by up to a few 1e-4 mm, so two feeds with nearly perpendicular directions
// absorb the gap in whole CSV steps.
void quantize(BendTable& table, Vec2 start, double heading_deg) {
    for (auto& row : table.rows) {
        row.feed_mm = to_csv_precision(row.feed_mm);
        row.bend_deg = to_csv_precision(row.bend_deg);
    }
    const std::size_t n = table.rows.size();
    if (!table.closed || n < 3) return;

    std::vector<Vec2> dirs(n);
    double heading = heading_deg * std::numbers::pi / 180.0;
    Vec2 end = start;
    for (std::size_t i = 0; i < n; ++i) {
        dirs[i] = {std::cos(heading), std::sin(heading)};
        end = end + dirs[i] * table.rows[i].feed_mm;
        heading += table.rows[i].bend_deg * std::numbers::pi / 180.0;
    }
    std::size_t a = 0, b = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = std::abs(cross(dirs[i], dirs[j]));
            if (s > best) {
                best = s;
                a = i;
                b = j;
            }
        }
    }
    if (best < 0.1) return;
    const Vec2 gap = start - end;
    // gap = ka * dirs[a] + kb * dirs[b]
    const double det = cross(dirs[a], dirs[b]);
    const double ka = cross(gap, dirs[b]) / det / kCsvStep;
    const double kb = cross(dirs[a], gap) / det / kCsvStep;
    double residual = norm(gap);
    double da = 0.0, db = 0.0;
    for (double ia : {std::floor(ka), std::ceil(ka)}) {
        for (double ib : {std::floor(kb), std::ceil(kb)}) {
            const double r = norm(gap - dirs[a] * (ia * kCsvStep) - dirs[b] * (ib * kCsvStep));
            if (r < residual) {
                residual = r;
                da = ia;
                db = ib;
            }
        }
    }
    table.rows[a].feed_mm = to_csv_precision(table.rows[a].feed_mm + da * kCsvStep);
    table.rows[b].feed_mm = to_csv_precision(table.rows[b].feed_mm + db * kCsvStep);
}

}  // namespace

WireMeshPlan plan_wire_mesh(const TriangleMesh& mesh, const WorkflowParams& params) {
    const double spacing = param_number(params, "ring_spacing");
    const auto meridians = param_count(params, "meridian_count");
    const double tol = param_number(params, "simplify_tol");
    const double min_len = param_number(params, "min_contour_len");

    WireMeshPlan plan;
    std::size_t dropped = 0, degenerate = 0, open = 0;
    auto add_wires = [&](WireKind kind, const Plane& plane, std::size_t& counter) {
        const PlaneSection s = section_plane(mesh, plane);
        open += s.open_chains;
        PlaneFrame frame = plane_frame(plane);
        frame.offset = s.applied_offset;
        for (const auto& c : s.polygons.contours) {
            Contour simple = simplify_polyline(c, tol);
            if (contour_length(simple) < min_len) {
                ++dropped;
                continue;
            }
            WirePath w;
            try {
                w.bend_table = polyline_to_bends(simple);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::DegeneratePoint) throw;
                ++degenerate;
                continue;
            }
            // The bender only sees the CSV numbers, so the stored shape is the
            // one those rounded feeds and angles produce.
            const Vec2 first = simple.points[1] - simple.points[0];
            const double heading = std::atan2(first.y, first.x) * 180.0 / std::numbers::pi;
            quantize(w.bend_table, simple.points[0], heading);
            simple = bends_to_polyline(w.bend_table, simple.points[0], heading);
            w.wire_id = fmt::format("{}{}", kind == WireKind::Ring ? 'R' : 'M', ++counter);
            w.kind = kind;
            w.plane = {plane.normal, s.applied_offset};
            w.frame = frame;
            w.contour = std::move(simple);
            w.length = w.bend_table.total_length();
            plan.wires.push_back(std::move(w));
        }
    };

    const Aabb3 box = mesh.bounds();
    std::size_t rings = 0, merid = 0;
    const std::size_t n = layer_count(box.extent().z, spacing);
    for (std::size_t i = 0; i < n; ++i) {
        add_wires(WireKind::Ring, Plane{{0, 0, 1}, layer_midplane(box.min.z, box.max.z, spacing, i)}, rings);
    }
    const Vec3 centre = box.center();
    for (std::int64_t k = 0; k < meridians; ++k) {
        const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(meridians);
        const Vec3 normal{std::sin(theta), -std::cos(theta), 0.0};
        add_wires(WireKind::Meridian, Plane{normal, dot(normal, centre)}, merid);
    }

    if (dropped > 0) {
        plan.warnings.push_back({"MinFeature", Severity::Caution,
                                 fmt::format("features in this model are too small: {} contour(s) shorter than {} mm "
                                             "were dropped",
                                             dropped, min_len)});
    }
    if (degenerate > 0) {
        plan.warnings.push_back({"DegeneratePoint", Severity::Caution,
                                 fmt::format("{} contour(s) fold back on themselves and were dropped", degenerate)});
    }
    if (open > 0) {
        plan.warnings.push_back({"OpenChains", Severity::Caution,
                                 fmt::format("{} unclosed section chain(s); the mesh is not watertight", open)});
    }
    if (plan.wires.empty()) {
        plan.warnings.push_back({"NoWires", Severity::Blocker, "no wire is long enough to bend; lower min_contour_len"});
    }
    return plan;
}

WorkflowOutput gen_wire_mesh(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links) {
    WireMeshPlan plan = plan_wire_mesh(mesh, params);
    const double d = param_number(params, "wire_diameter");
    const double spacing = param_number(params, "ring_spacing");
    WorkflowOutput out;

    double total = 0.0;
    std::vector<std::string> csvs;
    std::vector<PackPart> diagram;
    for (const auto& w : plan.wires) {
        const std::string file = fmt::format("wire_{}.csv", w.wire_id);
        out.artifacts.push_back({file, ArtifactFormat::Csv, export_wire_csv(w.wire_id, w.bend_table)});
        csvs.push_back(file);
        total += w.length;
        diagram.push_back({w.wire_id, PolygonSet{{w.contour}}, w.wire_id});

        TriangleMesh rods;
        rods.name = w.wire_id;
        const std::size_t n = w.contour.points.size();
        for (std::size_t i = 0; i < n; ++i) {
            append_mesh(rods, make_rod(w.frame.to_world(w.contour.points[i]), w.frame.to_world(w.contour.points[(i + 1) % n]), d));
        }
        out.preview.push_back({w.wire_id, "wire", std::move(rods)});
    }

    // Everything on one sheet, sized to fit, as an assembly reference.
    double sheet_w = 10.0, sheet_h = 10.0;
    for (const auto& p : diagram) {
        const Aabb2 b = *p.polygons.bounds();
        sheet_w += b.width() + 2.0;
        sheet_h = std::max(sheet_h, b.height() + 2.0);
    }
    auto sheets = pack_sheets(diagram, std::ceil(sheet_w), std::ceil(sheet_h));
    SheetLayout layout = sheets.empty() ? SheetLayout{std::ceil(sheet_w), std::ceil(sheet_h), {}} : sheets.front();
    out.artifacts.push_back({"wire_assembly.svg", ArtifactFormat::Svg, export_svg(layout)});

    const auto rings = std::count_if(plan.wires.begin(), plan.wires.end(), [](const WirePath& w) { return w.kind == WireKind::Ring; });
    const auto merids = static_cast<std::ptrdiff_t>(plan.wires.size()) - rings;
    out.guide.steps.push_back({1, "Bend the wires",
                               fmt::format("Bend {} wire(s) of {} mm gauge. Each CSV row is a straight feed followed by a "
                                           "bend (positive angles turn left).",
                                           plan.wires.size(), d),
                               csvs, links, {"wire bender", "pliers", "wire cutter"}});
    out.guide.steps.push_back({2, "Assemble rings onto meridians",
                               fmt::format("Stand the {} meridian wire(s) around the centre axis, then slide the {} ring(s) "
                                           "on from the bottom up as shown in the assembly diagram.",
                                           merids, rings),
                               {"wire_assembly.svg"}, {}, {}});
    out.guide.steps.push_back({3, "Fasten the crossings",
                               "Tie or solder every crossing where a ring meets a meridian.", {}, {},
                               {"binding wire", "soldering iron"}});

    double ring_volume = 0.0;
    for (const auto& w : plan.wires) {
        if (w.kind == WireKind::Ring) ring_volume += signed_area(w.contour) * spacing;  // holes subtract
    }
    out.warnings = std::move(plan.warnings);
    out.metrics.part_count = plan.wires.size();
    out.metrics.material_volume = total * std::numbers::pi * d * d / 4;
    out.metrics.total_cut_length = total;
    out.metrics.estimated_fidelity = volume_agreement(ring_volume, mesh_volume(mesh));
    return out;
}

}  // namespace camforge
