#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/tessellate.hpp"
#include "common.hpp"

namespace camforge {

using namespace detail;

std::vector<ParamSpec> interlocking_schema() {
    std::vector<ParamSpec> s{
        length_param("material_thickness", 3, 0, 50, true, "Sheet thickness"),
        length_param("spacing_x", 20, 0, 1000, true, "Distance between X planes"),
        length_param("spacing_y", 20, 0, 1000, true, "Distance between Y planes"),
        length_param("slot_clearance", 0.2, 0, 5, false, "Extra slot width for an easy fit"),
        length_param("kerf", 0.1, 0, 2, false, "Width of material removed by the laser"),
    };
    for (auto& p : sheet_params()) s.push_back(std::move(p));
    return s;
}

std::vector<std::pair<double, double>> covered_intervals(const std::function<bool(double)>& coverage, double z_min,
                                                         double z_max, double step, double tolerance) {
    // Boundary between a and b where coverage flips, narrowed to `tolerance`.
    auto refine = [&](double a, double b) {
        const bool at_a = coverage(a);
        while (b - a > tolerance) {
            const double m = 0.5 * (a + b);
            (coverage(m) == at_a ? a : b) = m;
        }
        return 0.5 * (a + b);
    };
    std::vector<std::pair<double, double>> out;
    const double lo = z_min - step / 2;
    const auto n = static_cast<std::size_t>(std::ceil((z_max - z_min + step) / step));
    bool inside = false;
    double start = 0.0;
    double prev = lo;
    for (std::size_t i = 0; i <= n; ++i) {
        const double z = lo + step * static_cast<double>(i);
        const bool now = coverage(z);
        if (now && !inside) start = i == 0 ? z : refine(prev, z);
        if (!now && inside) out.emplace_back(start, refine(prev, z));
        inside = now;
        prev = z;
    }
    if (inside) out.emplace_back(start, prev);
    return out;
}

namespace {

struct PlaneCut {
    char family;
    double coord;  // x for X planes, y for Y planes
    PlaneFrame frame;
    PolygonSet section;
};

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

}  // namespace

InterlockingPlan plan_interlocking(const TriangleMesh& mesh, const WorkflowParams& params) {
    const double t = param_number(params, "material_thickness");
    const double sx = param_number(params, "spacing_x");
    const double sy = param_number(params, "spacing_y");
    const double width = t + param_number(params, "slot_clearance");
    if (!(sx > t)) reject_param("spacing_x", fmt::format("= {} must exceed material_thickness ({} mm)", sx, t));
    if (!(sy > t)) reject_param("spacing_y", fmt::format("= {} must exceed material_thickness ({} mm)", sy, t));

    InterlockingPlan plan;
    const Aabb3 box = mesh.bounds();
    std::vector<PlaneCut> cuts;
    auto add_family = [&](char family, double lo, double hi, double spacing) {
        const Vec3 normal = family == 'X' ? Vec3{1, 0, 0} : Vec3{0, -1, 0};
        const std::size_t n = hi > lo ? layer_count(hi - lo, spacing) : 0;
        for (std::size_t i = 0; i < n; ++i) {
            // Unlike slice layers, a plane past the far side of the model has nothing to cut.
            const double c = lo + spacing * (static_cast<double>(i) + 0.5);
            if (c >= hi) break;
            const Plane plane{normal, family == 'X' ? c : -c};
            PlaneSection s = section_plane(mesh, plane);
            if (s.open_chains > 0 || s.crossing_contours) {
                plan.warnings.push_back({"OpenChains", Severity::Caution,
                                         fmt::format("{} plane at {:.3f} mm has an unclosed or self-crossing outline",
                                                     family, c)});
            }
            if (s.polygons.empty()) continue;
            PlaneFrame frame = plane_frame(plane);
            frame.offset = s.applied_offset;
            cuts.push_back({family, family == 'X' ? s.applied_offset : -s.applied_offset, frame, std::move(s.polygons)});
        }
    };
    add_family('X', box.min.x, box.max.x, sx);
    add_family('Y', box.min.y, box.max.y, sy);

    int nx = 0, ny = 0;
    for (const auto& c : cuts) {
        InterlockPart part;
        part.family = c.family;
        part.id = fmt::format("{}{}", c.family, c.family == 'X' ? ++nx : ++ny);
        part.frame = c.frame;
        part.section = c.section;
        part.slotted = c.section;
        plan.parts.push_back(std::move(part));
    }

    std::vector<int> parent(plan.parts.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::size_t multi_span = 0;
    for (std::size_t a = 0; a < plan.parts.size(); ++a) {
        if (cuts[a].family != 'X') continue;
        for (std::size_t b = 0; b < plan.parts.size(); ++b) {
            if (cuts[b].family != 'Y') continue;
            const double x = cuts[a].coord;
            const double y = cuts[b].coord;
            const PolygonSet& sa = plan.parts[a].section;
            const PolygonSet& sb = plan.parts[b].section;
            const auto ba = sa.bounds(), bb = sb.bounds();
            if (y < ba->min.x || y > ba->max.x || x < bb->min.x || x > bb->max.x) continue;
            const auto spans = covered_intervals(
                [&](double z) { return sa.contains({y, z}) && sb.contains({x, z}); }, std::max(ba->min.y, bb->min.y),
                std::min(ba->max.y, bb->max.y));
            if (spans.empty()) continue;
            const auto longest = *std::max_element(spans.begin(), spans.end(), [](const auto& p, const auto& q) {
                return p.second - p.first < q.second - q.first;
            });
            SlotSpec slot;
            slot.piece_a = plan.parts[a].id;
            slot.piece_b = plan.parts[b].id;
            slot.z_low = longest.first;
            slot.z_high = longest.second;
            slot.span_count = spans.size();
            slot.width = width;
            slot.depth_a = slot.depth_b = slot.span() / 2;
            const double mid = slot.z_low + slot.depth_a;
            slot.location_a = {y, mid};
            slot.location_b = {x, mid};
            if (spans.size() > 1) ++multi_span;
            // Slots run past the part edge so the cut opens cleanly.
            const PolygonSet cut_a{{make_rectangle({y - width / 2, mid}, {y + width / 2, slot.z_high + 1.0})}};
            const PolygonSet cut_b{{make_rectangle({x - width / 2, slot.z_low - 1.0}, {x + width / 2, mid})}};
            plan.parts[a].slotted = boolean_op(plan.parts[a].slotted, cut_a, BooleanOp::Difference);
            plan.parts[b].slotted = boolean_op(plan.parts[b].slotted, cut_b, BooleanOp::Difference);
            parent[find_root(parent, static_cast<int>(a))] = find_root(parent, static_cast<int>(b));
            plan.slots.push_back(std::move(slot));
        }
    }
    if (multi_span > 0) {
        plan.warnings.push_back({"MultiSpan", Severity::Caution,
                                 fmt::format("{} crossing(s) meet the model in several separate spans; only the longest "
                                             "span is slotted",
                                             multi_span)});
    }
    std::size_t components = 0;
    for (std::size_t i = 0; i < parent.size(); ++i) components += find_root(parent, static_cast<int>(i)) == static_cast<int>(i);
    if (components > 1) {
        plan.warnings.push_back({"DisconnectedAssembly", Severity::Caution,
                                 fmt::format("the parts form {} separate groups that no slot connects ({} slot pair(s) in "
                                             "total); reduce the plane spacing",
                                             components, plan.slots.size())});
    }
    if (plan.parts.empty()) {
        plan.warnings.push_back({"MinFeature", Severity::Blocker,
                                 "features in this model are too small for the chosen plane spacing: no plane meets it"});
    }
    return plan;
}

WorkflowOutput gen_interlocking(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links) {
    InterlockingPlan plan = plan_interlocking(mesh, params);
    const double t = param_number(params, "material_thickness");
    const double kerf = param_number(params, "kerf");
    WorkflowOutput out;

    std::vector<PackPart> parts;
    double area = 0.0, cut = 0.0, vol_x = 0.0, vol_y = 0.0;
    std::size_t count_x = 0, count_y = 0;
    for (const auto& p : plan.parts) {
        const PolygonSet outline = offset_polygonset(p.slotted, kerf / 2).polygons;
        parts.push_back({p.id, outline, p.id});
        area += p.slotted.area();
        cut += cut_length(outline);
        (p.family == 'X' ? vol_x : vol_y) += p.section.area();
        ++(p.family == 'X' ? count_x : count_y);
        out.preview.push_back({p.id, "part", extrude(p.slotted, p.frame, -t / 2, t / 2, p.id)});
    }
    vol_x *= param_number(params, "spacing_x");
    vol_y *= param_number(params, "spacing_y");
    out.artifacts = sheet_artifacts(parts, param_number(params, "sheet_w"), param_number(params, "sheet_h"),
                                    "interlocking", plan.warnings);

    out.guide.steps.push_back({1, "Cut the parts",
                               fmt::format("Laser-cut {} X part(s) and {} Y part(s) from {} mm sheet material. Slots are "
                                           "{:.2f} mm wide.",
                                           count_x, count_y, t, t + param_number(params, "slot_clearance")),
                               filenames(out.artifacts), links, {"laser cutter", "sheet material"}});
    out.guide.steps.push_back({2, "Slot the grid together",
                               fmt::format("Stand the X parts upright with their slots facing up, spaced {} mm apart in "
                                           "label order. Then lower each Y part, slots facing down, onto the X parts.",
                                           param_number(params, "spacing_x")),
                               {}, {}, {}});
    out.guide.steps.push_back({3, "Glue (optional)",
                               "The joints hold by friction. Add a drop of glue at each crossing for a permanent piece.",
                               {}, {}, {"wood glue"}});

    out.warnings = std::move(plan.warnings);
    out.metrics.part_count = plan.parts.size();
    out.metrics.material_area = area;
    out.metrics.material_volume = area * t;
    out.metrics.total_cut_length = cut;
    double approx = 0.0;
    if (count_x > 0 && count_y > 0) approx = 0.5 * (vol_x + vol_y);
    else approx = vol_x + vol_y;
    out.metrics.estimated_fidelity = volume_agreement(approx, mesh_volume(mesh));
    return out;
}

}  // namespace camforge
