#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "common.hpp"

namespace camforge {

using namespace detail;

std::vector<ParamSpec> stacked_mold_schema() {
    std::vector<ParamSpec> s{
        length_param("layer_height", 3, 0, 100, true, "Sheet thickness; one mold layer per sheet"),
        length_param("block_margin", 10, 0, 500, true, "Wall thickness around the model"),
        length_param("kerf", 0.1, 0, 2, false, "Width of material removed by the laser"),
    };
    for (auto& p : sheet_params()) s.push_back(std::move(p));
    return s;
}

PolygonSet mold_layer(const Aabb2& block, const PolygonSet& cross_section) {
    const PolygonSet block_set{{make_rectangle(block.min, block.max)}};
    if (cross_section.empty()) return block_set;
    for (const auto& c : cross_section.contours) {
        for (Vec2 p : c.points) {
            const double inset = std::min({p.x - block.min.x, block.max.x - p.x, p.y - block.min.y, block.max.y - p.y});
            if (!(inset > 1e-9)) {
                throw Error(ErrorCode::BlockDegenerate,
                            fmt::format("cross-section point ({:.4f}, {:.4f}) reaches the mold block boundary", p.x, p.y));
            }
        }
    }
    return boolean_op(block_set, cross_section, BooleanOp::Difference);
}

bool sampled_containment(const PolygonSet& inner, const PolygonSet& outer, std::size_t samples, double tolerance) {
    const double total = inner.perimeter();
    if (total <= 0.0) return true;
    const double step = total / static_cast<double>(samples);
    std::size_t taken = 0;
    double carried = 0.0;  // arc length into the current edge of the next sample
    for (const auto& c : inner.contours) {
        const std::size_t n = c.points.size();
        for (std::size_t i = 0; i < n && taken < samples; ++i) {
            const Vec2 a = c.points[i];
            const Vec2 b = c.points[(i + 1) % n];
            const double len = distance(a, b);
            while (carried <= len && taken < samples) {
                const Vec2 p = len > 0.0 ? a + (b - a) * (carried / len) : a;
                if (!outer.contains(p) && distance_to_boundary(outer, p) > tolerance) return false;
                ++taken;
                carried += step;
            }
            carried -= len;
        }
    }
    return true;
}

StackedMoldPlan plan_stacked_mold(const TriangleMesh& mesh, const WorkflowParams& params) {
    const double h = param_number(params, "layer_height");
    const double margin = param_number(params, "block_margin");
    check_layer_height(mesh, h);

    StackedMoldPlan plan;
    plan.stack = slice_uniform(mesh, h);
    layer_warnings(plan.stack, plan.warnings, "M");
    const Aabb3 box = plan.stack.source_bbox;
    plan.block = {{box.min.x - margin, box.min.y - margin}, {box.max.x + margin, box.max.y + margin}};
    const PolygonSet block_set{{make_rectangle(plan.block.min, plan.block.max)}};
    for (const auto& layer : plan.stack.layers) {
        plan.layers.push_back({layer.index, layer.z, block_set, layer.cross_section, mold_layer(plan.block, layer.cross_section)});
    }

    std::vector<std::string> overhangs;
    for (std::size_t i = 0; i + 1 < plan.layers.size(); ++i) {
        const PolygonSet& lower = plan.layers[i].cross_section;
        const PolygonSet& upper = plan.layers[i + 1].cross_section;
        if (upper.empty()) continue;
        if (!sampled_containment(upper, lower)) overhangs.push_back(fmt::format("M{}/M{}", i + 1, i + 2));
    }
    for (const auto& pair : overhangs) {
        plan.warnings.push_back({"Undercut", Severity::Caution,
                                 fmt::format("layers {}: the upper outline is not contained in the lower one, so the "
                                             "mold cannot be lifted off along +z; use a flexible mold material such "
                                             "as silicone",
                                             pair)});
    }
    return plan;
}

WorkflowOutput gen_stacked_mold(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links) {
    StackedMoldPlan plan = plan_stacked_mold(mesh, params);
    const double h = plan.stack.layer_height;
    const double kerf = param_number(params, "kerf");
    WorkflowOutput out;

    std::vector<PackPart> parts;
    double area = 0.0, cut = 0.0;
    for (const auto& layer : plan.layers) {
        const std::string id = fmt::format("M{}", layer.index + 1);
        const PolygonSet outline = offset_polygonset(layer.mold, kerf / 2).polygons;
        parts.push_back({id, outline, id});
        area += layer.mold.area();
        cut += cut_length(outline);
        out.preview.push_back({id, "mold", layer_slab(layer.mold, plan.stack.source_bbox.min.z, h, layer.index, id)});
    }
    TriangleMesh model = mesh;
    model.name = "model";
    out.preview.push_back({"model", "model", std::move(model)});
    out.artifacts = sheet_artifacts(parts, param_number(params, "sheet_w"), param_number(params, "sheet_h"), "mold",
                                    plan.warnings);

    const bool undercut = std::any_of(plan.warnings.begin(), plan.warnings.end(), [](const Warning& w) { return w.code == "Undercut"; });
    out.guide.steps.push_back({1, "Cut the mold layers",
                               fmt::format("Laser-cut the {} mold layers from {} mm sheet material.", parts.size(), h),
                               filenames(out.artifacts), links, {"laser cutter", "sheet material"}});
    out.guide.steps.push_back({2, "Stack and glue",
                               fmt::format("Glue the layers on a flat base board in order, M1 at the bottom to M{} at the "
                                           "top, keeping the outer edges flush.",
                                           parts.size()),
                               {}, {}, {"wood glue", "base board", "clamps"}});
    out.guide.steps.push_back({3, "Seal the seams",
                               "Seal the inner seams and coat the cavity with release agent so the casting does not stick.",
                               {}, {}, {"sealant", "release agent"}});
    out.guide.steps.push_back({4, "Pour",
                               undercut ? "Mix and pour a flexible casting material such as silicone; the shape has "
                                          "undercuts a rigid cast could not leave."
                                        : "Mix and pour the casting material through the open top, tapping out air bubbles.",
                               {}, {}, {"casting material", "mixing cup"}});
    out.guide.steps.push_back({5, "Cure", "Let the casting cure fully as directed by the material maker.", {}, {}, {}});
    out.guide.steps.push_back({6, "Demold", "Lift the mold upward off the casting and clean up the layer lines.", {}, {},
                               {"sandpaper"}});

    out.warnings = std::move(plan.warnings);
    out.metrics.part_count = plan.layers.size();
    out.metrics.material_area = area;
    out.metrics.material_volume = area * h;
    out.metrics.total_cut_length = cut;
    out.metrics.estimated_fidelity = volume_agreement(stack_volume(plan.stack), mesh_volume(mesh));
    return out;
}

}  // namespace camforge
