#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "common.hpp"

namespace camforge {

using namespace detail;

std::vector<ParamSpec> stacked_slices_schema() {
    std::vector<ParamSpec> s{
        length_param("layer_height", 3, 0, 100, true, "Sheet thickness; one layer per sheet"),
        length_param("kerf", 0.1, 0, 2, false, "Width of material removed by the laser"),
        length_param("dowel_diameter", 3, 0, 50, true, "Diameter of the alignment dowels"),
        count_param("dowel_count", 2, 0, 16, "Number of alignment dowels; 0 disables them"),
    };
    for (auto& p : sheet_params()) s.push_back(std::move(p));
    return s;
}

namespace {

constexpr int kDowelGrid = 20;
constexpr double kDowelMargin = 1.0;

// Farthest-apart subset of the candidates, seeded by the farthest pair.
std::vector<Vec2> spread_points(const std::vector<Vec2>& cand, std::size_t count) {
    if (cand.empty() || count == 0) return {};
    if (count == 1) return {cand.front()};
    std::size_t a = 0, b = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        for (std::size_t j = i + 1; j < cand.size(); ++j) {
            const double d = distance(cand[i], cand[j]);
            if (d > best) {
                best = d;
                a = i;
                b = j;
            }
        }
    }
    if (best < 0.0) return {cand.front()};
    std::vector<Vec2> chosen{cand[a], cand[b]};
    while (chosen.size() < count) {
        std::size_t pick = cand.size();
        double far = -1.0;
        for (std::size_t i = 0; i < cand.size(); ++i) {
            double nearest = std::numeric_limits<double>::infinity();
            for (Vec2 c : chosen) nearest = std::min(nearest, distance(c, cand[i]));
            if (nearest > far) {
                far = nearest;
                pick = i;
            }
        }
        if (far <= 0.0) break;
        chosen.push_back(cand[pick]);
    }
    return chosen;
}

}  // namespace

StackedSlicesPlan plan_stacked_slices(const TriangleMesh& mesh, const WorkflowParams& params) {
    const double h = param_number(params, "layer_height");
    const double kerf = param_number(params, "kerf");
    const double dowel_d = param_number(params, "dowel_diameter");
    const auto dowel_count = static_cast<std::size_t>(param_count(params, "dowel_count"));
    check_layer_height(mesh, h);

    StackedSlicesPlan plan;
    plan.stack = slice_uniform(mesh, h);
    layer_warnings(plan.stack, plan.warnings, "L");

    bool any = false;
    for (const auto& layer : plan.stack.layers) {
        if (layer.cross_section.empty()) continue;
        plan.common_region = any ? boolean_op(plan.common_region, layer.cross_section, BooleanOp::Intersection)
                                 : layer.cross_section;
        any = true;
    }

    if (dowel_count > 0) {
        std::vector<Vec2> candidates;
        if (const auto box = plan.common_region.bounds()) {
            for (int j = 0; j < kDowelGrid; ++j) {
                for (int i = 0; i < kDowelGrid; ++i) {
                    const Vec2 p{box->min.x + box->width() * (i + 0.5) / kDowelGrid,
                                 box->min.y + box->height() * (j + 0.5) / kDowelGrid};
                    if (plan.common_region.contains(p) &&
                        distance_to_boundary(plan.common_region, p) >= dowel_d / 2 + kDowelMargin) {
                        candidates.push_back(p);
                    }
                }
            }
        }
        std::vector<Vec2> chosen = spread_points(candidates, dowel_count);
        bool separated = chosen.size() == dowel_count;
        for (std::size_t i = 0; separated && i < chosen.size(); ++i) {
            for (std::size_t j = i + 1; j < chosen.size(); ++j) {
                if (distance(chosen[i], chosen[j]) < dowel_d + 2 * kDowelMargin) separated = false;
            }
        }
        if (separated) {
            plan.dowels = std::move(chosen);
        } else {
            plan.warnings.push_back(
                {"AlignmentFallback", Severity::Caution,
                 fmt::format("the region shared by all layers cannot hold {} dowel(s) of {} mm; align the layers by their "
                             "labels and outlines instead",
                             dowel_count, dowel_d)});
        }
    }

    PolygonSet holes;
    for (Vec2 c : plan.dowels) holes.contours.push_back(make_circle(c, dowel_d / 2, 32));
    for (const auto& layer : plan.stack.layers) {
        if (layer.cross_section.empty()) {
            plan.cut_outlines.emplace_back();
            continue;
        }
        const PolygonSet drilled =
            holes.empty() ? layer.cross_section : boolean_op(layer.cross_section, holes, BooleanOp::Difference);
        plan.cut_outlines.push_back(offset_polygonset(drilled, kerf / 2).polygons);
    }
    return plan;
}

WorkflowOutput gen_stacked_slices(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links) {
    StackedSlicesPlan plan = plan_stacked_slices(mesh, params);
    const double h = plan.stack.layer_height;
    WorkflowOutput out;

    std::vector<PackPart> parts;
    double area = 0.0, cut = 0.0;
    for (std::size_t i = 0; i < plan.stack.layers.size(); ++i) {
        const auto& layer = plan.stack.layers[i];
        if (layer.cross_section.empty()) continue;
        const std::string id = fmt::format("L{}", i + 1);
        parts.push_back({id, plan.cut_outlines[i], id});
        area += plan.cut_outlines[i].area();
        cut += cut_length(plan.cut_outlines[i]);
        out.preview.push_back({id, "part", layer_slab(layer.cross_section, plan.stack.source_bbox.min.z, h, i, id)});
    }
    out.artifacts = sheet_artifacts(parts, param_number(params, "sheet_w"), param_number(params, "sheet_h"), "stacked",
                                    plan.warnings);

    const std::string first = parts.empty() ? "L1" : parts.front().id;
    const std::string last = parts.empty() ? "L1" : parts.back().id;
    out.guide.steps.push_back({1, "Cut the layers",
                               fmt::format("Laser-cut the {} layer(s) from {} mm sheet material. Red lines are cuts; "
                                           "blue labels are engraved so every layer can be identified.",
                                           parts.size(), h),
                               filenames(out.artifacts), links, {"laser cutter", "sheet material"}});
    const std::string align =
        plan.dowels.empty()
            ? std::string("Align each layer with the one below using the outlines and labels.")
            : fmt::format("Push {} dowel(s) of {} mm diameter through the alignment holes to keep the layers registered.",
                          plan.dowels.size(), param_number(params, "dowel_diameter"));
    out.guide.steps.push_back({2, "Stack the layers",
                               fmt::format("Stack the layers in order from {} at the bottom to {} at the top. {}", first,
                                           last, align),
                               {}, {}, plan.dowels.empty() ? std::vector<std::string>{} : std::vector<std::string>{"dowels"}});
    out.guide.steps.push_back({3, "Glue and finish",
                               "Glue each layer to the next, clamp until dry, then sand the stepped surface smooth.",
                               {}, {}, {"wood glue", "clamps", "sandpaper"}});

    out.warnings = std::move(plan.warnings);
    out.metrics.part_count = parts.size();
    out.metrics.material_area = area;
    out.metrics.material_volume = stack_volume(plan.stack);
    out.metrics.total_cut_length = cut;
    out.metrics.estimated_fidelity = volume_agreement(*out.metrics.material_volume, mesh_volume(mesh));
    return out;
}

}  // namespace camforge
