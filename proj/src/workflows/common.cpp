#include "common.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/tessellate.hpp"

namespace camforge::detail {

ParamSpec length_param(std::string name, double def, double min, double max, bool min_exclusive, std::string description) {
    ParamSpec s;
    s.name = std::move(name);
    s.type = ParamType::Length;
    s.default_value = def;
    s.min = min;
    s.max = max;
    s.min_exclusive = min_exclusive;
    s.description = std::move(description);
    return s;
}

ParamSpec count_param(std::string name, std::int64_t def, std::int64_t min, std::int64_t max, std::string description) {
    ParamSpec s;
    s.name = std::move(name);
    s.type = ParamType::Count;
    s.default_value = def;
    s.min = static_cast<double>(min);
    s.max = static_cast<double>(max);
    s.description = std::move(description);
    return s;
}

std::vector<ParamSpec> sheet_params() {
    return {length_param("sheet_w", 600, 0, 5000, true, "Sheet width for cut layouts"),
            length_param("sheet_h", 400, 0, 5000, true, "Sheet height for cut layouts")};
}

void check_layer_height(const TriangleMesh& mesh, double layer_height, const std::string& name) {
    const double extent = mesh.bounds().extent().z;
    if (!(layer_height < extent)) {
        reject_param(name, fmt::format("= {} must be smaller than the model height {:.3f} mm (legal range (0, {:.3f}) mm)",
                                       layer_height, extent, extent));
    }
}

void layer_warnings(const SliceStack& stack, std::vector<Warning>& warnings, const std::string& part_prefix) {
    std::vector<std::string> empty;
    for (const auto& layer : stack.layers) {
        if (layer.cross_section.empty()) empty.push_back(fmt::format("{}{}", part_prefix, layer.index + 1));
        if (layer.open_chains > 0) {
            warnings.push_back({"OpenChains", Severity::Caution,
                                fmt::format("layer {}{} at z={:.3f} has {} unclosed outline(s); the mesh is not watertight",
                                            part_prefix, layer.index + 1, layer.z, layer.open_chains)});
        }
        if (layer.crossing_contours) {
            warnings.push_back({"CrossingContours", Severity::Caution,
                                fmt::format("layer {}{} at z={:.3f} has self-intersecting outlines", part_prefix,
                                            layer.index + 1, layer.z)});
        }
    }
    if (!empty.empty()) {
        warnings.push_back({"MinFeature", Severity::Caution,
                            fmt::format("features in this model are too small for a {} mm layer height: layer(s) {} are empty",
                                        stack.layer_height, fmt::join(empty, ", "))});
    }
}

std::vector<MachineArtifact> sheet_artifacts(const std::vector<PackPart>& parts, double sheet_w, double sheet_h,
                                             const std::string& prefix, std::vector<Warning>& warnings) {
    constexpr double kGap = 2.0;
    std::vector<SheetLayout> sheets;
    try {
        sheets = pack_sheets(parts, sheet_w, sheet_h, kGap);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::PartTooLarge) throw;
        double w = sheet_w, h = sheet_h;
        for (const auto& p : parts) {
            if (const auto b = p.polygons.bounds()) {
                w = std::max(w, std::ceil(b->width() + kGap));
                h = std::max(h, std::ceil(b->height() + kGap));
            }
        }
        warnings.push_back({"PartTooLarge", Severity::Blocker,
                            fmt::format("{}; laid out on an enlarged {} x {} mm sheet instead", e.what(), w, h)});
        sheets = pack_sheets(parts, w, h, kGap);
    }
    std::vector<MachineArtifact> out;
    for (std::size_t k = 0; k < sheets.size(); ++k) {
        out.push_back({fmt::format("{}_sheet_{}.svg", prefix, k + 1), ArtifactFormat::Svg, export_svg(sheets[k])});
    }
    return out;
}

std::vector<std::string> filenames(const std::vector<MachineArtifact>& artifacts) {
    std::vector<std::string> out;
    for (const auto& a : artifacts) out.push_back(a.filename);
    return out;
}

double volume_agreement(double a, double b) {
    a = std::abs(a);
    b = std::abs(b);
    if (a <= 0.0 || b <= 0.0) return 0.0;
    return std::min(a, b) / std::max(a, b);
}

double mesh_volume(const TriangleMesh& mesh) { return std::abs(mesh_stats(mesh).volume); }

TriangleMesh layer_slab(const PolygonSet& section, double z_min, double layer_height, std::size_t index,
                        const std::string& name) {
    const PlaneFrame frame = plane_frame(Plane{{0, 0, 1}, 0});
    const double lo = z_min + layer_height * static_cast<double>(index);
    return extrude(section, frame, lo, lo + layer_height, name);
}

double cut_length(const PolygonSet& set) { return set.perimeter(); }

}  // namespace camforge::detail
