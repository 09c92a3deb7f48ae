#include <cmath>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/slicer.hpp"

namespace camforge {

std::size_t layer_count(double extent, double layer_height) {
    if (extent <= 0.0) return 0;
    // Absorb float noise so exact multiples do not gain a sliver layer.
    const double ratio = extent / layer_height;
    return static_cast<std::size_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
}

double layer_midplane(double z_min, double z_max, double layer_height, std::size_t index) {
    return std::min(z_min + (static_cast<double>(index) + 0.5) * layer_height, z_max - 1e-6);
}

SliceStack slice_uniform(const TriangleMesh& mesh, double layer_height) {
    mesh.validate();
    const Aabb3 box = mesh.bounds();
    const double extent = box.max.z - box.min.z;
    if (!(layer_height > 0.0) || !(layer_height < extent)) {
        throw Error(ErrorCode::LayerHeightOutOfRange,
                    fmt::format("layer height {} mm must be in (0, {}) mm", layer_height, extent));
    }
    SliceStack stack;
    stack.source_bbox = box;
    stack.layer_height = layer_height;
    const std::size_t count = layer_count(extent, layer_height);
    stack.layers.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Layer layer;
        layer.index = i;
        layer.z = layer_midplane(box.min.z, box.max.z, layer_height, i);
        layer.thickness = layer_height;
        PlaneSection s = section_plane(mesh, Plane{{0.0, 0.0, 1.0}, layer.z});
        layer.cross_section = std::move(s.polygons);
        layer.open_chains = s.open_chains;
        layer.crossing_contours = s.crossing_contours;
        stack.layers.push_back(std::move(layer));
    }
    return stack;
}

double stack_volume(const SliceStack& stack) {
    double v = 0.0;
    for (const auto& layer : stack.layers) v += layer.cross_section.area() * layer.thickness;
    return v;
}

}  // namespace camforge
