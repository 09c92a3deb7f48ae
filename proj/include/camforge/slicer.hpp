#pragma once

#include <string>
#include <vector>

#include "camforge/mesh.hpp"
#include "camforge/polygon.hpp"

namespace camforge {

struct Layer {
    std::size_t index = 0;
    /// Height of the sampled midplane.
    double z = 0.0;
    double thickness = 0.0;
    PolygonSet cross_section;
    std::size_t open_chains = 0;
    bool crossing_contours = false;
};

struct SliceStack {
    std::vector<Layer> layers;
    Aabb3 source_bbox{};
    double layer_height = 0.0;
};

/// Number of slabs of height `layer_height` needed to cover `extent`.
std::size_t layer_count(double extent, double layer_height);

/// Midplane of slab `index`, clamped just below `z_max` for a partial final slab.
double layer_midplane(double z_min, double z_max, double layer_height, std::size_t index);

/// Uniform horizontal slicing. Empty layers are kept so callers can warn about them.
SliceStack slice_uniform(const TriangleMesh& mesh, double layer_height);

double stack_volume(const SliceStack& stack);

}  // namespace camforge
