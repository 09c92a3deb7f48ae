#pragma once

// The five foundational generators. Each one is split into a planning step
// that exposes its intermediate geometry and a generator that renders the
// plan into artifacts, guide, preview and metrics.

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "camforge/registry.hpp"
#include "camforge/slicer.hpp"

namespace camforge {

using DocLinks = std::vector<std::string>;

// Stacked slices ------------------------------------------------------------

struct StackedSlicesPlan {
    SliceStack stack;
    /// Intersection of every non-empty cross-section (the dowel search region).
    PolygonSet common_region;
    std::vector<Vec2> dowels;
    /// Per layer: cross-section minus dowel holes, offset by kerf / 2. Empty for empty layers.
    std::vector<PolygonSet> cut_outlines;
    std::vector<Warning> warnings;
};

std::vector<ParamSpec> stacked_slices_schema();
StackedSlicesPlan plan_stacked_slices(const TriangleMesh& mesh, const WorkflowParams& params);
WorkflowOutput gen_stacked_slices(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links = {});

// Interlocking --------------------------------------------------------------

struct InterlockPart {
    std::string id;
    /// 'X' planes have normal +x and coordinates (y, z); 'Y' planes have
    /// normal -y and coordinates (x, z).
    char family = 'X';
    PlaneFrame frame;
    PolygonSet section;
    /// Section with slots removed (before kerf compensation).
    PolygonSet slotted;
};

struct SlotSpec {
    std::string piece_a;  // X part, slotted from the top
    std::string piece_b;  // Y part, slotted from the bottom
    Vec2 location_a{};
    Vec2 location_b{};
    double width = 0.0;
    double depth_a = 0.0;
    double depth_b = 0.0;
    std::string from_edge_a = "top";
    std::string from_edge_b = "bottom";
    double z_low = 0.0;
    double z_high = 0.0;
    std::size_t span_count = 1;

    double span() const { return z_high - z_low; }
};

struct InterlockingPlan {
    std::vector<InterlockPart> parts;
    std::vector<SlotSpec> slots;
    std::vector<Warning> warnings;
};

/// Z-intervals along the vertical line where both sections contain the line.
/// `coverage(z)` must be true exactly where material is present.
std::vector<std::pair<double, double>> covered_intervals(const std::function<bool(double)>& coverage, double z_min,
                                                         double z_max, double step = 0.1, double tolerance = 1e-4);

std::vector<ParamSpec> interlocking_schema();
InterlockingPlan plan_interlocking(const TriangleMesh& mesh, const WorkflowParams& params);
WorkflowOutput gen_interlocking(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links = {});

// Stacked mold --------------------------------------------------------------

struct MoldLayer {
    std::size_t index = 0;
    double z = 0.0;
    PolygonSet block;
    PolygonSet cross_section;
    PolygonSet mold;
};

struct StackedMoldPlan {
    SliceStack stack;
    Aabb2 block{};
    std::vector<MoldLayer> layers;
    std::vector<Warning> warnings;
};

/// Block minus cross-section. Throws BlockDegenerate when the cross-section
/// reaches the block boundary.
PolygonSet mold_layer(const Aabb2& block, const PolygonSet& cross_section);

/// True when every one of `samples` points spread along the boundary of
/// `inner` lies inside `outer` or within `tolerance` of its boundary.
bool sampled_containment(const PolygonSet& inner, const PolygonSet& outer, std::size_t samples = 200,
                         double tolerance = 1e-3);

std::vector<ParamSpec> stacked_mold_schema();
StackedMoldPlan plan_stacked_mold(const TriangleMesh& mesh, const WorkflowParams& params);
WorkflowOutput gen_stacked_mold(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links = {});

// Wire mesh -----------------------------------------------------------------

enum class WireKind { Ring, Meridian };

struct WirePath {
    std::string wire_id;
    WireKind kind = WireKind::Ring;
    Plane plane;
    PlaneFrame frame;
    /// Simplified contour in plane coordinates.
    Contour contour;
    BendTable bend_table;
    double length = 0.0;
};

struct WireMeshPlan {
    std::vector<WirePath> wires;
    std::vector<Warning> warnings;
};

std::vector<ParamSpec> wire_mesh_schema();
WireMeshPlan plan_wire_mesh(const TriangleMesh& mesh, const WorkflowParams& params);
WorkflowOutput gen_wire_mesh(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links = {});

// Hot-wire foam -------------------------------------------------------------

struct HotwireCut {
    /// 'x': the wire runs along x and the profile lives in (y, z); 'y': along y, profile in (x, z).
    char axis = 'x';
    Contour silhouette;
    Aabb2 block_profile{};
    /// Lead-in, resampled hull loop, lead-out.
    std::vector<Vec2> path;
};

struct HotwirePlan {
    Aabb3 block{};
    Aabb3 mesh_bounds{};
    std::vector<HotwireCut> cuts;
    /// Occupied cells of the shared 64^3 grid over the block.
    std::size_t mesh_voxels = 0;
    std::size_t approx_voxels = 0;
    /// Closed-form volume of the silhouette intersection clipped to the mesh bounds.
    double approx_volume = 0.0;
    double fidelity = 0.0;
    std::vector<Warning> warnings;
};

inline constexpr int kVoxelResolution = 64;

/// Whether a point lies inside the intersection of the extruded silhouettes and the mesh bounds.
bool inside_approximation(const HotwirePlan& plan, Vec3 p);
/// Exact volume of the silhouette intersection within the mesh bounds.
double approximation_volume(const HotwirePlan& plan);
/// Closed solid of the approximation.
TriangleMesh approximation_mesh(const HotwirePlan& plan);
/// Cell-centre occupancy count of a closed mesh on a res^3 grid over `box`.
std::size_t voxel_count_mesh(const TriangleMesh& mesh, const Aabb3& box, int res = kVoxelResolution);

std::vector<ParamSpec> hotwire_schema();
HotwirePlan plan_hotwire(const TriangleMesh& mesh, const WorkflowParams& params);
WorkflowOutput gen_hotwire(const TriangleMesh& mesh, const WorkflowParams& params, const DocLinks& links = {});

// Registry ------------------------------------------------------------------

/// Descriptor data (names, categories, machines, dimension ratings, links) shipped with the library.
std::vector<WorkflowDescriptor> foundational_descriptors();

/// Registers the five foundational workflows.
void register_foundational(WorkflowRegistry& registry);

/// Process-wide registry with the foundational workflows.
const WorkflowRegistry& default_registry();

}  // namespace camforge
