#pragma once

#include <string>
#include <vector>

#include "camforge/export.hpp"
#include "camforge/workflows.hpp"

namespace camforge::detail {

ParamSpec length_param(std::string name, double def, double min, double max, bool min_exclusive, std::string description);
ParamSpec count_param(std::string name, std::int64_t def, std::int64_t min, std::int64_t max, std::string description);
std::vector<ParamSpec> sheet_params();

/// Rejects a layer height that does not fit below the model height.
void check_layer_height(const TriangleMesh& mesh, double layer_height, const std::string& name = "layer_height");

/// Per-layer cautions for empty, open or self-crossing sections.
void layer_warnings(const SliceStack& stack, std::vector<Warning>& warnings, const std::string& part_prefix);

/// Packs parts into sheets and renders one SVG per sheet named
/// "<prefix>_sheet_<k>.svg". A part larger than the sheet raises a blocker
/// warning and the parts are packed on an enlarged sheet instead.
std::vector<MachineArtifact> sheet_artifacts(const std::vector<PackPart>& parts, double sheet_w, double sheet_h,
                                             const std::string& prefix, std::vector<Warning>& warnings);

std::vector<std::string> filenames(const std::vector<MachineArtifact>& artifacts);

/// min(a, b) / max(a, b), or 0 when either volume vanishes.
double volume_agreement(double a, double b);

double mesh_volume(const TriangleMesh& mesh);

/// Prism of the section over the slab [z_min + index * h, z_min + (index + 1) * h].
TriangleMesh layer_slab(const PolygonSet& section, double z_min, double layer_height, std::size_t index,
                        const std::string& name);

double cut_length(const PolygonSet& set);

}  // namespace camforge::detail
