#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camforge/mesh.hpp"
#include "camforge/params.hpp"

namespace camforge {

inline constexpr std::array<std::string_view, 6> kCategories{
    "Wire Forming", "Interlocking Structure", "Stacked Slice Construction", "Guide Structure", "Mold Casting", "Other"};
inline constexpr std::array<std::string_view, 4> kProductDimensions{"load_bearing", "high_temperature_tolerance",
                                                                    "lightweight", "detail_fidelity"};
inline constexpr std::array<std::string_view, 5> kStructureDimensions{"removable_support", "integrated_support",
                                                                      "flexible", "modular", "reusable"};
inline constexpr std::array<std::string_view, 5> kMachineTags{"laser_cutter", "printer_3d", "wire_bender",
                                                              "hot_wire_cutter", "none"};

enum class Severity { Info, Caution, Blocker };
std::string_view severity_name(Severity severity);

struct Warning {
    std::string code;
    Severity severity = Severity::Caution;
    std::string message;

    bool operator==(const Warning&) const = default;
};

enum class ArtifactFormat { Svg, Csv, Stl };
std::string_view format_name(ArtifactFormat format);

struct MachineArtifact {
    std::string filename;
    ArtifactFormat format = ArtifactFormat::Svg;
    std::string bytes;
};

struct PreviewPart {
    std::string id;
    /// One of "part", "model", "mold", "wire", "block".
    std::string color_role;
    TriangleMesh mesh;
};

struct GuideStep {
    int index = 0;
    std::string title;
    std::string body;
    std::vector<std::string> artifact_refs;
    std::vector<std::string> external_links;
    std::vector<std::string> tools;

    bool operator==(const GuideStep&) const = default;
};

struct StepManifest {
    std::vector<GuideStep> steps;

    bool operator==(const StepManifest&) const = default;
};

struct ComparisonMetrics {
    std::size_t part_count = 0;
    std::optional<double> material_area;
    std::optional<double> material_volume;
    double total_cut_length = 0.0;
    double estimated_fidelity = 1.0;
    std::vector<std::string> machine_set;

    bool operator==(const ComparisonMetrics&) const = default;
};

struct WorkflowOutput {
    std::vector<PreviewPart> preview;
    std::vector<MachineArtifact> artifacts;
    StepManifest guide;
    std::vector<Warning> warnings;
    ComparisonMetrics metrics;
};

struct DimensionProfile {
    std::map<std::string, int> product;
    std::map<std::string, bool> structure;
    std::vector<std::string> machine;
};

struct WorkflowDescriptor {
    std::string id;
    std::string name;
    std::string category;
    std::vector<std::string> machines;
    DimensionProfile dimensions;
    std::vector<ParamSpec> param_schema;
    std::vector<std::string> doc_links;

    const ParamSpec* find_param(std::string_view param) const;
};

/// Checks the descriptor invariants (known category and tags, rating ranges,
/// unique parameter names). Throws InvariantViolation.
void validate_descriptor(const WorkflowDescriptor& descriptor);

/// Artifact-reference closure, unique filenames, extension/format agreement,
/// contiguous step indices and metric ranges. Throws InvariantViolation.
void check_output(const WorkflowOutput& output);

}  // namespace camforge
