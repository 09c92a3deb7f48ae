#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "camforge/polygon.hpp"
#include "camforge/workflow.hpp"

namespace camforge {

// Sheet packing -------------------------------------------------------------

struct PackPart {
    std::string id;
    PolygonSet polygons;
    std::string label;
};

struct Placement {
    std::string part_id;
    Vec2 translation{};
    /// Already translated into sheet coordinates.
    PolygonSet polygons;
    std::string label;
    Vec2 label_anchor{};
};

struct SheetLayout {
    double sheet_w = 0.0;
    double sheet_h = 0.0;
    std::vector<Placement> placements;
};

/// Shelf packing by descending bounding-box height (ties by id). Parts start
/// at the sheet origin and are separated by at least `gap`. Throws PartTooLarge.
std::vector<SheetLayout> pack_sheets(std::vector<PackPart> parts, double sheet_w, double sheet_h, double gap = 2.0);

// SVG -----------------------------------------------------------------------

std::string export_svg(const SheetLayout& layout);

struct SvgLabel {
    std::string text;
    Vec2 position{};
};

struct SvgPart {
    std::string id;
    std::vector<Contour> contours;
};

struct ParsedSvg {
    double width_mm = 0.0;
    double height_mm = 0.0;
    Aabb2 view_box{};
    std::vector<SvgPart> parts;
    std::vector<SvgLabel> labels;

    std::size_t contour_count() const;
};

/// Reads documents produced by export_svg. Throws ParseError.
ParsedSvg parse_svg(std::string_view svg);

// CSV -----------------------------------------------------------------------

inline constexpr std::string_view kWireCsvHeader = "wire_id,step,feed_mm,bend_deg,rotate_deg";

/// Fixed four-decimal formatting that never yields "-0.0000".
std::string format_fixed4(double value);

std::string export_wire_csv(const std::string& wire_id, const BendTable& table);

struct ParsedWire {
    std::string wire_id;
    BendTable table;
};

/// Rows grouped by wire id in file order. Throws ParseError.
std::vector<ParsedWire> parse_wire_csv(std::string_view csv);

/// Ordered point list, header "step,u_mm,v_mm".
std::string export_points_csv(const std::vector<Vec2>& points);
std::vector<Vec2> parse_points_csv(std::string_view csv);

// Guide manifest ------------------------------------------------------------

std::string export_guide_manifest(const StepManifest& guide, const WorkflowDescriptor& descriptor,
                                  const WorkflowParams& params);

struct ParsedManifest {
    int schema = 0;
    std::string workflow_id;
    std::string workflow_name;
    std::vector<std::pair<std::string, std::string>> params;
    StepManifest guide;
};

ParsedManifest parse_guide_manifest(std::string_view text);

// Preview document ----------------------------------------------------------

std::string export_preview(const std::vector<PreviewPart>& parts);
std::vector<PreviewPart> parse_preview(std::string_view json);

// Bundles -------------------------------------------------------------------

struct ZipEntry {
    std::string name;
    std::string bytes;

    bool operator==(const ZipEntry&) const = default;
};

/// Stored (uncompressed) archive with 1980-01-01 timestamps, entries in the given order.
std::string write_zip(const std::vector<ZipEntry>& entries);
std::vector<ZipEntry> read_zip(std::string_view archive);

/// One "name=value" line per parameter, sorted by name.
std::string export_params(const WorkflowParams& params);

/// Artifacts plus GUIDE.txt, preview.json and params.txt, sorted by name.
std::vector<ZipEntry> bundle_entries(const WorkflowOutput& output, const WorkflowDescriptor& descriptor,
                                     const WorkflowParams& params);

std::string export_bundle(const WorkflowOutput& output, const WorkflowDescriptor& descriptor,
                          const WorkflowParams& params);

}  // namespace camforge
