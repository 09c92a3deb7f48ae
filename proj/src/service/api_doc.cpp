#include <fmt/format.h>

#include "camforge/service.hpp"

namespace camforge {

const std::vector<ApiObject>& api_objects() {
    static const std::vector<ApiObject> objects{
        {"UploadResponse", "Returned by POST /models.",
         {{"model_id", "string", "Opaque id for later requests, e.g. \"m000001\"."},
          {"vertex_count", "integer", "Vertices after welding."},
          {"triangle_count", "integer", "Triangles in the file."},
          {"stats", "MeshStats", "Size and closure of the mesh."}}},
        {"MeshStats", "",
         {{"bbox_min", "[x, y, z] mm", "Lower corner of the bounding box."},
          {"bbox_max", "[x, y, z] mm", "Upper corner of the bounding box."},
          {"volume", "number mm^3", "Enclosed volume (divergence theorem)."},
          {"watertight", "boolean", "Every edge is shared by exactly two triangles."},
          {"degenerate_triangles", "integer", "Triangles with zero area."}}},
        {"WorkflowList", "Returned by GET /workflows.",
         {{"workflows", "WorkflowDescriptor[]", "Matching workflows in registration order."}}},
        {"WorkflowDescriptor", "",
         {{"id", "string", "Unique slug."},
          {"name", "string", "Display name."},
          {"category", "string",
           "One of Wire Forming, Interlocking Structure, Stacked Slice Construction, Guide Structure, Mold Casting, "
           "Other."},
          {"machines", "string[]", "Machine tags needed to fabricate."},
          {"dimensions", "Dimensions", "Ratings used by the filters."},
          {"param_schema", "ParamSpec[]", "Parameters accepted in requests."},
          {"doc_links", "string[]", "External tutorials."}}},
        {"Dimensions", "",
         {{"product", "object", "load_bearing, high_temperature_tolerance, lightweight, detail_fidelity -> 0..3."},
          {"structure", "object", "removable_support, integrated_support, flexible, modular, reusable -> boolean."},
          {"machine", "string[]", "Same set as machines."}}},
        {"ParamSpec", "",
         {{"name", "string", "Parameter name."},
          {"type", "string", "length (mm), count, angle (deg), ratio, enum or flag."},
          {"default", "number | string | boolean", "Value used when the request omits it."},
          {"min", "number | null", "Lower bound; null for enum and flag."},
          {"max", "number | null", "Upper bound; null for enum and flag."},
          {"min_exclusive", "boolean", "The lower bound itself is not allowed."},
          {"choices", "string[]", "Allowed values of an enum."},
          {"legal_range", "string", "Human-readable range, e.g. \"(0, 100] mm\"."},
          {"description", "string", "One-line help text."}}},
        {"JobRequest", "Body of POST /previews and POST /exports.",
         {{"model_id", "string", "Id from POST /models."},
          {"workflow_id", "string", "Id from GET /workflows."},
          {"params", "object", "Optional name -> value map; numbers, booleans or the textual form (\"3\")."}}},
        {"PreviewResponse", "Returned by POST /previews.",
         {{"model_id", "string", "Echo of the request."},
          {"workflow_id", "string", "Echo of the request."},
          {"params", "object", "Every parameter after defaults were applied."},
          {"preview", "PreviewDocument", "Meshes to display."},
          {"warnings", "Warning[]", "Problems found while generating; blockers do not abort."},
          {"metrics", "ComparisonMetrics", "Numbers for side-by-side comparison."},
          {"guide", "GuideStep[]", "Fabrication steps in order."},
          {"artifacts", "ArtifactInfo[]", "Machine files contained in the export bundle."}}},
        {"PreviewDocument", "Also written by `camforge preview`.",
         {{"format", "string", "Always \"camforge-preview\"."},
          {"version", "integer", "Always 1."},
          {"parts", "PreviewPart[]", "One entry per displayed part."}}},
        {"PreviewPart", "",
         {{"id", "string", "Part id, matching labels in the machine files."},
          {"color_role", "string", "part, model, mold, wire or block."},
          {"vertices", "number[]", "Flat x, y, z list in mm."},
          {"triangles", "integer[]", "Flat vertex index triples, counter-clockwise seen from outside."}}},
        {"Warning", "",
         {{"code", "string", "Stable identifier such as MinFeature or Undercut."},
          {"severity", "string", "info, caution or blocker."},
          {"message", "string", "Explanation for the user."}}},
        {"ComparisonMetrics", "",
         {{"part_count", "integer", "Physical parts to make."},
          {"material_area", "number | null", "Sheet area in mm^2 for sheet-based workflows."},
          {"material_volume", "number | null", "Material volume in mm^3."},
          {"total_cut_length", "number", "Cut or wire length in mm."},
          {"estimated_fidelity", "number", "0..1 agreement between the result and the model volume."},
          {"machine_set", "string[]", "Machines used."}}},
        {"GuideStep", "",
         {{"index", "integer", "1-based position."},
          {"title", "string", "Short heading."},
          {"body", "string", "Instructions."},
          {"artifact_refs", "string[]", "Files used in this step."},
          {"external_links", "string[]", "Tutorial URLs."},
          {"tools", "string[]", "Tools and materials."}}},
        {"ArtifactInfo", "",
         {{"filename", "string", "Name inside the bundle."},
          {"format", "string", "svg, csv or stl."},
          {"size", "integer", "Bytes."}}},
        {"ErrorResponse", "Body of every 4xx/5xx response.",
         {{"error", "ErrorDetail", "What went wrong."}}},
        {"ErrorDetail", "",
         {{"code", "string", "Error name, e.g. TruncatedFile, UnknownWorkflow, ParamOutOfRange."},
          {"message", "string", "Human-readable detail."},
          {"parameter", "string (optional)", "Offending parameter; present for ParamOutOfRange only."}}},
        {"Health", "Returned by GET /healthz.",
         {{"status", "string", "Always \"ok\"."},
          {"models", "integer", "Models in the store."},
          {"workflows", "integer", "Registered workflows."}}},
    };
    return objects;
}

const std::vector<ApiEndpoint>& api_endpoints() {
    static const std::vector<ApiEndpoint> endpoints{
        {"POST", "/models", "Upload a binary or ASCII STL file as the raw request body.", "STL bytes",
         "201 UploadResponse", "400 when the file cannot be parsed (code names the problem, e.g. TruncatedFile)"},
        {"GET", "/workflows",
         "List workflows. Query keys: `keyword` (all words must occur in name or category, any case), `machines` "
         "(comma list of the machines available; workflows needing others are hidden), each product dimension as a "
         "minimum rating (`load_bearing=2`), each structure flag as a required value (`modular=true`). Filters "
         "combine with AND.",
         "none", "200 WorkflowList", "400 for unknown query keys or malformed values"},
        {"POST", "/previews",
         "Generate a workflow for an uploaded model. Identical requests are answered from a cache.", "JobRequest",
         "200 PreviewResponse", "400 malformed JSON; 404 unknown model or workflow; 422 ParamOutOfRange"},
        {"POST", "/exports",
         "Generate and download the bundle: machine files at the root plus GUIDE.txt, preview.json and params.txt. "
         "Identical requests give byte-identical archives.",
         "JobRequest", "200 application/zip, Content-Disposition filename \"<model>-<workflow>.zip\"",
         "as POST /previews"},
        {"GET", "/healthz", "Liveness check.", "none", "200 Health", "none"},
    };
    return endpoints;
}

std::string render_api_reference() {
    std::string out =
        "# HTTP API\n\n"
        "Generated from `src/service/api_doc.cpp`; run `camforge_apidoc > docs/API.md` after changing it.\n\n"
        "The server listens on `CAMFORGE_PORT` (default 8080). `camforge serve --store-dir DIR` keeps uploads on "
        "disk. JSON bodies use the objects below; every field is always present unless marked optional.\n\n"
        "## Endpoints\n";
    for (const auto& e : api_endpoints()) {
        out += fmt::format("\n### {} {}\n\n{}\n\n- Request: {}\n- Response: {}\n- Errors: {}\n", e.method, e.path,
                           e.summary, e.request, e.response, e.errors);
    }
    out += "\n## Objects\n";
    for (const auto& o : api_objects()) {
        out += fmt::format("\n### {}\n\n", o.name);
        if (!o.description.empty()) out += o.description + "\n\n";
        out += "| Field | Type | Description |\n|---|---|---|\n";
        for (const auto& f : o.fields) out += fmt::format("| `{}` | {} | {} |\n", f.name, f.type, f.description);
    }
    return out;
}

}  // namespace camforge
