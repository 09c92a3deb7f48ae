#include "camforge/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "camforge/error.hpp"

namespace camforge {

std::string_view severity_name(Severity severity) {
    switch (severity) {
        case Severity::Info: return "info";
        case Severity::Caution: return "caution";
        case Severity::Blocker: return "blocker";
    }
    return "unknown";
}

std::string_view format_name(ArtifactFormat format) {
    switch (format) {
        case ArtifactFormat::Svg: return "svg";
        case ArtifactFormat::Csv: return "csv";
        case ArtifactFormat::Stl: return "stl";
    }
    return "unknown";
}

const ParamSpec* WorkflowDescriptor::find_param(std::string_view param) const {
    for (const auto& s : param_schema) {
        if (s.name == param) return &s;
    }
    return nullptr;
}

namespace {

[[noreturn]] void violation(const std::string& what) { throw Error(ErrorCode::InvariantViolation, what); }

bool is_one_of(std::string_view s, const auto& options) {
    return std::find(options.begin(), options.end(), s) != options.end();
}

}  // namespace

void validate_descriptor(const WorkflowDescriptor& d) {
    if (d.id.empty()) violation("descriptor id is empty");
    if (!is_one_of(d.category, kCategories)) violation(fmt::format("{}: unknown category '{}'", d.id, d.category));
    for (const auto& m : d.machines) {
        if (!is_one_of(m, kMachineTags)) violation(fmt::format("{}: unknown machine tag '{}'", d.id, m));
    }
    std::vector<std::string> a = d.machines, b = d.dimensions.machine;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) violation(fmt::format("{}: dimension machine set differs from descriptor machines", d.id));
    for (const auto& [k, v] : d.dimensions.product) {
        if (!is_one_of(k, kProductDimensions)) violation(fmt::format("{}: unknown product dimension '{}'", d.id, k));
        if (v < 0 || v > 3) violation(fmt::format("{}: rating {}={} outside 0-3", d.id, k, v));
    }
    for (const auto& [k, v] : d.dimensions.structure) {
        if (!is_one_of(k, kStructureDimensions)) violation(fmt::format("{}: unknown structure dimension '{}'", d.id, k));
    }
    std::set<std::string> names;
    for (const auto& s : d.param_schema) {
        if (!names.insert(s.name).second) violation(fmt::format("{}: duplicate parameter '{}'", d.id, s.name));
    }
}

void check_output(const WorkflowOutput& out) {
    std::set<std::string> files;
    for (const auto& a : out.artifacts) {
        if (!files.insert(a.filename).second) violation(fmt::format("duplicate artifact filename '{}'", a.filename));
        const std::string ext = "." + std::string(format_name(a.format));
        if (a.filename.size() <= ext.size() || !a.filename.ends_with(ext)) {
            violation(fmt::format("artifact '{}' does not end in {}", a.filename, ext));
        }
        // These names are reserved for bundle entries.
        if (a.filename == "GUIDE.txt" || a.filename == "preview.json" || a.filename == "params.txt" ||
            a.filename.find('/') != std::string::npos) {
            violation(fmt::format("artifact filename '{}' is not allowed", a.filename));
        }
    }
    if (out.guide.steps.empty()) violation("guide has no steps");
    for (std::size_t i = 0; i < out.guide.steps.size(); ++i) {
        const auto& step = out.guide.steps[i];
        if (step.index != static_cast<int>(i) + 1) violation(fmt::format("guide step {} has index {}", i + 1, step.index));
        for (const auto& ref : step.artifact_refs) {
            if (!files.contains(ref)) violation(fmt::format("guide step {} references missing artifact '{}'", step.index, ref));
        }
    }
    const auto& m = out.metrics;
    if (!(m.estimated_fidelity >= 0.0 && m.estimated_fidelity <= 1.0)) {
        violation(fmt::format("fidelity {} outside [0, 1]", m.estimated_fidelity));
    }
    if (m.material_area && !(*m.material_area >= 0.0)) violation("negative material area");
    if (m.material_volume && !(*m.material_volume >= 0.0)) violation("negative material volume");
    if (!(m.total_cut_length >= 0.0)) violation("negative cut length");
    std::set<std::string> ids;
    for (const auto& p : out.preview) {
        if (!ids.insert(p.id).second) violation(fmt::format("duplicate preview part '{}'", p.id));
    }
}

}  // namespace camforge
