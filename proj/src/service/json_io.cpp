#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/service.hpp"

namespace camforge {

namespace {

Json vec3(Vec3 v) { return Json::array({v.x, v.y, v.z}); }

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json param_value_json(const ParamValue& value) {
    return std::visit([](const auto& v) { return Json(v); }, value);
}

Json to_json(const MeshStats& s) {
    Json j;
    j["bbox_min"] = vec3(s.bbox_min);
    j["bbox_max"] = vec3(s.bbox_max);
    j["volume"] = s.volume;
    j["watertight"] = s.watertight;
    j["degenerate_triangles"] = s.degenerate_triangles;
    return j;
}

Json to_json(const ParamSpec& p) {
    Json j;
    j["name"] = p.name;
    j["type"] = std::string(param_type_name(p.type));
    j["default"] = param_value_json(p.default_value);
    const bool ranged = p.type != ParamType::Enum && p.type != ParamType::Flag;
    j["min"] = ranged ? Json(p.min) : Json(nullptr);
    j["max"] = ranged ? Json(p.max) : Json(nullptr);
    j["min_exclusive"] = p.min_exclusive;
    j["choices"] = p.choices;
    j["legal_range"] = p.legal_range();
    j["description"] = p.description;
    return j;
}

Json to_json(const WorkflowDescriptor& d) {
    Json j;
    j["id"] = d.id;
    j["name"] = d.name;
    j["category"] = d.category;
    j["machines"] = d.machines;
    Json dims;
    dims["product"] = d.dimensions.product;
    dims["structure"] = d.dimensions.structure;
    dims["machine"] = d.dimensions.machine;
    j["dimensions"] = dims;
    j["param_schema"] = Json::array();
    for (const auto& p : d.param_schema) j["param_schema"].push_back(to_json(p));
    j["doc_links"] = d.doc_links;
    return j;
}

Json to_json(const Warning& w) {
    Json j;
    j["code"] = w.code;
    j["severity"] = std::string(severity_name(w.severity));
    j["message"] = w.message;
    return j;
}

Json to_json(const ComparisonMetrics& m) {
    Json j;
    j["part_count"] = m.part_count;
    j["material_area"] = optional_number(m.material_area);
    j["material_volume"] = optional_number(m.material_volume);
    j["total_cut_length"] = m.total_cut_length;
    j["estimated_fidelity"] = m.estimated_fidelity;
    j["machine_set"] = m.machine_set;
    return j;
}

Json to_json(const GuideStep& s) {
    Json j;
    j["index"] = s.index;
    j["title"] = s.title;
    j["body"] = s.body;
    j["artifact_refs"] = s.artifact_refs;
    j["external_links"] = s.external_links;
    j["tools"] = s.tools;
    return j;
}

WorkflowParams params_from_json(const WorkflowDescriptor& descriptor, const Json& params) {
    WorkflowParams out;
    if (params.is_null()) return out;
    if (!params.is_object()) throw Error(ErrorCode::ParseError, "'params' must be an object");
    for (const auto& [name, value] : params.items()) {
        const ParamSpec* spec = descriptor.find_param(name);
        if (!spec) {
            std::vector<std::string> names;
            for (const auto& p : descriptor.param_schema) names.push_back(p.name);
            reject_param(name, fmt::format("is not a parameter of '{}' (expected one of {})", descriptor.id,
                                           fmt::join(names, ", ")));
        }
        ParamValue v;
        if (value.is_boolean()) {
            v = value.get<bool>();
        } else if (value.is_number_integer()) {
            v = value.get<std::int64_t>();
        } else if (value.is_number()) {
            v = value.get<double>();
        } else if (value.is_string()) {
            v = parse_param_text(*spec, value.get<std::string>());
        } else {
            reject_param(name, fmt::format("has an unsupported JSON value; expected {}", spec->legal_range()));
        }
        out[name] = coerce_param(*spec, v);
    }
    return out;
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t at = std::min(s.find(',', start), s.size());
        std::string item = s.substr(start, at - start);
        if (!item.empty()) out.push_back(item);
        start = at + 1;
    }
    return out;
}

bool contains(const auto& list, std::string_view item) {
    return std::find(list.begin(), list.end(), item) != list.end();
}

}  // namespace

WorkflowFilter filter_from_query(const std::multimap<std::string, std::string>& query) {
    WorkflowFilter f;
    for (const auto& [key, value] : query) {
        if (key == "keyword") {
            f.keywords += (f.keywords.empty() ? "" : " ") + value;
        } else if (key == "machines") {
            if (!f.machines) f.machines.emplace();
            for (const auto& m : split_list(value)) {
                if (!contains(kMachineTags, m)) throw Error(ErrorCode::ParseError, fmt::format("unknown machine tag '{}'", m));
                f.machines->push_back(m);
            }
        } else if (contains(kProductDimensions, key)) {
            int rating = -1;
            if (value.size() == 1 && value[0] >= '0' && value[0] <= '3') rating = value[0] - '0';
            if (rating < 0) throw Error(ErrorCode::ParseError, fmt::format("'{}' must be a rating from 0 to 3", key));
            f.min_ratings[key] = rating;
        } else if (contains(kStructureDimensions, key)) {
            if (value != "true" && value != "false") {
                throw Error(ErrorCode::ParseError, fmt::format("'{}' must be true or false", key));
            }
            f.structure[key] = value == "true";
        } else {
            throw Error(ErrorCode::ParseError, fmt::format("unknown filter '{}'", key));
        }
    }
    return f;
}

}  // namespace camforge
