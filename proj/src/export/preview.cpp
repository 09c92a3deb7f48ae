#include <json.hpp>

#include "camforge/error.hpp"
#include "camforge/export.hpp"

namespace camforge {

using ordered_json = nlohmann::ordered_json;

std::string export_preview(const std::vector<PreviewPart>& parts) {
    ordered_json doc;
    doc["format"] = "camforge-preview";
    doc["version"] = 1;
    doc["parts"] = ordered_json::array();
    for (const auto& p : parts) {
        ordered_json part;
        part["id"] = p.id;
        part["color_role"] = p.color_role;
        auto& v = part["vertices"] = ordered_json::array();
        for (const Vec3& q : p.mesh.vertices) {
            v.push_back(q.x);
            v.push_back(q.y);
            v.push_back(q.z);
        }
        auto& t = part["triangles"] = ordered_json::array();
        for (const Triangle& tri : p.mesh.triangles) {
            for (auto i : tri) t.push_back(i);
        }
        doc["parts"].push_back(std::move(part));
    }
    return doc.dump();
}

std::vector<PreviewPart> parse_preview(std::string_view text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("format") != "camforge-preview" || doc.at("version") != 1) {
            throw Error(ErrorCode::ParseError, "not a camforge-preview version 1 document");
        }
        std::vector<PreviewPart> out;
        for (const auto& part : doc.at("parts")) {
            PreviewPart p;
            p.id = part.at("id").get<std::string>();
            p.color_role = part.at("color_role").get<std::string>();
            const auto& v = part.at("vertices");
            const auto& t = part.at("triangles");
            if (v.size() % 3 != 0 || t.size() % 3 != 0) throw Error(ErrorCode::ParseError, "array length not a multiple of 3");
            for (std::size_t i = 0; i < v.size(); i += 3) {
                p.mesh.vertices.push_back({v[i].get<double>(), v[i + 1].get<double>(), v[i + 2].get<double>()});
            }
            for (std::size_t i = 0; i < t.size(); i += 3) {
                p.mesh.triangles.push_back({t[i].get<std::uint32_t>(), t[i + 1].get<std::uint32_t>(), t[i + 2].get<std::uint32_t>()});
            }
            for (const auto& tri : p.mesh.triangles) {
                for (auto i : tri) {
                    if (i >= p.mesh.vertices.size()) throw Error(ErrorCode::ParseError, "triangle index out of range");
                }
            }
            p.mesh.name = p.id;
            out.push_back(std::move(p));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
}

}  // namespace camforge
