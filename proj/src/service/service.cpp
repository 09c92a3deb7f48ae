#include <cstdlib>
#include <regex>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/export.hpp"
#include "camforge/service.hpp"

namespace camforge {

namespace {

HttpResponse json_response(int status, const Json& body) {
    return {status, "application/json", body.dump(), {}};
}

HttpResponse plain_error(int status, const std::string& code, const std::string& message) {
    Json body;
    body["error"] = Json{{"code", code}, {"message", message}};
    return json_response(status, body);
}

int status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::UnknownModel:
        case ErrorCode::UnknownWorkflow: return 404;
        case ErrorCode::ParamOutOfRange: return 422;
        case ErrorCode::TruncatedFile:
        case ErrorCode::NonFiniteCoordinate:
        case ErrorCode::EmptyMesh:
        case ErrorCode::MalformedStl:
        case ErrorCode::InvalidMesh:
        case ErrorCode::ParseError: return 400;
        default: return 500;
    }
}

}  // namespace

HttpResponse error_response(const std::exception& error) {
    if (const auto* e = dynamic_cast<const Error*>(&error)) {
        Json detail;
        detail["code"] = std::string(error_code_name(e->code()));
        detail["message"] = e->what();
        if (e->code() == ErrorCode::ParamOutOfRange) {
            static const std::regex name(R"(parameter '([^']*)')");
            std::cmatch m;
            if (std::regex_search(e->what(), m, name)) detail["parameter"] = m[1].str();
        }
        Json body;
        body["error"] = detail;
        return json_response(status_for(e->code()), body);
    }
    if (dynamic_cast<const Json::exception*>(&error)) return plain_error(400, "ParseError", error.what());
    return plain_error(500, "InternalError", error.what());
}

Service::Service(const WorkflowRegistry& registry, ServiceOptions options)
    : registry_(registry), options_(std::move(options)), store_(options_.store_dir) {}

HttpResponse Service::handle(const HttpRequest& request) {
    struct Route {
        const char* method;
        const char* path;
    };
    try {
        const std::string& m = request.method;
        const std::string& p = request.path;
        if (p == "/models" && m == "POST") return upload_model(request.body);
        if (p == "/workflows" && m == "GET") return list_workflows(request.query);
        if (p == "/previews" && m == "POST") return create_preview(request.body);
        if (p == "/exports" && m == "POST") return create_export(request.body);
        if (p == "/healthz" && m == "GET") return health();
        for (const Route r : {Route{"POST", "/models"}, Route{"GET", "/workflows"}, Route{"POST", "/previews"},
                              Route{"POST", "/exports"}, Route{"GET", "/healthz"}}) {
            if (p == r.path) {
                auto res = plain_error(405, "MethodNotAllowed", fmt::format("{} expects {}", p, r.method));
                res.headers["Allow"] = r.method;
                return res;
            }
        }
        return plain_error(404, "NotFound", fmt::format("no endpoint {}", p));
    } catch (const std::exception& e) {
        return error_response(e);
    }
}

HttpResponse Service::upload_model(const std::string& body) {
    const auto model = store_.add(body);
    Json j;
    j["model_id"] = model->id;
    j["vertex_count"] = model->mesh.vertices.size();
    j["triangle_count"] = model->mesh.triangles.size();
    j["stats"] = to_json(model->stats);
    return json_response(201, j);
}

HttpResponse Service::list_workflows(const std::multimap<std::string, std::string>& query) const {
    const auto found = registry_.filter(filter_from_query(query));
    Json j;
    j["workflows"] = Json::array();
    for (const auto& d : found) j["workflows"].push_back(to_json(d));
    return json_response(200, j);
}

Service::Job Service::parse_job(const std::string& body) const {
    const Json req = Json::parse(body);
    if (!req.is_object()) throw Error(ErrorCode::ParseError, "request body must be a JSON object");
    for (const char* field : {"model_id", "workflow_id"}) {
        if (!req.contains(field) || !req[field].is_string()) {
            throw Error(ErrorCode::ParseError, fmt::format("'{}' (string) is required", field));
        }
    }
    Job job;
    job.model = store_.get(req["model_id"].get<std::string>());
    job.descriptor = registry_.descriptor(req["workflow_id"].get<std::string>());
    job.params = resolve_params(job.descriptor.param_schema,
                                params_from_json(job.descriptor, req.value("params", Json(nullptr))));
    job.key = fmt::format("{}\n{}\n{}", job.model->id, job.descriptor.id, export_params(job.params));
    return job;
}

std::optional<HttpResponse> Service::cached(const std::string& key) const {
    std::lock_guard lock(cache_mutex_);
    const auto it = cache_.find(key);
    if (it == cache_.end()) return std::nullopt;
    return it->second;
}

void Service::remember(const std::string& key, const HttpResponse& response) {
    if (options_.cache_entries == 0) return;
    std::lock_guard lock(cache_mutex_);
    if (!cache_.emplace(key, response).second) return;
    cache_order_.push_back(key);
    if (cache_order_.size() > options_.cache_entries) {
        cache_.erase(cache_order_.front());
        cache_order_.erase(cache_order_.begin());
    }
}

HttpResponse Service::create_preview(const std::string& body) {
    const Job job = parse_job(body);
    const std::string key = "preview\n" + job.key;
    if (auto hit = cached(key)) return *hit;

    const WorkflowOutput out = registry_.generate(job.descriptor.id, job.model->mesh, job.params);
    Json j;
    j["model_id"] = job.model->id;
    j["workflow_id"] = job.descriptor.id;
    j["params"] = Json::object();
    for (const auto& [name, value] : job.params) j["params"][name] = param_value_json(value);
    j["preview"] = Json::parse(export_preview(out.preview));
    j["warnings"] = Json::array();
    for (const auto& w : out.warnings) j["warnings"].push_back(to_json(w));
    j["metrics"] = to_json(out.metrics);
    j["guide"] = Json::array();
    for (const auto& s : out.guide.steps) j["guide"].push_back(to_json(s));
    j["artifacts"] = Json::array();
    for (const auto& a : out.artifacts) {
        j["artifacts"].push_back(Json{{"filename", a.filename}, {"format", std::string(format_name(a.format))}, {"size", a.bytes.size()}});
    }
    const HttpResponse res = json_response(200, j);
    remember(key, res);
    return res;
}

HttpResponse Service::create_export(const std::string& body) {
    const Job job = parse_job(body);
    const std::string key = "export\n" + job.key;
    if (auto hit = cached(key)) return *hit;

    const WorkflowOutput out = registry_.generate(job.descriptor.id, job.model->mesh, job.params);
    HttpResponse res{200, "application/zip", export_bundle(out, job.descriptor, job.params), {}};
    res.headers["Content-Disposition"] =
        fmt::format("attachment; filename=\"{}-{}.zip\"", job.model->id, job.descriptor.id);
    remember(key, res);
    return res;
}

HttpResponse Service::health() const {
    Json j;
    j["status"] = "ok";
    j["models"] = store_.size();
    j["workflows"] = registry_.list().size();
    return json_response(200, j);
}

int default_port() {
    if (const char* env = std::getenv("CAMFORGE_PORT")) {
        char* end = nullptr;
        const long port = std::strtol(env, &end, 10);
        if (end && *end == '\0' && port > 0 && port < 65536) return static_cast<int>(port);
    }
    return 8080;
}

}  // namespace camforge
