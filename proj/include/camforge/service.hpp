#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camforge/registry.hpp"

namespace camforge {

// Model store -----------------------------------------------------------------

struct StoredModel {
    std::string id;
    TriangleMesh mesh;
    MeshStats stats;
    std::chrono::system_clock::time_point uploaded_at;
};

/// Uploaded meshes by opaque id ("m000001", ...). With a directory, every
/// upload is also written there as "<id>.stl" and reloaded on startup.
class ModelStore {
public:
    explicit ModelStore(std::optional<std::filesystem::path> dir = std::nullopt);

    /// Parses and validates the STL; throws the parse error unchanged.
    std::shared_ptr<const StoredModel> add(std::string_view stl_bytes);
    /// Throws UnknownModel.
    std::shared_ptr<const StoredModel> get(const std::string& id) const;
    std::size_t size() const;

private:
    std::optional<std::filesystem::path> dir_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const StoredModel>> models_;
    std::size_t next_ = 1;
};

// JSON mapping ------------------------------------------------------------------

using Json = nlohmann::ordered_json;

Json to_json(const MeshStats& stats);
Json to_json(const ParamSpec& spec);
Json to_json(const WorkflowDescriptor& descriptor);
Json to_json(const Warning& warning);
Json to_json(const ComparisonMetrics& metrics);
Json to_json(const GuideStep& step);
Json param_value_json(const ParamValue& value);

/// Converts request parameters (numbers, booleans or strings in the textual
/// form) to typed values against the descriptor's schema. Throws ParamOutOfRange.
WorkflowParams params_from_json(const WorkflowDescriptor& descriptor, const Json& params);

/// Parses a GET /workflows query. Throws ParseError on unknown keys or bad values.
WorkflowFilter filter_from_query(const std::multimap<std::string, std::string>& query);

// API reference -------------------------------------------------------------------

struct ApiField {
    std::string name;
    std::string type;
    std::string description;
};

struct ApiObject {
    std::string name;
    std::string description;
    std::vector<ApiField> fields;
};

struct ApiEndpoint {
    std::string method;
    std::string path;
    std::string summary;
    std::string request;
    std::string response;
    std::string errors;
};

const std::vector<ApiObject>& api_objects();
const std::vector<ApiEndpoint>& api_endpoints();
/// Markdown reference; docs/API.md is this text.
std::string render_api_reference();

// Service -----------------------------------------------------------------------

struct HttpRequest {
    std::string method;
    std::string path;
    std::multimap<std::string, std::string> query;
    std::string body;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
    std::map<std::string, std::string> headers;
};

struct ServiceOptions {
    std::optional<std::filesystem::path> store_dir;
    std::size_t cache_entries = 64;
};

/// Transport-independent request handling; run_server binds it to HTTP.
class Service {
public:
    Service(const WorkflowRegistry& registry, ServiceOptions options = {});

    HttpResponse handle(const HttpRequest& request);

    HttpResponse upload_model(const std::string& body);
    HttpResponse list_workflows(const std::multimap<std::string, std::string>& query) const;
    HttpResponse create_preview(const std::string& body);
    HttpResponse create_export(const std::string& body);
    HttpResponse health() const;

    const ModelStore& store() const { return store_; }

private:
    struct Job {
        std::shared_ptr<const StoredModel> model;
        WorkflowDescriptor descriptor;
        WorkflowParams params;
        std::string key;
    };
    Job parse_job(const std::string& body) const;
    std::optional<HttpResponse> cached(const std::string& key) const;
    void remember(const std::string& key, const HttpResponse& response);

    const WorkflowRegistry& registry_;
    ServiceOptions options_;
    ModelStore store_;
    mutable std::mutex cache_mutex_;
    std::map<std::string, HttpResponse> cache_;
    std::vector<std::string> cache_order_;
};

/// Maps an error to its HTTP status and JSON error body.
HttpResponse error_response(const std::exception& error);

/// Port from CAMFORGE_PORT, else 8080.
int default_port();

/// HTTP binding of a Service. listen() blocks until stop() is called from
/// another thread.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds an ephemeral port and returns it, or -1.
    int bind_any_port(const std::string& host);
    bool bind(const std::string& host, int port);
    /// Serves on the bound socket.
    bool listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Serves until the process stops. Returns false when the port cannot be bound.
bool run_server(Service& service, const std::string& host, int port);

}  // namespace camforge
