#include <httplib.h>

#include "camforge/service.hpp"

namespace camforge {

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
    auto& server = impl_->server;
    auto bridge = [&service](const httplib::Request& req, httplib::Response& res) {
        HttpRequest r{req.method, req.path, {}, req.body};
        for (const auto& [k, v] : req.params) r.query.emplace(k, v);
        const HttpResponse out = service.handle(r);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_content(out.body, out.content_type);
    };
    // Everything else also goes through the service so unknown paths and
    // wrong methods get the same JSON errors as the in-process interface.
    server.Post(R"(/.*)", bridge);
    server.Get(R"(/.*)", bridge);
    server.Put(R"(/.*)", bridge);
    server.Delete(R"(/.*)", bridge);
    server.Patch(R"(/.*)", bridge);
    // Browsers preflight JSON POSTs from another origin.
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    server.set_payload_max_length(256u << 20);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool HttpServer::bind(const std::string& host, int port) { return impl_->server.bind_to_port(host, port); }

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

bool run_server(Service& service, const std::string& host, int port) {
    HttpServer server(service);
    return server.bind(host, port) && server.listen();
}

}  // namespace camforge
