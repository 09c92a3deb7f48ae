#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

#include <doctest.h>
#include <httplib.h>

#include "camforge/error.hpp"
#include "camforge/export.hpp"
#include "camforge/service.hpp"
#include "camforge/workflows.hpp"
#include "fixtures.hpp"

using namespace camforge;

namespace {

HttpRequest post(std::string path, std::string body) { return {"POST", std::move(path), {}, std::move(body)}; }
HttpRequest get(std::string path, std::multimap<std::string, std::string> query = {}) {
    return {"GET", std::move(path), std::move(query), ""};
}

Json body_of(const HttpResponse& r) { return Json::parse(r.body); }

std::string upload(Service& s, const TriangleMesh& mesh) {
    const auto r = s.handle(post("/models", write_stl(mesh, false)));
    REQUIRE(r.status == 201);
    return body_of(r)["model_id"].get<std::string>();
}

std::string job(const std::string& model, const std::string& wf, Json params = Json::object()) {
    return Json{{"model_id", model}, {"workflow_id", wf}, {"params", params}}.dump();
}

std::set<std::string> keys(const Json& j) {
    std::set<std::string> out;
    for (auto it = j.begin(); it != j.end(); ++it) out.insert(it.key());
    return out;
}

std::set<std::string> documented(const std::string& object, bool with_optional = true) {
    for (const auto& o : api_objects()) {
        if (o.name != object) continue;
        std::set<std::string> out;
        for (const auto& f : o.fields) {
            if (with_optional || f.type.find("(optional)") == std::string::npos) out.insert(f.name);
        }
        return out;
    }
    FAIL("undocumented object " << object);
    return {};
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("camforge_" + name + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("upload returns an id and mesh statistics") {
    Service s(default_registry());
    const auto r = s.handle(post("/models", write_stl(fixtures::cube(10), false)));
    CHECK(r.status == 201);
    const Json j = body_of(r);
    CHECK(j["model_id"].get<std::string>() == "m000001");
    CHECK(j["triangle_count"] == 12);
    CHECK(j["vertex_count"] == 8);
    CHECK(j["stats"]["volume"].get<double>() == doctest::Approx(1000.0).epsilon(1e-9));
    CHECK(j["stats"]["watertight"] == true);

    // ASCII uploads work the same way.
    const auto ascii = s.handle(post("/models", write_stl(fixtures::cube(10), true)));
    CHECK(ascii.status == 201);
    CHECK(body_of(ascii)["model_id"] != j["model_id"]);
    CHECK(s.store().size() == 2);
}

TEST_CASE("upload errors are 400 with the parse error code") {
    Service s(default_registry());
    std::string stl = write_stl(fixtures::cube(10), false);
    stl.resize(stl.size() - 30);
    const auto r = s.handle(post("/models", stl));
    CHECK(r.status == 400);
    CHECK(body_of(r)["error"]["code"] == "TruncatedFile");

    const auto empty = s.handle(post("/models", ""));
    CHECK(empty.status == 400);
    CHECK(s.store().size() == 0);
}

TEST_CASE("workflow listing and filters") {
    Service s(default_registry());
    const auto all = body_of(s.handle(get("/workflows")))["workflows"];
    CHECK(all.size() == 5);

    const auto laser = s.handle(get("/workflows", {{"machines", "laser_cutter"}}));
    CHECK(laser.status == 200);
    const auto lj = body_of(laser)["workflows"];
    CHECK(lj.size() > 0);
    CHECK(lj.size() < all.size());
    for (const auto& d : lj) CHECK(d["machines"] == Json::array({"laser_cutter"}));

    const auto none = s.handle(get("/workflows", {{"keyword", "zzz"}}));
    CHECK(none.status == 200);
    CHECK(body_of(none)["workflows"].empty());

    // Ratings and flags compose with AND, matching the registry filter.
    const auto combo = body_of(s.handle(get("/workflows", {{"load_bearing", "2"}, {"modular", "true"}})))["workflows"];
    WorkflowFilter f;
    f.min_ratings["load_bearing"] = 2;
    f.structure["modular"] = true;
    const auto expect = default_registry().filter(f);
    REQUIRE(combo.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(combo[i]["id"] == expect[i].id);

    CHECK(s.handle(get("/workflows", {{"colour", "red"}})).status == 400);
    CHECK(s.handle(get("/workflows", {{"load_bearing", "9"}})).status == 400);
    CHECK(s.handle(get("/workflows", {{"modular", "maybe"}})).status == 400);
}

TEST_CASE("preview of a box with stacked slices") {
    Service s(default_registry());
    const std::string id = upload(s, fixtures::box({0, 0, 0}, {40, 40, 10}));
    const auto r = s.handle(post("/previews", job(id, "stacked-slices", {{"layer_height", 2}})));
    REQUIRE(r.status == 200);
    const Json j = body_of(r);
    CHECK(j["preview"]["parts"].size() == 5);
    CHECK(j["metrics"]["part_count"] == 5);
    CHECK(j["params"]["layer_height"].get<double>() == 2.0);
    CHECK(j["params"]["kerf"].get<double>() == 0.1);
    CHECK(j["guide"].size() >= 2);
    CHECK(j["artifacts"].size() >= 1);
    // The embedded preview is the exporter's document.
    CHECK(parse_preview(j["preview"].dump()).size() == 5);

    // Text form of a parameter is accepted too.
    const auto text = s.handle(post("/previews", job(id, "stacked-slices", {{"layer_height", "2"}})));
    CHECK(text.body == r.body);
}

TEST_CASE("preview error statuses") {
    Service s(default_registry());
    const std::string id = upload(s, fixtures::cube(20));
    const auto wf = s.handle(post("/previews", job(id, "no-such")));
    CHECK(wf.status == 404);
    CHECK(body_of(wf)["error"]["code"] == "UnknownWorkflow");

    const auto model = s.handle(post("/previews", job("m999999", "stacked-slices")));
    CHECK(model.status == 404);
    CHECK(body_of(model)["error"]["code"] == "UnknownModel");

    const auto range = s.handle(post("/previews", job(id, "stacked-slices", {{"layer_height", -1}})));
    CHECK(range.status == 422);
    CHECK(body_of(range)["error"]["parameter"] == "layer_height");
    CHECK(keys(body_of(range)["error"]) == documented("ErrorDetail"));

    const auto unknown = s.handle(post("/previews", job(id, "stacked-slices", {{"thickness", 2}})));
    CHECK(unknown.status == 422);
    CHECK(body_of(unknown)["error"]["parameter"] == "thickness");

    const auto type = s.handle(post("/previews", job(id, "stacked-slices", {{"dowel_count", 1.5}})));
    CHECK(type.status == 422);

    CHECK(s.handle(post("/previews", "{not json")).status == 400);
    CHECK(s.handle(post("/previews", "[]")).status == 400);
    CHECK(s.handle(post("/previews", R"({"model_id": 3})")).status == 400);
}

TEST_CASE("tiny model wire mesh warns about minimum feature") {
    Service s(default_registry());
    const std::string id = upload(s, fixtures::icosphere(2.5, 2));
    const auto r = s.handle(post("/previews", job(id, "wire-mesh")));
    REQUIRE(r.status == 200);
    bool found = false;
    const Json warnings = body_of(r)["warnings"];
    for (const auto& w : warnings) found = found || w["code"] == "MinFeature";
    CHECK(found);
}

TEST_CASE("export returns a deterministic zip bundle") {
    Service s(default_registry());
    const std::string id = upload(s, fixtures::cube(40));
    const auto a = s.handle(post("/exports", job(id, "stacked-slices")));
    REQUIRE(a.status == 200);
    CHECK(a.content_type == "application/zip");
    CHECK(a.headers.at("Content-Disposition") == "attachment; filename=\"" + id + "-stacked-slices.zip\"");
    const auto entries = read_zip(a.body);
    std::set<std::string> names;
    for (const auto& e : entries) names.insert(e.name);
    CHECK(names.count("GUIDE.txt") == 1);
    CHECK(names.count("preview.json") == 1);
    CHECK(names.count("params.txt") == 1);

    // A fresh service (no cache) produces the same bytes.
    Service t(default_registry());
    const std::string id2 = upload(t, fixtures::cube(40));
    REQUIRE(id2 == id);
    CHECK(t.handle(post("/exports", job(id2, "stacked-slices"))).body == a.body);
    CHECK(s.handle(post("/exports", job(id, "stacked-slices"))).body == a.body);

    CHECK(s.handle(post("/exports", job("m424242", "stacked-slices"))).status == 404);
}

TEST_CASE("cache does not change responses") {
    ServiceOptions no_cache;
    no_cache.cache_entries = 0;
    ServiceOptions tiny;
    tiny.cache_entries = 1;
    Service plain(default_registry(), no_cache);
    Service cached(default_registry(), tiny);
    const std::string a = upload(plain, fixtures::cube(30));
    REQUIRE(upload(cached, fixtures::cube(30)) == a);
    for (const char* wf : {"stacked-slices", "hotwire-foam", "stacked-slices", "interlocking", "stacked-slices"}) {
        CHECK(plain.handle(post("/previews", job(a, wf))).body == cached.handle(post("/previews", job(a, wf))).body);
    }
}

TEST_CASE("request order does not change responses") {
    Service s(default_registry());
    Service t(default_registry());
    const std::string a = upload(s, fixtures::cube(30));
    REQUIRE(upload(t, fixtures::cube(30)) == a);
    const std::vector<std::string> wfs{"stacked-slices", "interlocking", "stacked-mold", "wire-mesh", "hotwire-foam"};
    std::map<std::string, std::string> forward, backward;
    for (const auto& wf : wfs) forward[wf] = s.handle(post("/previews", job(a, wf))).body;
    for (auto it = wfs.rbegin(); it != wfs.rend(); ++it) backward[*it] = t.handle(post("/previews", job(a, *it))).body;
    CHECK(forward == backward);
}

TEST_CASE("health and routing") {
    Service s(default_registry());
    const auto h = s.handle(get("/healthz"));
    CHECK(h.status == 200);
    CHECK(body_of(h)["status"] == "ok");
    CHECK(body_of(h)["workflows"] == 5);

    const auto wrong = s.handle(get("/previews"));
    CHECK(wrong.status == 405);
    CHECK(wrong.headers.at("Allow") == "POST");
    CHECK(s.handle(post("/healthz", "")).status == 405);
    const auto missing = s.handle(get("/nowhere"));
    CHECK(missing.status == 404);
    CHECK(body_of(missing)["error"]["code"] == "NotFound");
}

TEST_CASE("directory-backed store survives a restart") {
    const auto dir = temp_dir("store");
    std::string id;
    std::string first;
    {
        ServiceOptions opts;
        opts.store_dir = dir;
        Service s(default_registry(), opts);
        id = upload(s, fixtures::cube(20));
        upload(s, fixtures::icosphere(10, 2));
        first = s.handle(post("/previews", job(id, "stacked-slices"))).body;
    }
    ServiceOptions opts;
    opts.store_dir = dir;
    Service s(default_registry(), opts);
    CHECK(s.store().size() == 2);
    CHECK(s.handle(post("/previews", job(id, "stacked-slices"))).body == first);
    // New ids continue after the reloaded ones.
    CHECK(upload(s, fixtures::cube(5)) == "m000003");

    Service memory_only(default_registry());
    CHECK(memory_only.store().size() == 0);
    std::filesystem::remove_all(dir);
}

TEST_CASE("concurrent previews of one model are identical") {
    ServiceOptions opts;
    opts.cache_entries = 0;
    Service s(default_registry(), opts);
    const std::string id = upload(s, fixtures::icosphere(15, 2));
    std::vector<std::future<std::string>> futures;
    for (int i = 0; i < 6; ++i) {
        const char* wf = i % 2 ? "stacked-slices" : "wire-mesh";
        futures.push_back(std::async(std::launch::async, [&s, id, wf] {
            return s.handle(post("/previews", job(id, wf))).body;
        }));
    }
    std::vector<std::string> bodies;
    for (auto& f : futures) bodies.push_back(f.get());
    for (std::size_t i = 2; i < bodies.size(); ++i) CHECK(bodies[i] == bodies[i % 2]);
    CHECK(bodies[0] != bodies[1]);
}

TEST_CASE("port comes from the environment") {
    ::setenv("CAMFORGE_PORT", "9123", 1);
    CHECK(default_port() == 9123);
    ::setenv("CAMFORGE_PORT", "not-a-port", 1);
    CHECK(default_port() == 8080);
    ::unsetenv("CAMFORGE_PORT");
    CHECK(default_port() == 8080);
}

TEST_CASE("HTTP round trip") {
    Service service(default_registry());
    HttpServer server(service);
    const int port = server.bind_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread thread([&] { server.listen(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    const auto health = client.Get("/healthz");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

    const auto up = client.Post("/models", write_stl(fixtures::cube(40), false), "application/octet-stream");
    REQUIRE(up);
    CHECK(up->status == 201);
    const std::string id = Json::parse(up->body)["model_id"];

    const auto list = client.Get("/workflows?machines=laser_cutter,wire_bender&keyword=wire");
    REQUIRE(list);
    CHECK(list->status == 200);
    const Json wfs = Json::parse(list->body)["workflows"];
    REQUIRE(wfs.size() == 1);
    CHECK(wfs[0]["id"] == "wire-mesh");

    const auto preview = client.Post("/previews", job(id, "stacked-slices", {{"layer_height", 3}}), "application/json");
    REQUIRE(preview);
    CHECK(preview->status == 200);
    CHECK(Json::parse(preview->body)["metrics"]["part_count"] == 14);

    const auto bad = client.Post("/previews", job(id, "stacked-slices", {{"kerf", 99}}), "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);

    const auto zip = client.Post("/exports", job(id, "stacked-slices"), "application/json");
    REQUIRE(zip);
    CHECK(zip->status == 200);
    CHECK(zip->get_header_value("Content-Type") == "application/zip");
    CHECK(zip->get_header_value("Content-Disposition") == "attachment; filename=\"" + id + "-stacked-slices.zip\"");
    CHECK(zip->body == service.handle(post("/exports", job(id, "stacked-slices"))).body);

    const auto missing = client.Get("/nowhere");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    const auto preflight = client.Options("/previews");
    REQUIRE(preflight);
    CHECK(preflight->status == 204);

    server.stop();
    thread.join();
}

TEST_CASE("API reference is current") {
    std::ifstream in(std::string(CAMFORGE_SOURCE_DIR) + "/docs/API.md", std::ios::binary);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK_MESSAGE(buf.str() == render_api_reference(), "regenerate with: camforge_apidoc > docs/API.md");

    const std::string text = render_api_reference();
    for (const auto& o : api_objects()) CHECK(text.find(o.name) != std::string::npos);
    for (const auto& e : api_endpoints()) CHECK(text.find(e.method + " " + e.path) != std::string::npos);
}

TEST_CASE("serialized objects have exactly the documented fields") {
    Service s(default_registry());
    const Json up = body_of(s.handle(post("/models", write_stl(fixtures::cube(40), false))));
    CHECK(keys(up) == documented("UploadResponse"));
    CHECK(keys(up["stats"]) == documented("MeshStats"));

    const Json list = body_of(s.handle(get("/workflows")));
    CHECK(keys(list) == documented("WorkflowList"));
    for (const auto& d : list["workflows"]) {
        CHECK(keys(d) == documented("WorkflowDescriptor"));
        CHECK(keys(d["dimensions"]) == documented("Dimensions"));
        for (const auto& p : d["param_schema"]) CHECK(keys(p) == documented("ParamSpec"));
    }

    const std::string id = up["model_id"];
    // Request bodies use the JobRequest fields.
    const Json request = Json::parse(job(id, "stacked-mold"));
    CHECK(keys(request) == documented("JobRequest"));

    const Json prev = body_of(s.handle(post("/previews", request.dump())));
    CHECK(keys(prev) == documented("PreviewResponse"));
    CHECK(keys(prev["preview"]) == documented("PreviewDocument"));
    for (const auto& p : prev["preview"]["parts"]) CHECK(keys(p) == documented("PreviewPart"));
    CHECK(keys(prev["metrics"]) == documented("ComparisonMetrics"));
    for (const auto& g : prev["guide"]) CHECK(keys(g) == documented("GuideStep"));
    for (const auto& a : prev["artifacts"]) CHECK(keys(a) == documented("ArtifactInfo"));

    const std::string tiny = body_of(s.handle(post("/models", write_stl(fixtures::icosphere(2.5, 2), false))))["model_id"];
    const Json warned = body_of(s.handle(post("/previews", job(tiny, "wire-mesh"))));
    REQUIRE(!warned["warnings"].empty());
    for (const auto& w : warned["warnings"]) CHECK(keys(w) == documented("Warning"));

    const Json err = body_of(s.handle(post("/previews", job("m999999", "stacked-mold"))));
    CHECK(keys(err) == documented("ErrorResponse"));
    CHECK(keys(err["error"]) == documented("ErrorDetail", false));

    CHECK(keys(body_of(s.handle(get("/healthz")))) == documented("Health"));
}
