#include <json.hpp>

#include "camforge/error.hpp"
#include "camforge/workflows.hpp"

namespace camforge {

namespace detail {
extern const char* const kDescriptorJson;
}

namespace {

using GenFn = WorkflowOutput (*)(const TriangleMesh&, const WorkflowParams&, const DocLinks&);

struct Builtin {
    const char* id;
    std::vector<ParamSpec> (*schema)();
    GenFn generate;
};

const std::vector<Builtin>& builtins() {
    static const std::vector<Builtin> list{
        {"stacked-slices", stacked_slices_schema, gen_stacked_slices},
        {"interlocking", interlocking_schema, gen_interlocking},
        {"stacked-mold", stacked_mold_schema, gen_stacked_mold},
        {"wire-mesh", wire_mesh_schema, gen_wire_mesh},
        {"hotwire-foam", hotwire_schema, gen_hotwire},
    };
    return list;
}

}  // namespace

std::vector<WorkflowDescriptor> foundational_descriptors() {
    const auto doc = nlohmann::json::parse(detail::kDescriptorJson);
    std::vector<WorkflowDescriptor> out;
    for (const Builtin& b : builtins()) {
        const auto it = std::find_if(doc.begin(), doc.end(), [&](const auto& d) { return d.at("id") == b.id; });
        if (it == doc.end()) throw Error(ErrorCode::InvariantViolation, std::string("no descriptor data for ") + b.id);
        WorkflowDescriptor d;
        d.id = b.id;
        d.name = it->at("name").get<std::string>();
        d.category = it->at("category").get<std::string>();
        d.machines = it->at("machines").get<std::vector<std::string>>();
        d.dimensions.product = it->at("product").get<std::map<std::string, int>>();
        d.dimensions.structure = it->at("structure").get<std::map<std::string, bool>>();
        d.dimensions.machine = d.machines;
        d.doc_links = it->at("doc_links").get<std::vector<std::string>>();
        d.param_schema = b.schema();
        out.push_back(std::move(d));
    }
    return out;
}

void register_foundational(WorkflowRegistry& registry) {
    const auto descriptors = foundational_descriptors();
    for (std::size_t i = 0; i < descriptors.size(); ++i) {
        const GenFn fn = builtins()[i].generate;
        DocLinks links = descriptors[i].doc_links;
        registry.register_workflow(descriptors[i], [fn, links](const TriangleMesh& mesh, const WorkflowParams& params) {
            return fn(mesh, params, links);
        });
    }
}

const WorkflowRegistry& default_registry() {
    static const WorkflowRegistry& registry = []() -> const WorkflowRegistry& {
        static WorkflowRegistry r;
        register_foundational(r);
        return r;
    }();
    return registry;
}

}  // namespace camforge
