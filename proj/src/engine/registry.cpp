#include "camforge/registry.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <sstream>

#include <fmt/format.h>

#include "camforge/error.hpp"

namespace camforge {

bool WorkflowFilter::empty() const {
    return keywords.find_first_not_of(" \t\r\n") == std::string::npos && min_ratings.empty() && structure.empty() &&
           !machines.has_value();
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool matches(const WorkflowDescriptor& d, const WorkflowFilter& f) {
    const std::string haystack = lower(d.name + " " + d.category);
    std::istringstream terms(f.keywords);
    for (std::string term; terms >> term;) {
        if (haystack.find(lower(term)) == std::string::npos) return false;
    }
    for (const auto& [dim, min] : f.min_ratings) {
        const auto it = d.dimensions.product.find(dim);
        if ((it == d.dimensions.product.end() ? 0 : it->second) < min) return false;
    }
    for (const auto& [dim, want] : f.structure) {
        const auto it = d.dimensions.structure.find(dim);
        if ((it != d.dimensions.structure.end() && it->second) != want) return false;
    }
    if (f.machines) {
        for (const auto& m : d.machines) {
            if (m == "none") continue;
            if (std::find(f.machines->begin(), f.machines->end(), m) == f.machines->end()) return false;
        }
    }
    return true;
}

}  // namespace

std::vector<WorkflowDescriptor> filter_workflows(const std::vector<WorkflowDescriptor>& all, const WorkflowFilter& filter) {
    std::vector<WorkflowDescriptor> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out), [&](const auto& d) { return matches(d, filter); });
    return out;
}

void WorkflowRegistry::register_workflow(WorkflowDescriptor descriptor, Generator generator) {
    validate_descriptor(descriptor);
    std::unique_lock lock(mutex_);
    for (const auto& e : entries_) {
        if (e.descriptor.id == descriptor.id) {
            throw Error(ErrorCode::DuplicateId, fmt::format("workflow '{}' is already registered", descriptor.id));
        }
    }
    entries_.push_back({std::move(descriptor), std::move(generator)});
}

const WorkflowRegistry::Entry& WorkflowRegistry::find(const std::string& id) const {
    for (const auto& e : entries_) {
        if (e.descriptor.id == id) return e;
    }
    throw Error(ErrorCode::UnknownWorkflow, fmt::format("no workflow named '{}'", id));
}

std::vector<WorkflowDescriptor> WorkflowRegistry::list() const {
    std::shared_lock lock(mutex_);
    std::vector<WorkflowDescriptor> out;
    for (const auto& e : entries_) out.push_back(e.descriptor);
    return out;
}

std::vector<WorkflowDescriptor> WorkflowRegistry::filter(const WorkflowFilter& filter) const {
    return filter_workflows(list(), filter);
}

bool WorkflowRegistry::contains(const std::string& id) const {
    std::shared_lock lock(mutex_);
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.descriptor.id == id; });
}

WorkflowDescriptor WorkflowRegistry::descriptor(const std::string& id) const {
    std::shared_lock lock(mutex_);
    return find(id).descriptor;
}

WorkflowOutput WorkflowRegistry::generate(const std::string& id, const TriangleMesh& mesh,
                                          const WorkflowParams& params) const {
    Generator generator;
    WorkflowDescriptor descriptor;
    {
        std::shared_lock lock(mutex_);
        const Entry& e = find(id);
        generator = e.generator;
        descriptor = e.descriptor;
    }
    mesh.validate();
    const WorkflowParams resolved = resolve_params(descriptor.param_schema, params);
    WorkflowOutput out = generator(mesh, resolved);
    if (out.metrics.machine_set.empty()) out.metrics.machine_set = descriptor.machines;
    check_output(out);
    return out;
}

std::vector<ComparisonRow> WorkflowRegistry::compare(const TriangleMesh& mesh,
                                                     const std::vector<ComparisonRequest>& requests) const {
    for (const auto& r : requests) {
        if (!contains(r.workflow_id)) {
            throw Error(ErrorCode::UnknownWorkflow, fmt::format("no workflow named '{}'", r.workflow_id));
        }
    }
    std::vector<ComparisonRow> rows;
    for (const auto& r : requests) {
        WorkflowOutput out = generate(r.workflow_id, mesh, r.params);
        rows.push_back({descriptor(r.workflow_id), std::move(out.metrics), std::move(out.warnings)});
    }
    return rows;
}

}  // namespace camforge
