#pragma once

#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "camforge/workflow.hpp"

namespace camforge {

using Generator = std::function<WorkflowOutput(const TriangleMesh&, const WorkflowParams&)>;

struct WorkflowFilter {
    /// Whitespace-separated terms, all of which must occur (case-insensitive)
    /// in the name or category.
    std::string keywords;
    /// Minimum product ratings.
    std::map<std::string, int> min_ratings;
    /// Required structure flags.
    std::map<std::string, bool> structure;
    /// Machines available to the user; a workflow passes when it needs nothing outside this set.
    std::optional<std::vector<std::string>> machines;

    bool empty() const;
};

std::vector<WorkflowDescriptor> filter_workflows(const std::vector<WorkflowDescriptor>& all,
                                                 const WorkflowFilter& filter);

struct ComparisonRequest {
    std::string workflow_id;
    WorkflowParams params;
};

struct ComparisonRow {
    WorkflowDescriptor descriptor;
    ComparisonMetrics metrics;
    std::vector<Warning> warnings;
};

class WorkflowRegistry {
public:
    WorkflowRegistry() = default;
    WorkflowRegistry(const WorkflowRegistry&) = delete;
    WorkflowRegistry& operator=(const WorkflowRegistry&) = delete;

    /// Throws DuplicateId.
    void register_workflow(WorkflowDescriptor descriptor, Generator generator);

    /// Descriptors in registration order.
    std::vector<WorkflowDescriptor> list() const;
    std::vector<WorkflowDescriptor> filter(const WorkflowFilter& filter) const;
    bool contains(const std::string& id) const;
    /// Throws UnknownWorkflow.
    WorkflowDescriptor descriptor(const std::string& id) const;

    /// Resolves parameters against the schema, runs the generator and checks
    /// the output invariants. Throws UnknownWorkflow or ParamOutOfRange.
    WorkflowOutput generate(const std::string& id, const TriangleMesh& mesh, const WorkflowParams& params) const;

    std::vector<ComparisonRow> compare(const TriangleMesh& mesh, const std::vector<ComparisonRequest>& requests) const;

private:
    struct Entry {
        WorkflowDescriptor descriptor;
        Generator generator;
    };
    const Entry& find(const std::string& id) const;

    mutable std::shared_mutex mutex_;
    std::vector<Entry> entries_;
};

}  // namespace camforge
