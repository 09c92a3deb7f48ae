#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "camforge/cli.hpp"
#include "camforge/error.hpp"
#include "camforge/export.hpp"
#include "camforge/service.hpp"
#include "camforge/workflows.hpp"

namespace camforge {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, fmt::format("cannot open '{}'", path));
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::InvariantViolation, fmt::format("cannot write '{}'", path.string()));
}

WorkflowDescriptor find_workflow(const std::string& id) {
    if (!default_registry().contains(id)) {
        std::vector<std::string> ids;
        for (const auto& d : default_registry().list()) ids.push_back(d.id);
        throw UsageError(fmt::format("unknown workflow '{}' (available: {})", id, fmt::join(ids, ", ")));
    }
    return default_registry().descriptor(id);
}

// "--param k=v" pairs; range and type problems name the parameter and its legal range.
WorkflowParams parse_params(const WorkflowDescriptor& d, const std::vector<std::string>& pairs) {
    WorkflowParams out;
    for (const auto& pair : pairs) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError(fmt::format("--param expects name=value, got '{}'", pair));
        const std::string name = pair.substr(0, eq);
        const ParamSpec* spec = d.find_param(name);
        if (!spec) {
            std::vector<std::string> names;
            for (const auto& p : d.param_schema) names.push_back(p.name);
            throw UsageError(fmt::format("'{}' has no parameter '{}' (parameters: {})", d.id, name, fmt::join(names, ", ")));
        }
        try {
            out[name] = coerce_param(*spec, parse_param_text(*spec, pair.substr(eq + 1)));
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
    }
    return resolve_params(d.param_schema, out);
}

TriangleMesh load_mesh(const std::string& path) {
    TriangleMesh mesh = parse_stl(read_file(path));
    mesh.validate();
    mesh.name = std::filesystem::path(path).stem().string();
    return mesh;
}

void print_warnings(std::ostream& err, const std::vector<Warning>& warnings, const std::string& prefix = "") {
    for (const auto& w : warnings) {
        fmt::print(err, "WARN[{}]: {}{} ({})\n", w.code, prefix, w.message, severity_name(w.severity));
    }
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt::format("{:.1f}", *v) : "-"; }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
}

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
        width.resize(std::max(width.size(), r.size()));
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
    }
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t i = 0; i < r.size(); ++i) {
            line += r[i];
            if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
        }
        out << line << '\n';
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fabrication workflow generator: turns an STL model into machine files and a build guide", "camforge"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "List workflows, optionally filtered");
    std::vector<std::string> machines;
    std::string keyword;
    std::vector<std::string> ratings, structure;
    list->add_option("--machines", machines, "Available machines; hides workflows that need others")->delimiter(',');
    list->add_option("--keyword", keyword, "Words that must occur in the name or category");
    list->add_option("--rating", ratings, "Minimum product rating, e.g. load_bearing=2");
    list->add_option("--structure", structure, "Required structure flag, e.g. modular or modular=false");

    auto* describe = app.add_subcommand("describe", "Show a workflow's parameters and dimensions");
    std::string wf;
    describe->add_option("workflow", wf)->required();

    std::string stl, output, format = "table";
    std::vector<std::string> params;
    auto* preview = app.add_subcommand("preview", "Write the preview document for a model");
    preview->add_option("stl", stl)->required();
    preview->add_option("workflow", wf)->required();
    preview->add_option("--param", params, "name=value (repeatable)");
    preview->add_option("-o,--output", output, "Preview file")->required();

    auto* compile = app.add_subcommand("compile", "Write machine files, guide and preview into a directory");
    compile->add_option("stl", stl)->required();
    compile->add_option("workflow", wf)->required();
    compile->add_option("--param", params, "name=value (repeatable)");
    compile->add_option("-o,--output", output, "Output directory")->required();

    auto* compare = app.add_subcommand("compare", "Print metrics of several workflows side by side");
    std::vector<std::string> workflows;
    compare->add_option("stl", stl)->required();
    compare->add_option("workflows", workflows)->required();
    compare->add_option("--format", format, "table or csv")->check(CLI::IsMember({"table", "csv"}));

    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    int port = default_port();
    std::string host = "0.0.0.0", store_dir;
    serve->add_option("--port", port, "Port (default: CAMFORGE_PORT or 8080)")->check(CLI::Range(1, 65535));
    serve->add_option("--host", host, "Interface to bind");
    serve->add_option("--store-dir", store_dir, "Keep uploaded models in this directory");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return 2;
    }

    const auto& reg = default_registry();
    try {
        if (list->parsed()) {
            WorkflowFilter f;
            f.keywords = keyword;
            if (!machines.empty()) f.machines = machines;
            std::multimap<std::string, std::string> q;
            for (const auto& r : ratings) {
                const auto eq = r.find('=');
                if (eq == std::string::npos) throw UsageError(fmt::format("--rating expects dimension=N, got '{}'", r));
                q.emplace(r.substr(0, eq), r.substr(eq + 1));
            }
            for (const auto& s : structure) {
                const auto eq = s.find('=');
                q.emplace(s.substr(0, eq), eq == std::string::npos ? "true" : s.substr(eq + 1));
            }
            try {
                const WorkflowFilter dims = filter_from_query(q);
                f.min_ratings = dims.min_ratings;
                f.structure = dims.structure;
            } catch (const Error& e) {
                throw UsageError(e.what());
            }
            for (const auto& m : machines) {
                if (std::find(kMachineTags.begin(), kMachineTags.end(), m) == kMachineTags.end()) {
                    throw UsageError(fmt::format("unknown machine '{}'", m));
                }
            }
            std::vector<std::vector<std::string>> rows{{"ID", "CATEGORY", "MACHINES", "NAME"}};
            for (const auto& d : reg.filter(f)) rows.push_back({d.id, d.category, fmt::format("{}", fmt::join(d.machines, ",")), d.name});
            print_table(out, rows);
            return 0;
        }
        if (describe->parsed()) {
            const auto d = find_workflow(wf);
            fmt::print(out, "{} ({})\ncategory: {}\nmachines: {}\n", d.name, d.id, d.category, fmt::join(d.machines, ", "));
            for (const auto& [k, v] : d.dimensions.product) fmt::print(out, "rating {}: {}\n", k, v);
            for (const auto& [k, v] : d.dimensions.structure) fmt::print(out, "structure {}: {}\n", k, v ? "yes" : "no");
            for (const auto& l : d.doc_links) fmt::print(out, "link: {}\n", l);
            std::vector<std::vector<std::string>> rows{{"PARAMETER", "TYPE", "DEFAULT", "RANGE", "DESCRIPTION"}};
            for (const auto& p : d.param_schema) {
                rows.push_back({p.name, std::string(param_type_name(p.type)), format_param_value(p.default_value),
                                p.legal_range(), p.description});
            }
            out << '\n';
            print_table(out, rows);
            return 0;
        }
        if (serve->parsed()) {
            ServiceOptions opts;
            if (!store_dir.empty()) opts.store_dir = store_dir;
            Service service(reg, opts);
            fmt::print(out, "listening on {}:{}\n", host, port);
            out.flush();
            if (!run_server(service, host, port)) {
                fmt::print(err, "error: cannot listen on {}:{}\n", host, port);
                return 1;
            }
            return 0;
        }

        // The remaining commands read a model; validate arguments before touching it.
        if (compare->parsed()) {
            std::vector<ComparisonRequest> reqs;
            for (const auto& id : workflows) reqs.push_back({find_workflow(id).id, {}});
            const TriangleMesh mesh = load_mesh(stl);
            const auto rows = reg.compare(mesh, reqs);
            std::vector<std::vector<std::string>> table{{"workflow", "part_count", "material_area", "material_volume",
                                                         "total_cut_length", "estimated_fidelity", "machine_set",
                                                         "warnings"}};
            for (const auto& r : rows) {
                const auto& m = r.metrics;
                table.push_back({r.descriptor.id, std::to_string(m.part_count), fmt_optional(m.material_area),
                                 fmt_optional(m.material_volume), fmt::format("{:.1f}", m.total_cut_length),
                                 fmt::format("{:.3f}", m.estimated_fidelity), fmt::format("{}", fmt::join(m.machine_set, " ")),
                                 std::to_string(r.warnings.size())});
                print_warnings(err, r.warnings, r.descriptor.id + ": ");
            }
            if (format == "csv") {
                for (const auto& row : table) {
                    std::string line;
                    for (std::size_t i = 0; i < row.size(); ++i) line += (i ? "," : "") + csv_field(row[i]);
                    out << line << '\n';
                }
            } else {
                print_table(out, table);
            }
            return 0;
        }

        const WorkflowDescriptor d = find_workflow(wf);
        const WorkflowParams resolved = parse_params(d, params);
        const TriangleMesh mesh = load_mesh(stl);
        const WorkflowOutput result = reg.generate(d.id, mesh, resolved);
        print_warnings(err, result.warnings);
        if (preview->parsed()) {
            write_file(output, export_preview(result.preview));
            fmt::print(out, "wrote {} ({} part(s))\n", output, result.preview.size());
        } else {
            std::filesystem::create_directories(output);
            const auto entries = bundle_entries(result, d, resolved);
            for (const auto& e : entries) write_file(std::filesystem::path(output) / e.name, e.bytes);
            fmt::print(out, "wrote {} file(s) to {}\n", entries.size(), output);
        }
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace camforge
