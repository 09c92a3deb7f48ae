#include <charconv>
#include <string>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/export.hpp"

namespace camforge {

// Layout:
//   camforge-guide
//   schema: 1
//   workflow: <id>
//   name: <display name>
//   param: <name>=<value>        (one per parameter, sorted)
//   steps: <n>
//   <blank line>
//   step: <index>
//   title: ...
//   body: ...                    (newlines written as \n, backslashes as \\)
//   artifact: / link: / tool:    (zero or more each)
//   end

namespace {

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (c == '\\') out += "\\\\";
        else if (c == '\n') out += "\\n";
        else if (c == '\r') out += "\\r";
        else out += c;
    }
    return out;
}

std::string unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (++i == s.size()) throw Error(ErrorCode::ParseError, "dangling escape");
        if (s[i] == 'n') out += '\n';
        else if (s[i] == 'r') out += '\r';
        else if (s[i] == '\\') out += '\\';
        else throw Error(ErrorCode::ParseError, fmt::format("unknown escape \\{}", s[i]));
    }
    return out;
}

}  // namespace

std::string export_guide_manifest(const StepManifest& guide, const WorkflowDescriptor& descriptor,
                                  const WorkflowParams& params) {
    std::string out = "camforge-guide\nschema: 1\n";
    out += fmt::format("workflow: {}\nname: {}\n", escape(descriptor.id), escape(descriptor.name));
    for (const auto& [name, value] : params) out += fmt::format("param: {}={}\n", escape(name), escape(format_param_value(value)));
    out += fmt::format("steps: {}\n", guide.steps.size());
    for (const auto& step : guide.steps) {
        out += fmt::format("\nstep: {}\ntitle: {}\nbody: {}\n", step.index, escape(step.title), escape(step.body));
        for (const auto& a : step.artifact_refs) out += fmt::format("artifact: {}\n", escape(a));
        for (const auto& l : step.external_links) out += fmt::format("link: {}\n", escape(l));
        for (const auto& t : step.tools) out += fmt::format("tool: {}\n", escape(t));
        out += "end\n";
    }
    return out;
}

ParsedManifest parse_guide_manifest(std::string_view text) {
    ParsedManifest m;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    auto next_line = [&](std::string_view& line) {
        if (pos >= text.size()) return false;
        const std::size_t nl = text.find('\n', pos);
        line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        return true;
    };
    auto fail = [&](const std::string& why) { throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", line_no, why)); };
    auto split = [&](std::string_view line, std::string_view& key) {
        const std::size_t colon = line.find(": ");
        if (colon == std::string_view::npos) {
            if (line == "end") {
                key = line;
                return std::string_view{};
            }
            fail(fmt::format("expected 'key: value', got '{}'", line));
        }
        key = line.substr(0, colon);
        return line.substr(colon + 2);
    };
    auto to_int = [&](std::string_view s) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) fail(fmt::format("bad integer '{}'", s));
        return v;
    };

    std::string_view line, key;
    if (!next_line(line) || line != "camforge-guide") fail("missing 'camforge-guide' magic line");
    int declared_steps = -1;
    GuideStep* step = nullptr;
    while (next_line(line)) {
        if (line.empty()) continue;
        const std::string_view value = split(line, key);
        if (!step) {
            if (key == "schema") m.schema = to_int(value);
            else if (key == "workflow") m.workflow_id = unescape(value);
            else if (key == "name") m.workflow_name = unescape(value);
            else if (key == "param") {
                const std::string kv = unescape(value);
                const std::size_t eq = kv.find('=');
                if (eq == std::string::npos) fail("param without '='");
                m.params.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
            } else if (key == "steps") declared_steps = to_int(value);
            else if (key == "step") {
                m.guide.steps.push_back({});
                step = &m.guide.steps.back();
                step->index = to_int(value);
            } else fail(fmt::format("unexpected header key '{}'", key));
            continue;
        }
        if (key == "title") step->title = unescape(value);
        else if (key == "body") step->body = unescape(value);
        else if (key == "artifact") step->artifact_refs.push_back(unescape(value));
        else if (key == "link") step->external_links.push_back(unescape(value));
        else if (key == "tool") step->tools.push_back(unescape(value));
        else if (key == "end") step = nullptr;
        else fail(fmt::format("unexpected step key '{}'", key));
    }
    if (step) fail("step block not terminated by 'end'");
    if (m.schema != 1) throw Error(ErrorCode::ParseError, fmt::format("unsupported schema {}", m.schema));
    if (declared_steps != static_cast<int>(m.guide.steps.size())) {
        throw Error(ErrorCode::ParseError,
                    fmt::format("header declares {} steps, found {}", declared_steps, m.guide.steps.size()));
    }
    return m;
}

}  // namespace camforge
