#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace camforge {

enum class ParamType { Length, Count, Angle, Enum, Flag, Ratio };

std::string_view param_type_name(ParamType type);

using ParamValue = std::variant<double, std::int64_t, bool, std::string>;
using WorkflowParams = std::map<std::string, ParamValue>;

struct ParamSpec {
    std::string name;
    ParamType type = ParamType::Length;
    ParamValue default_value;
    double min = 0.0;
    double max = 0.0;
    bool min_exclusive = false;
    std::vector<std::string> choices;
    std::string description;

    /// Human-readable legal range, e.g. "(0, 100] mm" or "one of {x_only, x_and_y}".
    std::string legal_range() const;
};

std::string format_param_value(const ParamValue& value);

/// Parses the textual form used by `--param k=v` and query strings.
ParamValue parse_param_text(const ParamSpec& spec, std::string_view text);

/// Converts a loosely typed value (say, a JSON number 3.0 for a count) to the
/// spec's type and checks its range. Throws ParamOutOfRange.
ParamValue coerce_param(const ParamSpec& spec, const ParamValue& value);

/// Fills defaults and validates every entry; unknown names are rejected.
WorkflowParams resolve_params(const std::vector<ParamSpec>& schema, const WorkflowParams& given);

double param_number(const WorkflowParams& params, const std::string& name);
std::int64_t param_count(const WorkflowParams& params, const std::string& name);
bool param_flag(const WorkflowParams& params, const std::string& name);
const std::string& param_text(const WorkflowParams& params, const std::string& name);

/// Throws ParamOutOfRange for `name` with the given explanation.
[[noreturn]] void reject_param(const std::string& name, const std::string& why);

}  // namespace camforge
