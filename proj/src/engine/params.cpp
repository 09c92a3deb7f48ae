#include "camforge/params.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "camforge/error.hpp"

namespace camforge {

std::string_view param_type_name(ParamType type) {
    switch (type) {
        case ParamType::Length: return "length";
        case ParamType::Count: return "count";
        case ParamType::Angle: return "angle";
        case ParamType::Enum: return "enum";
        case ParamType::Flag: return "flag";
        case ParamType::Ratio: return "ratio";
    }
    return "unknown";
}

std::string ParamSpec::legal_range() const {
    switch (type) {
        case ParamType::Enum: return fmt::format("one of {{{}}}", fmt::join(choices, ", "));
        case ParamType::Flag: return "true or false";
        case ParamType::Count: return fmt::format("integer in [{}, {}]", min, max);
        default: break;
    }
    const char* unit = type == ParamType::Length ? " mm" : type == ParamType::Angle ? " deg" : "";
    return fmt::format("{}{}, {}]{}", min_exclusive ? "(" : "[", min, max, unit);
}

std::string format_param_value(const ParamValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else {
                return fmt::format("{}", v);
            }
        },
        value);
}

void reject_param(const std::string& name, const std::string& why) {
    throw Error(ErrorCode::ParamOutOfRange, fmt::format("parameter '{}' {}", name, why));
}

namespace {

[[noreturn]] void out_of_range(const ParamSpec& spec, const std::string& shown) {
    reject_param(spec.name, fmt::format("= {} is outside the legal range {}", shown, spec.legal_range()));
}

double check_number(const ParamSpec& spec, double v) {
    if (!std::isfinite(v)) out_of_range(spec, fmt::format("{}", v));
    const bool low = spec.min_exclusive ? v <= spec.min : v < spec.min;
    if (low || v > spec.max) out_of_range(spec, fmt::format("{}", v));
    return v;
}

}  // namespace

ParamValue coerce_param(const ParamSpec& spec, const ParamValue& value) {
    switch (spec.type) {
        case ParamType::Length:
        case ParamType::Angle:
        case ParamType::Ratio: {
            if (const auto* d = std::get_if<double>(&value)) return check_number(spec, *d);
            if (const auto* i = std::get_if<std::int64_t>(&value)) return check_number(spec, static_cast<double>(*i));
            break;
        }
        case ParamType::Count: {
            std::int64_t n = 0;
            if (const auto* i = std::get_if<std::int64_t>(&value)) {
                n = *i;
            } else if (const auto* d = std::get_if<double>(&value); d && std::isfinite(*d) && std::floor(*d) == *d &&
                                                                    std::abs(*d) < 9e15) {
                n = static_cast<std::int64_t>(*d);
            } else {
                break;
            }
            if (static_cast<double>(n) < spec.min || static_cast<double>(n) > spec.max) out_of_range(spec, fmt::format("{}", n));
            return n;
        }
        case ParamType::Enum: {
            if (const auto* s = std::get_if<std::string>(&value)) {
                for (const auto& c : spec.choices) {
                    if (c == *s) return *s;
                }
                out_of_range(spec, *s);
            }
            break;
        }
        case ParamType::Flag: {
            if (const auto* b = std::get_if<bool>(&value)) return *b;
            break;
        }
    }
    reject_param(spec.name, fmt::format("has the wrong type; expected {} ({})", param_type_name(spec.type), spec.legal_range()));
}

ParamValue parse_param_text(const ParamSpec& spec, std::string_view text) {
    switch (spec.type) {
        case ParamType::Enum: return coerce_param(spec, std::string(text));
        case ParamType::Flag:
            if (text == "true" || text == "1" || text == "yes") return true;
            if (text == "false" || text == "0" || text == "no") return false;
            break;
        case ParamType::Count: {
            std::int64_t n = 0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
            if (ec == std::errc{} && ptr == text.data() + text.size()) return coerce_param(spec, n);
            break;
        }
        default: {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
            if (ec == std::errc{} && ptr == text.data() + text.size()) return coerce_param(spec, v);
            break;
        }
    }
    reject_param(spec.name, fmt::format("cannot parse '{}'; expected {}", text, spec.legal_range()));
}

WorkflowParams resolve_params(const std::vector<ParamSpec>& schema, const WorkflowParams& given) {
    std::set<std::string> known;
    for (const auto& s : schema) known.insert(s.name);
    for (const auto& [name, value] : given) {
        if (!known.contains(name)) {
            std::vector<std::string> names(known.begin(), known.end());
            reject_param(name, fmt::format("is not defined for this workflow; known parameters: {}", fmt::join(names, ", ")));
        }
    }
    WorkflowParams out;
    for (const auto& s : schema) {
        const auto it = given.find(s.name);
        out[s.name] = coerce_param(s, it == given.end() ? s.default_value : it->second);
    }
    return out;
}

namespace {

const ParamValue& lookup(const WorkflowParams& params, const std::string& name) {
    const auto it = params.find(name);
    if (it == params.end()) throw Error(ErrorCode::InvariantViolation, fmt::format("parameter '{}' was not resolved", name));
    return it->second;
}

}  // namespace

double param_number(const WorkflowParams& params, const std::string& name) {
    const ParamValue& v = lookup(params, name);
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw Error(ErrorCode::InvariantViolation, fmt::format("parameter '{}' is not numeric", name));
}

std::int64_t param_count(const WorkflowParams& params, const std::string& name) {
    const ParamValue& v = lookup(params, name);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
    throw Error(ErrorCode::InvariantViolation, fmt::format("parameter '{}' is not a count", name));
}

bool param_flag(const WorkflowParams& params, const std::string& name) {
    const ParamValue& v = lookup(params, name);
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    throw Error(ErrorCode::InvariantViolation, fmt::format("parameter '{}' is not a flag", name));
}

const std::string& param_text(const WorkflowParams& params, const std::string& name) {
    const ParamValue& v = lookup(params, name);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw Error(ErrorCode::InvariantViolation, fmt::format("parameter '{}' is not text", name));
}

}  // namespace camforge
