#include <charconv>
#include <string>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/export.hpp"

namespace camforge {

std::string format_fixed4(double value) {
    std::string s = fmt::format("{:.4f}", value);
    return s == "-0.0000" ? "0.0000" : s;
}

std::string export_wire_csv(const std::string& wire_id, const BendTable& table) {
    std::string out(kWireCsvHeader);
    out += '\n';
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        out += fmt::format("{},{},{},{},{}\n", wire_id, i + 1, format_fixed4(table.rows[i].feed_mm),
                           format_fixed4(table.rows[i].bend_deg), format_fixed4(0.0));
    }
    return out;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = s.find(sep, start);
        out.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) return out;
        start = at + 1;
    }
}

std::vector<std::string_view> lines(std::string_view csv) {
    auto out = split(csv, '\n');
    if (!out.empty() && out.back().empty()) out.pop_back();
    for (auto l : out) {
        if (!l.empty() && l.back() == '\r') throw Error(ErrorCode::ParseError, "CSV must use LF line endings");
    }
    return out;
}

double number(std::string_view s, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::ParseError, fmt::format("line {}: bad number '{}'", line, s));
    }
    return v;
}

}  // namespace

std::vector<ParsedWire> parse_wire_csv(std::string_view csv) {
    const auto rows = lines(csv);
    if (rows.empty() || rows[0] != kWireCsvHeader) throw Error(ErrorCode::ParseError, "missing wire CSV header");
    std::vector<ParsedWire> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto f = split(rows[i], ',');
        if (f.size() != 5) throw Error(ErrorCode::ParseError, fmt::format("line {}: expected 5 fields", i + 1));
        if (out.empty() || out.back().wire_id != f[0]) out.push_back({std::string(f[0]), {}});
        const auto step = static_cast<std::size_t>(number(f[1], i + 1));
        if (step != out.back().table.rows.size() + 1) {
            throw Error(ErrorCode::ParseError, fmt::format("line {}: step {} out of sequence", i + 1, step));
        }
        if (number(f[4], i + 1) != 0.0) throw Error(ErrorCode::ParseError, "non-planar rotation is not supported");
        out.back().table.rows.push_back({number(f[2], i + 1), number(f[3], i + 1)});
    }
    return out;
}

std::string export_points_csv(const std::vector<Vec2>& points) {
    std::string out = "step,u_mm,v_mm\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        out += fmt::format("{},{},{}\n", i + 1, format_fixed4(points[i].x), format_fixed4(points[i].y));
    }
    return out;
}

std::vector<Vec2> parse_points_csv(std::string_view csv) {
    const auto rows = lines(csv);
    if (rows.empty() || rows[0] != "step,u_mm,v_mm") throw Error(ErrorCode::ParseError, "missing point CSV header");
    std::vector<Vec2> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto f = split(rows[i], ',');
        if (f.size() != 3) throw Error(ErrorCode::ParseError, fmt::format("line {}: expected 3 fields", i + 1));
        if (static_cast<std::size_t>(number(f[0], i + 1)) != i) {
            throw Error(ErrorCode::ParseError, fmt::format("line {}: step out of sequence", i + 1));
        }
        out.push_back({number(f[1], i + 1), number(f[2], i + 1)});
    }
    return out;
}

}  // namespace camforge
