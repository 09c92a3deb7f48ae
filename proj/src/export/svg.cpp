#include <charconv>
#include <string>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/export.hpp"

namespace camforge {

namespace {

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape_xml(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '&') {
            out += s[i];
            continue;
        }
        const std::size_t semi = s.find(';', i);
        if (semi == std::string_view::npos) throw Error(ErrorCode::ParseError, "unterminated XML entity");
        const std::string_view ent = s.substr(i + 1, semi - i - 1);
        if (ent == "amp") out += '&';
        else if (ent == "lt") out += '<';
        else if (ent == "gt") out += '>';
        else if (ent == "quot") out += '"';
        else throw Error(ErrorCode::ParseError, fmt::format("unknown XML entity '{}'", ent));
        i = semi;
    }
    return out;
}

std::string coord(double v) {
    std::string s = fmt::format("{:.3f}", v);
    return s == "-0.000" ? "0.000" : s;
}

}  // namespace

std::string export_svg(const SheetLayout& layout) {
    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}mm\" height=\"{1}mm\" "
        "viewBox=\"0 0 {0} {1}\">\n",
        layout.sheet_w, layout.sheet_h);
    for (const auto& p : layout.placements) {
        out += fmt::format(
            "<g id=\"{}\" fill=\"none\" fill-rule=\"evenodd\" stroke=\"#FF0000\" stroke-width=\"0.1\">\n",
            escape_xml(p.part_id));
        for (const auto& c : p.polygons.contours) {
            std::string d;
            for (std::size_t i = 0; i < c.points.size(); ++i) {
                d += fmt::format("{}{} {} ", i == 0 ? "M " : "L ", coord(c.points[i].x), coord(c.points[i].y));
            }
            d += "Z";
            out += fmt::format("<path d=\"{}\"/>\n", d);
        }
        out += "</g>\n";
    }
    for (const auto& p : layout.placements) {
        if (p.label.empty()) continue;
        out += fmt::format(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"3\" text-anchor=\"middle\" "
            "fill=\"none\" stroke=\"#0000FF\" stroke-width=\"0.1\">{}</text>\n",
            coord(p.label_anchor.x), coord(p.label_anchor.y), escape_xml(p.label));
    }
    out += "</svg>\n";
    return out;
}

std::size_t ParsedSvg::contour_count() const {
    std::size_t n = 0;
    for (const auto& p : parts) n += p.contours.size();
    return n;
}

namespace {

std::string attribute(std::string_view tag, std::string_view name) {
    const std::string key = " " + std::string(name) + "=\"";
    const std::size_t at = tag.find(key);
    if (at == std::string_view::npos) throw Error(ErrorCode::ParseError, fmt::format("missing attribute '{}'", name));
    const std::size_t start = at + key.size();
    const std::size_t end = tag.find('"', start);
    if (end == std::string_view::npos) throw Error(ErrorCode::ParseError, "unterminated attribute");
    return unescape_xml(tag.substr(start, end - start));
}

double number(std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::ParseError, fmt::format("bad number '{}'", s));
    }
    return v;
}

std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == ',')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != ',') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

Contour parse_path(std::string_view d) {
    Contour c;
    c.closed = false;
    const auto tok = tokens(d);
    std::size_t i = 0;
    while (i < tok.size()) {
        if (tok[i] == "M" || tok[i] == "L") {
            if ((tok[i] == "M") != c.points.empty()) throw Error(ErrorCode::ParseError, "unexpected path command");
            if (i + 2 >= tok.size()) throw Error(ErrorCode::ParseError, "truncated path");
            c.points.push_back({number(tok[i + 1]), number(tok[i + 2])});
            i += 3;
        } else if (tok[i] == "Z") {
            c.closed = true;
            ++i;
        } else {
            throw Error(ErrorCode::ParseError, fmt::format("unsupported path token '{}'", tok[i]));
        }
    }
    return c;
}

}  // namespace

ParsedSvg parse_svg(std::string_view svg) {
    ParsedSvg out;
    bool seen_root = false;
    SvgPart* group = nullptr;
    std::size_t pos = 0;
    while ((pos = svg.find('<', pos)) != std::string_view::npos) {
        const std::size_t end = svg.find('>', pos);
        if (end == std::string_view::npos) throw Error(ErrorCode::ParseError, "unterminated tag");
        const std::string_view tag = svg.substr(pos, end - pos + 1);
        if (tag.starts_with("<svg ")) {
            const std::string w = attribute(tag, "width");
            const std::string h = attribute(tag, "height");
            if (!w.ends_with("mm") || !h.ends_with("mm")) throw Error(ErrorCode::ParseError, "sheet size not in mm");
            out.width_mm = number(std::string_view(w).substr(0, w.size() - 2));
            out.height_mm = number(std::string_view(h).substr(0, h.size() - 2));
            const auto vb = tokens(attribute(tag, "viewBox"));
            if (vb.size() != 4) throw Error(ErrorCode::ParseError, "bad viewBox");
            out.view_box = {{number(vb[0]), number(vb[1])}, {number(vb[0]) + number(vb[2]), number(vb[1]) + number(vb[3])}};
            seen_root = true;
        } else if (tag.starts_with("<g ")) {
            out.parts.push_back({attribute(tag, "id"), {}});
            group = &out.parts.back();
        } else if (tag == "</g>") {
            group = nullptr;
        } else if (tag.starts_with("<path ")) {
            if (!group) throw Error(ErrorCode::ParseError, "path outside a part group");
            group->contours.push_back(parse_path(attribute(tag, "d")));
        } else if (tag.starts_with("<text ")) {
            const std::size_t close = svg.find("</text>", end);
            if (close == std::string_view::npos) throw Error(ErrorCode::ParseError, "unterminated text");
            out.labels.push_back({unescape_xml(svg.substr(end + 1, close - end - 1)),
                                  {number(attribute(tag, "x")), number(attribute(tag, "y"))}});
            pos = close;
            continue;
        }
        pos = end + 1;
    }
    if (!seen_root) throw Error(ErrorCode::ParseError, "no <svg> root element");
    return out;
}

}  // namespace camforge
