#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <optional>
#include <unordered_map>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/mesh.hpp"

namespace camforge {
namespace {

static_assert(std::endian::native == std::endian::little, "STL I/O assumes a little-endian host");

constexpr std::size_t kHeaderSize = 80;
constexpr std::size_t kFacetSize = 50;

// Merges vertices within the weld tolerance onto the first-seen representative.
class VertexWelder {
public:
    explicit VertexWelder(double tolerance) : tol_(tolerance) {}

    std::uint32_t add(Vec3 p) {
        const auto key = cell(p);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    auto it = grid_.find(Key{key.x + dx, key.y + dy, key.z + dz});
                    if (it == grid_.end()) continue;
                    for (std::uint32_t idx : it->second) {
                        if (norm(vertices_[idx] - p) <= tol_) return idx;
                    }
                }
            }
        }
        const auto idx = static_cast<std::uint32_t>(vertices_.size());
        vertices_.push_back(p);
        grid_[key].push_back(idx);
        return idx;
    }

    std::vector<Vec3> take() { return std::move(vertices_); }

private:
    struct Key {
        std::int64_t x, y, z;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::size_t h = static_cast<std::size_t>(k.x) * 73856093u;
            h ^= static_cast<std::size_t>(k.y) * 19349663u;
            h ^= static_cast<std::size_t>(k.z) * 83492791u;
            return h;
        }
    };

    Key cell(Vec3 p) const {
        return {static_cast<std::int64_t>(std::floor(p.x / tol_)),
                static_cast<std::int64_t>(std::floor(p.y / tol_)),
                static_cast<std::int64_t>(std::floor(p.z / tol_))};
    }

    double tol_;
    std::vector<Vec3> vertices_;
    std::unordered_map<Key, std::vector<std::uint32_t>, KeyHash> grid_;
};

TriangleMesh build_mesh(const std::vector<std::array<Vec3, 3>>& facets, std::string name) {
    if (facets.empty()) throw Error(ErrorCode::EmptyMesh, "STL contains no facets");
    VertexWelder welder(kWeldTolerance);
    TriangleMesh mesh;
    mesh.name = std::move(name);
    mesh.triangles.reserve(facets.size());
    for (const auto& f : facets) {
        for (const Vec3& p : f) {
            if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z)) {
                throw Error(ErrorCode::NonFiniteCoordinate, "facet vertex is not finite");
            }
        }
        mesh.triangles.push_back({welder.add(f[0]), welder.add(f[1]), welder.add(f[2])});
    }
    mesh.vertices = welder.take();
    return mesh;
}

class AsciiTokenizer {
public:
    explicit AsciiTokenizer(std::string_view text) : text_(text) {}

    std::optional<std::string_view> next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ >= text_.size()) return std::nullopt;
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    std::string rest_of_line() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
        std::string_view line = text_.substr(start, pos_ - start);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
        while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
        return std::string(line);
    }

    void expect(std::string_view keyword) {
        auto tok = next();
        if (!tok || *tok != keyword) {
            throw Error(ErrorCode::MalformedStl,
                        fmt::format("expected '{}' but found '{}'", keyword, tok ? *tok : "<eof>"));
        }
    }

    double number() {
        auto tok = next();
        if (!tok) throw Error(ErrorCode::MalformedStl, "unexpected end of file in number");
        double value = 0.0;
        const char* first = tok->data();
        const char* last = first + tok->size();
        if (*first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            throw Error(ErrorCode::MalformedStl, fmt::format("invalid number '{}'", *tok));
        }
        return value;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
};

TriangleMesh parse_ascii(std::string_view bytes) {
    AsciiTokenizer tok(bytes);
    tok.expect("solid");
    std::string name = tok.rest_of_line();
    std::vector<std::array<Vec3, 3>> facets;
    for (;;) {
        auto word = tok.next();
        if (!word) throw Error(ErrorCode::MalformedStl, "missing 'endsolid'");
        if (*word == "endsolid") break;
        if (*word != "facet") {
            throw Error(ErrorCode::MalformedStl, fmt::format("expected 'facet' but found '{}'", *word));
        }
        tok.expect("normal");
        tok.number();
        tok.number();
        tok.number();
        tok.expect("outer");
        tok.expect("loop");
        std::array<Vec3, 3> f{};
        for (auto& v : f) {
            tok.expect("vertex");
            v.x = tok.number();
            v.y = tok.number();
            v.z = tok.number();
        }
        tok.expect("endloop");
        tok.expect("endfacet");
        facets.push_back(f);
    }
    return build_mesh(facets, std::move(name));
}

float read_f32(const char* p) {
    float f;
    std::memcpy(&f, p, sizeof f);
    return f;
}

TriangleMesh parse_binary(std::string_view bytes) {
    if (bytes.size() < kHeaderSize + 4) {
        throw Error(ErrorCode::TruncatedFile,
                    fmt::format("binary STL needs at least 84 bytes, got {}", bytes.size()));
    }
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + kHeaderSize, 4);
    const std::size_t needed = kHeaderSize + 4 + static_cast<std::size_t>(count) * kFacetSize;
    if (needed > bytes.size()) {
        throw Error(ErrorCode::TruncatedFile,
                    fmt::format("header declares {} triangles ({} bytes) but file has {} bytes", count,
                                needed, bytes.size()));
    }
    std::string header(bytes.substr(0, kHeaderSize));
    header.erase(std::find(header.begin(), header.end(), '\0'), header.end());
    while (!header.empty() && header.back() == ' ') header.pop_back();

    std::vector<std::array<Vec3, 3>> facets(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const char* p = bytes.data() + kHeaderSize + 4 + static_cast<std::size_t>(i) * kFacetSize + 12;
        for (int k = 0; k < 3; ++k) {
            facets[i][k] = {read_f32(p), read_f32(p + 4), read_f32(p + 8)};
            p += 12;
        }
    }
    return build_mesh(facets, header);
}

bool looks_ascii(std::string_view bytes) {
    std::size_t i = 0;
    while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
    return bytes.substr(i, 5) == "solid";
}

bool binary_size_consistent(std::string_view bytes) {
    if (bytes.size() < kHeaderSize + 4) return false;
    std::uint32_t count = 0;
    std::memcpy(&count, bytes.data() + kHeaderSize, 4);
    return bytes.size() == kHeaderSize + 4 + static_cast<std::size_t>(count) * kFacetSize;
}

Vec3 facet_normal(const TriangleMesh& mesh, const Triangle& t) {
    const Vec3 a = mesh.vertices[t[0]];
    return normalized(cross(mesh.vertices[t[1]] - a, mesh.vertices[t[2]] - a));
}

void append_f32(std::string& out, double v) {
    const float f = static_cast<float>(v);
    char buf[4];
    std::memcpy(buf, &f, 4);
    out.append(buf, 4);
}

}  // namespace

TriangleMesh parse_stl(std::string_view bytes) {
    if (bytes.empty()) throw Error(ErrorCode::EmptyMesh, "input is empty");
    if (looks_ascii(bytes) && !binary_size_consistent(bytes)) return parse_ascii(bytes);
    if (looks_ascii(bytes)) {
        // Binary files may also start with "solid"; prefer ASCII only when its grammar holds.
        try {
            return parse_ascii(bytes);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MalformedStl) throw;
        }
    }
    return parse_binary(bytes);
}

std::string write_stl(const TriangleMesh& mesh, bool ascii) {
    std::string out;
    if (ascii) {
        out += fmt::format("solid {}\n", mesh.name);
        for (const auto& t : mesh.triangles) {
            const Vec3 n = facet_normal(mesh, t);
            out += fmt::format("  facet normal {} {} {}\n    outer loop\n", n.x, n.y, n.z);
            for (auto idx : t) {
                const Vec3 v = mesh.vertices[idx];
                out += fmt::format("      vertex {} {} {}\n", v.x, v.y, v.z);
            }
            out += "    endloop\n  endfacet\n";
        }
        out += fmt::format("endsolid {}\n", mesh.name);
        return out;
    }
    std::string header = "camforge binary STL " + mesh.name;
    header.resize(kHeaderSize, ' ');
    out.reserve(kHeaderSize + 4 + mesh.triangles.size() * kFacetSize);
    out += header;
    const auto count = static_cast<std::uint32_t>(mesh.triangles.size());
    char buf[4];
    std::memcpy(buf, &count, 4);
    out.append(buf, 4);
    for (const auto& t : mesh.triangles) {
        const Vec3 n = facet_normal(mesh, t);
        append_f32(out, n.x);
        append_f32(out, n.y);
        append_f32(out, n.z);
        for (auto idx : t) {
            const Vec3 v = mesh.vertices[idx];
            append_f32(out, v.x);
            append_f32(out, v.y);
            append_f32(out, v.z);
        }
        out.append(2, '\0');
    }
    return out;
}

}  // namespace camforge
