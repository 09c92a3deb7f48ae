#include <algorithm>
#include <cstring>

#include <fmt/format.h>
#include <zlib.h>

#include "camforge/error.hpp"
#include "camforge/export.hpp"

namespace camforge {

namespace {

constexpr std::uint16_t kDosTime = 0;                               // 00:00:00
constexpr std::uint16_t kDosDate = (0u << 9) | (1u << 5) | 1u;      // 1980-01-01

void put16(std::string& out, std::uint16_t v) {
    out += static_cast<char>(v & 0xff);
    out += static_cast<char>(v >> 8);
}

void put32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xff);
}

std::uint32_t get(std::string_view s, std::size_t at, int bytes) {
    if (at + bytes > s.size()) throw Error(ErrorCode::ParseError, "zip structure truncated");
    std::uint32_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
    return v;
}

std::uint32_t crc_of(std::string_view bytes) {
    uLong crc = crc32(0L, Z_NULL, 0);
    std::size_t done = 0;
    while (done < bytes.size()) {
        const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - done, 1u << 30));
        crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data() + done), chunk);
        done += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::string write_zip(const std::vector<ZipEntry>& entries) {
    std::string out;
    std::string central;
    for (const auto& e : entries) {
        if (e.bytes.size() > 0xfffffffeu || out.size() > 0xfffffffeu) {
            throw Error(ErrorCode::InvariantViolation, "bundle exceeds the 4 GiB zip limit");
        }
        const auto offset = static_cast<std::uint32_t>(out.size());
        const std::uint32_t crc = crc_of(e.bytes);
        const auto size = static_cast<std::uint32_t>(e.bytes.size());
        const auto name_len = static_cast<std::uint16_t>(e.name.size());

        put32(out, 0x04034b50);
        put16(out, 20);  // version needed
        put16(out, 0);   // flags
        put16(out, 0);   // stored
        put16(out, kDosTime);
        put16(out, kDosDate);
        put32(out, crc);
        put32(out, size);
        put32(out, size);
        put16(out, name_len);
        put16(out, 0);
        out += e.name;
        out += e.bytes;

        put32(central, 0x02014b50);
        put16(central, 20);  // made by
        put16(central, 20);
        put16(central, 0);
        put16(central, 0);
        put16(central, kDosTime);
        put16(central, kDosDate);
        put32(central, crc);
        put32(central, size);
        put32(central, size);
        put16(central, name_len);
        put16(central, 0);  // extra
        put16(central, 0);  // comment
        put16(central, 0);  // disk
        put16(central, 0);  // internal attrs
        put32(central, 0);  // external attrs
        put32(central, offset);
        central += e.name;
    }
    const auto central_offset = static_cast<std::uint32_t>(out.size());
    out += central;
    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put16(out, static_cast<std::uint16_t>(entries.size()));
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, central_offset);
    put16(out, 0);
    return out;
}

std::vector<ZipEntry> read_zip(std::string_view zip) {
    if (zip.size() < 22) throw Error(ErrorCode::ParseError, "too short for a zip archive");
    std::size_t eocd = zip.size() - 22;
    while (get(zip, eocd, 4) != 0x06054b50) {
        if (eocd == 0) throw Error(ErrorCode::ParseError, "end of central directory not found");
        --eocd;
    }
    const std::size_t count = get(zip, eocd + 10, 2);
    std::size_t at = get(zip, eocd + 16, 4);
    std::vector<ZipEntry> out;
    for (std::size_t i = 0; i < count; ++i) {
        if (get(zip, at, 4) != 0x02014b50) throw Error(ErrorCode::ParseError, "bad central directory entry");
        if (get(zip, at + 10, 2) != 0) throw Error(ErrorCode::ParseError, "only stored entries are supported");
        const std::uint32_t crc = get(zip, at + 16, 4);
        const std::size_t size = get(zip, at + 20, 4);
        const std::size_t name_len = get(zip, at + 28, 2);
        const std::size_t extra_len = get(zip, at + 30, 2);
        const std::size_t comment_len = get(zip, at + 32, 2);
        const std::size_t local = get(zip, at + 42, 4);
        if (at + 46 + name_len > zip.size()) throw Error(ErrorCode::ParseError, "zip name truncated");
        ZipEntry e{std::string(zip.substr(at + 46, name_len)), {}};
        if (get(zip, local, 4) != 0x04034b50) throw Error(ErrorCode::ParseError, "bad local header");
        const std::size_t data = local + 30 + get(zip, local + 26, 2) + get(zip, local + 28, 2);
        if (data + size > zip.size()) throw Error(ErrorCode::ParseError, "zip entry truncated");
        e.bytes = std::string(zip.substr(data, size));
        if (crc_of(e.bytes) != crc) throw Error(ErrorCode::ParseError, fmt::format("CRC mismatch in '{}'", e.name));
        out.push_back(std::move(e));
        at += 46 + name_len + extra_len + comment_len;
    }
    return out;
}

std::string export_params(const WorkflowParams& params) {
    std::string out;
    for (const auto& [name, value] : params) out += fmt::format("{}={}\n", name, format_param_value(value));
    return out;
}

std::vector<ZipEntry> bundle_entries(const WorkflowOutput& output, const WorkflowDescriptor& descriptor,
                                     const WorkflowParams& params) {
    std::vector<ZipEntry> entries;
    for (const auto& a : output.artifacts) entries.push_back({a.filename, a.bytes});
    entries.push_back({"GUIDE.txt", export_guide_manifest(output.guide, descriptor, params)});
    entries.push_back({"preview.json", export_preview(output.preview)});
    entries.push_back({"params.txt", export_params(params)});
    std::sort(entries.begin(), entries.end(), [](const ZipEntry& a, const ZipEntry& b) { return a.name < b.name; });
    return entries;
}

std::string export_bundle(const WorkflowOutput& output, const WorkflowDescriptor& descriptor,
                          const WorkflowParams& params) {
    return write_zip(bundle_entries(output, descriptor, params));
}

}  // namespace camforge
