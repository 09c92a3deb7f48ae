#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/format.h>

#include "camforge/error.hpp"
#include "camforge/service.hpp"

namespace camforge {

namespace {

std::shared_ptr<const StoredModel> load(std::string id, std::string_view bytes,
                                        std::chrono::system_clock::time_point when) {
    auto m = std::make_shared<StoredModel>();
    m->id = std::move(id);
    m->mesh = parse_stl(bytes);
    m->mesh.validate();
    m->stats = mesh_stats(m->mesh);
    m->uploaded_at = when;
    return m;
}

}  // namespace

ModelStore::ModelStore(std::optional<std::filesystem::path> dir) : dir_(std::move(dir)) {
    if (!dir_) return;
    std::filesystem::create_directories(*dir_);
    const std::regex name(R"(m(\d{6})\.stl)");
    for (const auto& entry : std::filesystem::directory_iterator(*dir_)) {
        std::smatch match;
        const std::string file = entry.path().filename().string();
        if (!entry.is_regular_file() || !std::regex_match(file, match, name)) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        const auto when = std::chrono::file_clock::to_sys(entry.last_write_time());
        const std::string id = file.substr(0, 7);
        models_[id] = load(id, buf.str(), std::chrono::time_point_cast<std::chrono::system_clock::duration>(when));
        next_ = std::max<std::size_t>(next_, std::stoul(match[1].str()) + 1);
    }
}

std::shared_ptr<const StoredModel> ModelStore::add(std::string_view stl_bytes) {
    // Parse outside the lock; only id assignment is serialized.
    auto model = load("", stl_bytes, std::chrono::system_clock::now());
    std::lock_guard lock(mutex_);
    auto stored = std::make_shared<StoredModel>(*model);
    stored->id = fmt::format("m{:06}", next_++);
    if (dir_) {
        std::ofstream out(*dir_ / (stored->id + ".stl"), std::ios::binary);
        out.write(stl_bytes.data(), static_cast<std::streamsize>(stl_bytes.size()));
        if (!out) throw Error(ErrorCode::InvariantViolation, "cannot write to the model store directory");
    }
    models_[stored->id] = stored;
    return stored;
}

std::shared_ptr<const StoredModel> ModelStore::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = models_.find(id);
    if (it == models_.end()) throw Error(ErrorCode::UnknownModel, fmt::format("no model with id '{}'", id));
    return it->second;
}

std::size_t ModelStore::size() const {
    std::lock_guard lock(mutex_);
    return models_.size();
}

}  // namespace camforge
