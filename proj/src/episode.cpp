#include "gfseg/episode.hpp"

#include <fstream>

#include "gfseg/container.hpp"

namespace gfseg {
namespace {

using Code = EpisodeError::Code;
using nlohmann::json;

const Tensor& require(const std::vector<Tensor>& entries, const std::string& name, const std::filesystem::path& file) {
    if (auto t = try_find_tensor(entries, name)) return *t;
    throw EpisodeError(Code::missing_tensor, file.string() + ": missing tensor '" + name + "'");
}

ImageSize parse_size(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw EpisodeError(Code::bad_manifest, std::string("'") + key + "' must be [H, W]");
    ImageSize s{j[0].get<int>(), j[1].get<int>()};
    if (s.height < 1 || s.width < 1) throw EpisodeError(Code::bad_manifest, std::string("'") + key + "' must be positive");
    return s;
}

}  // namespace

bool valid_episode_id(const std::string& id) {
    if (id.empty() || id == "." || id == "..") return false;
    for (char ch : id) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                        ch == '_' || ch == '-' || ch == '.';
        if (!ok) return false;
    }
    return true;
}

void Episode::validate() const {
    if (!valid_episode_id(id)) throw EpisodeError(Code::bad_manifest, "invalid episode id '" + id + "'");
    if (references.empty()) throw EpisodeError(Code::bad_manifest, id + ": at least one reference is required");
    for (std::size_t k = 0; k < references.size(); ++k) {
        const auto& ref = references[k];
        if (ref.features.channels() != target_features.channels())
            throw EpisodeError(Code::channel_mismatch, id + ": reference " + std::to_string(k) + " has " +
                                                           std::to_string(ref.features.channels()) +
                                                           " channels, target has " +
                                                           std::to_string(target_features.channels()));
        if (ref.mask.empty())
            throw EpisodeError(Code::empty_reference_mask, id + ": reference " + std::to_string(k) + " mask is empty");
        if (ref.mask.height() < ref.features.height() || ref.mask.width() < ref.features.width())
            throw EpisodeError(Code::size_mismatch, id + ": reference mask smaller than its feature grid");
    }
    if (target_gt && target_gt->size() != image_size)
        throw EpisodeError(Code::size_mismatch, id + ": gt mask does not match image_size");
    if (provider_size.height < target_features.height() || provider_size.width < target_features.width())
        throw EpisodeError(Code::size_mismatch, id + ": provider resolution is below the feature grid");
}

Episode load_episode(const json& entry, const std::filesystem::path& root) {
    if (!entry.is_object()) throw EpisodeError(Code::bad_manifest, "manifest entry must be an object");
    for (const char* key : {"id", "class_id", "target", "references", "image_size"})
        if (!entry.contains(key)) throw EpisodeError(Code::bad_manifest, std::string("manifest entry lacks '") + key + "'");

    Episode ep;
    ep.id = entry.at("id").get<std::string>();
    ep.class_id = entry.at("class_id").get<int>();
    ep.fold = entry.value("fold", -1);
    ep.image_size = parse_size(entry.at("image_size"), "image_size");
    if (entry.contains("provider_size")) ep.provider_size = parse_size(entry.at("provider_size"), "provider_size");
    ep.provider_hint = entry.value("provider_hint", std::string{});

    const auto target_path = root / entry.at("target").get<std::string>();
    ep.target_features = FeatureMap::from_tensor(require(read_container(target_path), "features", target_path));

    const auto& refs = entry.at("references");
    if (!refs.is_array() || refs.empty())
        throw EpisodeError(Code::bad_manifest, ep.id + ": 'references' must be a non-empty array");
    for (const auto& r : refs) {
        const auto path = root / r.get<std::string>();
        auto entries = read_container(path);
        ep.references.push_back({FeatureMap::from_tensor(require(entries, "features", path)),
                                 BinaryMask::from_tensor(require(entries, "mask", path))});
    }

    if (entry.contains("gt") && !entry.at("gt").is_null()) {
        const auto path = root / entry.at("gt").get<std::string>();
        ep.target_gt = BinaryMask::from_tensor(require(read_container(path), "mask", path));
    }

    ep.validate();
    return ep;
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw EpisodeError(Code::bad_manifest, "cannot open manifest '" + path.string() + "'");
    Manifest m;
    try {
        m.document = json::parse(f);
    } catch (const json::parse_error& e) {
        throw EpisodeError(Code::bad_manifest, path.string() + ": " + e.what());
    }
    if (!m.document.is_object() || !m.document.contains("episodes") || !m.document["episodes"].is_array())
        throw EpisodeError(Code::bad_manifest, path.string() + ": expected {\"episodes\": [...]}");
    m.root = path.parent_path();
    return m;
}

void write_manifest(const json& document, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write manifest '" + path.string() + "'");
    f << document.dump(2) << '\n';
}

}  // namespace gfseg
