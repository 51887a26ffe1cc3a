#pragma once
// Few-shot episodes and the JSON manifest that lists them.
//
// Manifest schema:
//   {"episodes": [{"id": str, "class_id": int, "target": path, "references": [path, ...],
//                  "gt"?: path, "image_size": [H, W], "provider_size"?: [H, W],
//                  "provider_hint"?: str, "scene"?: path, "fold"?: int}],
//    "defaults"?: {...}}
// Paths are relative to the manifest's directory. Target containers hold "features";
// reference containers hold "features" and "mask"; gt containers hold "mask".

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfseg/tensor.hpp"

namespace gfseg {

inline constexpr ImageSize kDefaultProviderSize{1024, 1024};

struct ReferenceShot {
    FeatureMap features;
    BinaryMask mask;
};

struct Episode {
    std::string id;
    FeatureMap target_features;
    std::vector<ReferenceShot> references;
    int class_id = 0;
    int fold = -1;
    std::optional<BinaryMask> target_gt;
    ImageSize image_size;
    ImageSize provider_size = kDefaultProviderSize;
    std::string provider_hint;

    /// Throws EpisodeError when an invariant does not hold.
    void validate() const;
};

class EpisodeError : public std::runtime_error {
public:
    enum class Code { bad_manifest, missing_tensor, channel_mismatch, empty_reference_mask, size_mismatch };

    EpisodeError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

Episode load_episode(const nlohmann::json& entry, const std::filesystem::path& root);

struct Manifest {
    std::filesystem::path root;
    nlohmann::json document;

    const nlohmann::json& episodes() const { return document.at("episodes"); }
    nlohmann::json defaults() const { return document.value("defaults", nlohmann::json::object()); }
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const nlohmann::json& document, const std::filesystem::path& path);

/// Episode ids become file names, so they are restricted to [A-Za-z0-9._-].
bool valid_episode_id(const std::string& id);

}  // namespace gfseg
