#pragma once
// Seeded synthetic scenes used as a stand-in for real images, backbone features and a promptable
// mask generator. Scenes are shapes with part/whole structure; features are class prototypes plus
// Gaussian noise on the patch grid; the oracle answers point prompts with instance or part regions.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "gfseg/episode.hpp"
#include "gfseg/mask_provider.hpp"
#include "gfseg/tensor.hpp"

namespace gfseg::synth {

inline constexpr int kChannels = 16;
inline constexpr int kClassCount = 8;       // semantic classes 1..8
inline constexpr int kBackgroundZones = 4;  // background "stuff" prototypes
inline constexpr int kTargetClassCount = 5; // targets are drawn from classes 1..5

enum class Difficulty { easy, ambiguous, multi_instance };
enum class Ambiguity { instance, part, mixed };

Difficulty parse_difficulty(const std::string& s);
Ambiguity parse_ambiguity(const std::string& s);
std::string to_string(Difficulty d);
std::string to_string(Ambiguity a);

/// splitmix64 finaliser over (seed, stream); used to derive independent sub-seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

struct World {
    std::map<int, std::vector<float>> prototypes;  // class id -> unit vector
    std::vector<std::vector<float>> background_prototypes;
};

/// Mutually orthogonal unit prototypes: signed, permuted rows of a 16x16 Hadamard matrix / 4.
World make_world(std::uint64_t seed);

struct SceneInstance {
    int class_id = 0;
    BinaryMask region;
    std::vector<BinaryMask> parts;   // partition of region
    std::vector<int> part_classes;   // semantic class of each part
};

struct Scene {
    ImageSize image_size;
    std::vector<SceneInstance> instances;
    std::map<int, std::vector<float>> prototypes;
    std::vector<std::vector<float>> background_prototypes;
    std::vector<PixelPoint> background_sites;  // background zone z is the Voronoi cell of site z
    float noise_sigma = 0.0f;
    std::uint64_t seed = 0;

    /// Pixels whose semantic class is `class_id` (parts of composite instances count by part class).
    BinaryMask class_mask(int class_id) const;
    /// Per pixel: semantic class (> 0), or -(zone + 1) for background.
    std::vector<int> semantic_labels() const;
    int background_zone(int y, int x) const;
    /// Instance index at a pixel, or -1.
    int instance_at(int y, int x) const;
    int part_at(int instance, int y, int x) const;
};

struct SceneOptions {
    ImageSize image_size{192, 192};
    float noise_sigma = 0.1f;
    int target_class = 1;
    World world;
};

/// easy: 1-2 convex single-part instances per class, >= 8 px apart.
/// ambiguous: instances split into 2-4 angular parts.
/// multi_instance: several target instances (one embedded as a part of a larger object of another
/// class) with distractor classes placed next to them.
Scene generate_scene(std::uint64_t seed, Difficulty difficulty, const SceneOptions& options);
/// Convenience overload with a world derived from the seed.
Scene generate_scene(std::uint64_t seed, Difficulty difficulty);

/// Majority-label prototype per cell (exact area weights) plus seeded noise, unit-normalised.
FeatureMap render_features(const Scene& scene, GridSize grid);

/// One mask per point at the scene resolution; `seed` drives the mixed-mode part/whole choice
/// and background blob sizes, keyed by point location so order does not matter.
MaskSet oracle_masks(const Scene& scene, const PointSet& points, Ambiguity ambiguity, std::uint64_t seed);

std::vector<Tensor> scene_tensors(const Scene& scene);
Scene scene_from_tensors(const std::vector<Tensor>& entries);

using SceneLookup = std::function<Scene(const std::string& episode_id)>;

class OracleProvider final : public MaskProvider {
public:
    OracleProvider(SceneLookup lookup, Ambiguity ambiguity, std::uint64_t seed)
        : lookup_(std::move(lookup)), ambiguity_(ambiguity), seed_(seed) {}

protected:
    MaskSet produce(const MaskRequest& request, const PointSet& points) override;

private:
    SceneLookup lookup_;
    Ambiguity ambiguity_;
    std::uint64_t seed_;
};

struct SyntheticOptions {
    int shots = 1;
    GridSize grid{24, 24};
    ImageSize image_size{192, 192};
    float noise_sigma = 0.1f;
};

struct SyntheticEpisode {
    Episode episode;
    Scene target;
    std::vector<Scene> references;
};

SyntheticEpisode make_episode(std::uint64_t seed, Difficulty difficulty, const SyntheticOptions& options,
                              std::string id = {});

}  // namespace gfseg::synth
