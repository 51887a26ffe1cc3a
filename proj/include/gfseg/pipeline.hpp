#pragma once
// Per-episode orchestration: alignment -> one provider call -> clustering -> gating -> resize.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gfseg/alignment.hpp"
#include "gfseg/clustering.hpp"
#include "gfseg/episode.hpp"
#include "gfseg/gating.hpp"
#include "gfseg/mask_provider.hpp"

namespace gfseg {

struct StageTimings {
    double alignment_ms = 0.0;
    double provider_ms = 0.0;
    double clustering_ms = 0.0;
    double gating_ms = 0.0;
    double resize_ms = 0.0;
    double total_ms = 0.0;

    double stage_sum() const { return alignment_ms + provider_ms + clustering_ms + gating_ms + resize_ms; }
};

/// Evaluation-relevant summary of one episode.
struct EpisodeScore {
    std::string episode_id;
    int class_id = 0;
    int fold = -1;
    bool has_gt = false;
    std::uint64_t intersection = 0;
    std::uint64_t union_ = 0;
};

struct EpisodeResult {
    std::string episode_id;
    int class_id = 0;
    int fold = -1;
    BinaryMask prediction;  // at the episode's image_size
    bool has_gt = false;
    std::uint64_t intersection = 0;
    std::uint64_t union_ = 0;
    PointSet points;
    std::vector<std::size_t> component_of;
    std::size_t cluster_count = 0;
    std::vector<std::size_t> positive_points;
    std::vector<std::size_t> consistent_points;
    bool provider_called = false;
    StageTimings timings;

    std::size_t point_count() const { return points.size(); }
    EpisodeScore score() const { return {episode_id, class_id, fold, has_gt, intersection, union_}; }
};

/// Pools a reference mask onto its feature grid. When no cell passes the > 0.5 rule the cells with
/// the largest non-zero coverage are kept, so tiny references still contribute foreground columns.
BinaryMask reference_grid_mask(const BinaryMask& mask, GridSize grid);

struct Alignment {
    SimilarityMaps maps;
    PointSet points;  // at the episode's provider resolution
};

/// Similarity maps and prompt points for an episode; the part of run_episode before the provider.
Alignment align_episode(const Episode& episode);

/// Throws ProviderError (with the episode id in the message) when the provider fails.
EpisodeResult run_episode(const Episode& episode, MaskProvider& provider, const GateConfig& config);

/// Results container: "prediction" (u8 H x W), "points" (i32 N x 2, (x, y) at provider resolution),
/// "clusters" (i32 N), "gates" (u8 N x 2: in P+, in P^sc) and
/// "stats" (i32 [class_id, fold, has_gt, intersection, union, point_count, cluster_count]).
std::vector<Tensor> result_tensors(const EpisodeResult& result);
void write_result(const EpisodeResult& result, const std::filesystem::path& dir);
EpisodeScore read_result_score(const std::filesystem::path& path);

}  // namespace gfseg
