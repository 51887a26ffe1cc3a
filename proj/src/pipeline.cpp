#include "gfseg/pipeline.hpp"

#include <algorithm>
#include <chrono>

#include "gfseg/container.hpp"
#include "gfseg/resample.hpp"

namespace gfseg {
namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace

BinaryMask reference_grid_mask(const BinaryMask& mask, GridSize grid) {
    auto pooled = mask_to_grid(mask, grid);
    if (!pooled.empty()) return pooled;
    const auto cover = cell_coverage(mask, grid);
    const auto best = *std::max_element(cover.begin(), cover.end());
    if (best == 0) return pooled;
    auto d = pooled.data();
    for (std::size_t i = 0; i < cover.size(); ++i) d[i] = cover[i] == best ? 1 : 0;
    return pooled;
}

Alignment align_episode(const Episode& episode) {
    std::vector<BinaryMask> grid_masks;
    grid_masks.reserve(episode.references.size());
    for (const auto& ref : episode.references) grid_masks.push_back(reference_grid_mask(ref.mask, ref.features.grid()));
    std::vector<GridReference> refs;
    for (std::size_t k = 0; k < episode.references.size(); ++k)
        refs.push_back({&episode.references[k].features, &grid_masks[k]});

    Alignment out;
    out.maps = build_similarity_maps(compute_correlation(episode.target_features, refs));
    out.points = select_points(out.maps, episode.target_features.grid(), episode.provider_size);
    return out;
}

EpisodeResult run_episode(const Episode& episode, MaskProvider& provider, const GateConfig& config) {
    const auto t0 = Clock::now();
    EpisodeResult result;
    result.episode_id = episode.id;
    result.class_id = episode.class_id;
    result.fold = episode.fold;
    result.has_gt = episode.target_gt.has_value();

    auto aligned = align_episode(episode);
    const auto& maps = aligned.maps;
    result.points = std::move(aligned.points);
    const auto t1 = Clock::now();
    result.timings.alignment_ms = ms_between(t0, t1);

    BinaryMask merged(episode.provider_size);
    if (!result.points.empty()) {
        MaskSet masks;
        try {
            result.provider_called = true;
            masks = provider.generate_masks({episode.id, episode.provider_hint, episode.provider_size}, result.points);
        } catch (const ProviderError& e) {
            const std::string what = e.what();
            if (what.rfind(episode.id + ":", 0) == 0) throw;
            throw ProviderError(e.code(), episode.id + ": " + what);
        }
        const auto t2 = Clock::now();
        result.timings.provider_ms = ms_between(t1, t2);

        const auto graph = build_coverage_graph(result.points, masks);
        const auto clustering = config.clustering == ClusteringMode::weak ? weakly_connected_components(graph)
                                                                          : strongly_connected_components(graph);
        result.component_of = clustering.component_of;
        result.cluster_count = clustering.count();
        const auto t3 = Clock::now();
        result.timings.clustering_ms = ms_between(t2, t3);

        auto outcome = gate(episode.target_features, maps, result.points, masks, clustering, config);
        result.positive_points = std::move(outcome.positive_points);
        result.consistent_points = std::move(outcome.consistent_points);
        merged = std::move(outcome.final_mask);
        result.timings.gating_ms = ms_between(t3, Clock::now());
    }

    const auto t4 = Clock::now();
    result.prediction = resize_prediction(merged, episode.image_size);
    if (episode.target_gt) {
        result.intersection = intersection_count(result.prediction, *episode.target_gt);
        result.union_ = union_count(result.prediction, *episode.target_gt);
    }
    const auto t5 = Clock::now();
    result.timings.resize_ms = ms_between(t4, t5);
    result.timings.total_ms = ms_between(t0, t5);
    return result;
}

std::vector<Tensor> result_tensors(const EpisodeResult& result) {
    const auto n = result.points.size();
    std::vector<std::int32_t> clusters(result.component_of.begin(), result.component_of.end());
    std::vector<std::uint8_t> gates(n * 2, 0);
    for (auto l : result.positive_points) gates[l * 2] = 1;
    for (auto l : result.consistent_points) gates[l * 2 + 1] = 1;

    auto points = points_tensor(result.points);
    std::vector<std::int32_t> stats{result.class_id,
                                    result.fold,
                                    result.has_gt ? 1 : 0,
                                    static_cast<std::int32_t>(result.intersection),
                                    static_cast<std::int32_t>(result.union_),
                                    static_cast<std::int32_t>(n),
                                    static_cast<std::int32_t>(result.cluster_count)};
    std::vector<Tensor> out;
    out.push_back(result.prediction.to_tensor("prediction"));
    out.push_back(std::move(points));
    out.emplace_back("clusters", std::vector<std::uint32_t>{static_cast<std::uint32_t>(clusters.size())}, std::move(clusters));
    out.emplace_back("gates", std::vector<std::uint32_t>{static_cast<std::uint32_t>(n), 2}, std::move(gates));
    out.emplace_back("stats", std::vector<std::uint32_t>{static_cast<std::uint32_t>(stats.size())}, std::move(stats));
    return out;
}

void write_result(const EpisodeResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_container(result_tensors(result), dir / (result.episode_id + ".gfsb"));
}

EpisodeScore read_result_score(const std::filesystem::path& path) {
    const auto entries = read_container(path);
    const auto stats = find_tensor(entries, "stats").i32();
    if (stats.size() < 5) throw std::runtime_error(path.string() + ": malformed 'stats' tensor");
    EpisodeScore s;
    s.episode_id = path.stem().string();
    s.class_id = stats[0];
    s.fold = stats[1];
    s.has_gt = stats[2] != 0;
    s.intersection = static_cast<std::uint64_t>(stats[3]);
    s.union_ = static_cast<std::uint64_t>(stats[4]);
    return s;
}

}  // namespace gfseg
