#pragma once
// Post-gating of clustered point masks: polarity-based positive gating with mask growth,
// distance-weighted self-consistency against overshooting points, and final mask merging.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gfseg/alignment.hpp"
#include "gfseg/clustering.hpp"
#include "gfseg/mask_provider.hpp"

namespace gfseg {

enum class ClusteringMode { weak, strong };
enum class PositiveStrategy { num, sum };
enum class GrowthMode { mask_growth, union_all, off };
enum class PivotMode { product, plus, mid_only, neg_only };

struct GateConfig {
    ClusteringMode clustering = ClusteringMode::weak;
    PositiveStrategy positive = PositiveStrategy::num;
    GrowthMode growth = GrowthMode::mask_growth;
    PivotMode pivot = PivotMode::product;
    bool overshoot = true;
};

// CLI spellings: weak|strong, num|sum, grow|union|off, prod|plus|mid|neg.
ClusteringMode parse_clustering_mode(const std::string& s);
PositiveStrategy parse_positive_strategy(const std::string& s);
GrowthMode parse_growth_mode(const std::string& s);
PivotMode parse_pivot_mode(const std::string& s);
std::string to_string(ClusteringMode m);
std::string to_string(PositiveStrategy s);
std::string to_string(GrowthMode m);
std::string to_string(PivotMode m);

struct PolarityMap {
    std::vector<std::int8_t> values;  // +1 / -1 per grid cell
    float s_mid = 0.0f;
    /// |lhs - rhs| of the comparison that decided each cell; used by the sum strategy.
    std::vector<float> margins;
};

PolarityMap polarity_map(std::span<const float> mean_pos, std::span<const float> mean_neg, PivotMode pivot);

/// Per-cell weights fed to mask scoring: +/-1 (num) or polarity * margin (sum).
std::vector<float> gate_weights(const PolarityMap& polarity, PositiveStrategy strategy);

/// Sum of weights over the grid-pooled foreground of `mask`; 0 for an empty pooled mask.
float mask_positive_score(const BinaryMask& mask, std::span<const float> weights, GridSize grid);
float grid_mask_score(const BinaryMask& grid_mask, std::span<const float> weights);

struct GrowthResult {
    std::vector<std::size_t> order;      // point indices in processing order
    std::vector<std::size_t> accepted;   // accepted point indices, ascending
    BinaryMask pseudo_mask;              // full-resolution union of accepted regions
    std::vector<BinaryMask> residuals;   // accepted regions in acceptance order (mask_growth only)
};

/// Positive gating of one cluster. `cluster` lists point indices into `masks`.
GrowthResult grow_cluster(const MaskSet& masks, std::span<const std::size_t> cluster, std::span<const float> weights,
                          GridSize grid, GrowthMode mode);

/// N x P row-major matrix of self-consistency scores.
struct ScoreMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> values;
    float operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

ScoreMatrix self_consistency_scores(const FeatureMap& target, const PointSet& points, const Clustering& clustering,
                                    const MaskSet& masks);

/// Points whose best-scoring cluster is their own (ties retain). Ascending indices.
std::vector<std::size_t> filter_overshooting(const ScoreMatrix& scores, const Clustering& clustering);

/// Union of masks[l] for l in p_plus and p_sc.
BinaryMask merge_prediction(const MaskSet& masks, std::span<const std::size_t> p_plus, std::span<const std::size_t> p_sc);

struct GateOutcome {
    std::vector<std::size_t> positive_points;
    std::vector<std::size_t> consistent_points;
    BinaryMask final_mask;
};

/// Full post-gating for one episode given its similarity maps and clustering.
GateOutcome gate(const FeatureMap& target, const SimilarityMaps& maps, const PointSet& points, const MaskSet& masks,
                 const Clustering& clustering, const GateConfig& config);

}  // namespace gfseg
