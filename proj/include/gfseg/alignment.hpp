#pragma once
// Positive-negative alignment: dense target/reference correlation, similarity maps and
// parameter-free point prompt selection.

#include <span>
#include <vector>

#include "gfseg/tensor.hpp"

namespace gfseg {

/// Reference shot at feature resolution (mask already pooled onto the reference grid).
struct GridReference {
    const FeatureMap* features;
    const BinaryMask* grid_mask;
};

/// ReLU-cosine correlation of every target cell against every reference cell, with the
/// reference columns split by the reference mask. Matrices are row-major hw x n.
struct CorrelationSplit {
    int rows = 0;
    std::vector<float> positive;  // rows x foreground_count
    std::vector<float> negative;  // rows x background_count
    int foreground_count = 0;
    int background_count = 0;

    float pos(int i, int j) const { return positive[static_cast<std::size_t>(i) * foreground_count + j]; }
    float neg(int i, int j) const { return negative[static_cast<std::size_t>(i) * background_count + j]; }
};

struct SimilarityMaps {
    std::vector<float> mean_pos;
    std::vector<float> max_pos;
    std::vector<float> mix_pos;
    std::vector<float> mean_neg;
    std::vector<float> filtered;
};

struct PointSet {
    std::vector<GridPoint> points;
    std::vector<PixelPoint> image_points;
    std::vector<float> scores;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

/// max(0, cos(a, b)); zero-norm vectors give 0.
float relu_cosine(std::span<const float> a, std::span<const float> b);

/// Throws std::invalid_argument on channel mismatch or a grid mask that does not match its features.
CorrelationSplit compute_correlation(const FeatureMap& target, std::span<const GridReference> references);

/// Min-max normalisation; a constant vector maps to all zeros.
std::vector<float> min_max_normalize(std::span<const float> v);

/// Throws std::invalid_argument when the split has no foreground column.
SimilarityMaps build_similarity_maps(const CorrelationSplit& split);

/// Patch-centre mapping of a grid cell to provider pixel coordinates.
PixelPoint grid_to_image(GridPoint p, GridSize grid, ImageSize image);

/// N = round(sum(filtered)) clamped to [1, nnz]; the N largest entries, ties by ascending index.
PointSet select_points(const SimilarityMaps& maps, GridSize grid, ImageSize image);

}  // namespace gfseg
