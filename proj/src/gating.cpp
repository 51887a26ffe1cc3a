#include "gfseg/gating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gfseg/resample.hpp"

namespace gfseg {

ClusteringMode parse_clustering_mode(const std::string& s) {
    if (s == "weak") return ClusteringMode::weak;
    if (s == "strong") return ClusteringMode::strong;
    throw std::invalid_argument("clustering must be weak|strong, got '" + s + "'");
}

PositiveStrategy parse_positive_strategy(const std::string& s) {
    if (s == "num") return PositiveStrategy::num;
    if (s == "sum") return PositiveStrategy::sum;
    throw std::invalid_argument("positive strategy must be num|sum, got '" + s + "'");
}

GrowthMode parse_growth_mode(const std::string& s) {
    if (s == "grow") return GrowthMode::mask_growth;
    if (s == "union") return GrowthMode::union_all;
    if (s == "off") return GrowthMode::off;
    throw std::invalid_argument("growth must be grow|union|off, got '" + s + "'");
}

PivotMode parse_pivot_mode(const std::string& s) {
    if (s == "prod") return PivotMode::product;
    if (s == "plus") return PivotMode::plus;
    if (s == "mid") return PivotMode::mid_only;
    if (s == "neg") return PivotMode::neg_only;
    throw std::invalid_argument("pivot must be prod|plus|mid|neg, got '" + s + "'");
}

std::string to_string(ClusteringMode m) { return m == ClusteringMode::weak ? "weak" : "strong"; }
std::string to_string(PositiveStrategy s) { return s == PositiveStrategy::num ? "num" : "sum"; }

std::string to_string(GrowthMode m) {
    switch (m) {
        case GrowthMode::mask_growth: return "grow";
        case GrowthMode::union_all: return "union";
        case GrowthMode::off: return "off";
    }
    return "?";
}

std::string to_string(PivotMode m) {
    switch (m) {
        case PivotMode::product: return "prod";
        case PivotMode::plus: return "plus";
        case PivotMode::mid_only: return "mid";
        case PivotMode::neg_only: return "neg";
    }
    return "?";
}

PolarityMap polarity_map(std::span<const float> mean_pos, std::span<const float> mean_neg, PivotMode pivot) {
    if (mean_pos.size() != mean_neg.size()) throw std::invalid_argument("polarity_map: length mismatch");
    PolarityMap out;
    out.values.resize(mean_pos.size());
    out.margins.resize(mean_pos.size());
    if (mean_pos.empty()) return out;

    const auto [lo, hi] = std::minmax_element(mean_pos.begin(), mean_pos.end());
    const float s_mid = (*hi + *lo) / 2.0f;
    out.s_mid = s_mid;
    for (std::size_t i = 0; i < mean_pos.size(); ++i) {
        const float p = mean_pos[i];
        const float n = mean_neg[i];
        float lhs = 0.0f, rhs = 0.0f;
        switch (pivot) {
            case PivotMode::product: lhs = p * p; rhs = s_mid * n; break;
            case PivotMode::plus: lhs = 2.0f * p; rhs = s_mid + n; break;
            case PivotMode::mid_only: lhs = p; rhs = s_mid; break;
            case PivotMode::neg_only: lhs = p; rhs = n; break;
        }
        out.values[i] = lhs > rhs ? 1 : -1;
        out.margins[i] = std::fabs(lhs - rhs);
    }
    return out;
}

std::vector<float> gate_weights(const PolarityMap& polarity, PositiveStrategy strategy) {
    std::vector<float> w(polarity.values.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = strategy == PositiveStrategy::num ? static_cast<float>(polarity.values[i])
                                                 : static_cast<float>(polarity.values[i]) * polarity.margins[i];
    return w;
}

float grid_mask_score(const BinaryMask& grid_mask, std::span<const float> weights) {
    auto m = grid_mask.data();
    if (m.size() != weights.size()) throw std::invalid_argument("mask score: weights do not match the grid");
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i]) s += weights[i];
    return static_cast<float>(s);
}

float mask_positive_score(const BinaryMask& mask, std::span<const float> weights, GridSize grid) {
    return grid_mask_score(mask_to_grid(mask, grid), weights);
}

GrowthResult grow_cluster(const MaskSet& masks, std::span<const std::size_t> cluster, std::span<const float> weights,
                          GridSize grid, GrowthMode mode) {
    if (cluster.empty()) throw std::invalid_argument("grow_cluster: empty cluster");
    for (auto q : cluster)
        if (q >= masks.size()) throw std::invalid_argument("grow_cluster: point index out of range");

    GrowthResult out;
    out.pseudo_mask = BinaryMask(masks.resolution);
    out.order.assign(cluster.begin(), cluster.end());

    switch (mode) {
        case GrowthMode::union_all: {
            BinaryMask u(masks.resolution);
            for (auto q : cluster) u |= masks[q];
            if (mask_positive_score(u, weights, grid) > 0.0f) {
                out.accepted.assign(cluster.begin(), cluster.end());
                out.pseudo_mask = std::move(u);
            }
            break;
        }
        case GrowthMode::off: {
            for (auto q : cluster) {
                if (mask_positive_score(masks[q], weights, grid) > 0.0f) {
                    out.accepted.push_back(q);
                    out.pseudo_mask |= masks[q];
                }
            }
            break;
        }
        case GrowthMode::mask_growth: {
            struct Key {
                std::size_t point;
                bool empty;
                double ratio;
            };
            std::vector<Key> keys;
            for (auto q : cluster) {
                const auto g = mask_to_grid(masks[q], grid);
                const auto area = g.count();
                const double ratio = area > 0 ? static_cast<double>(grid_mask_score(g, weights)) / static_cast<double>(area) : 0.0;
                keys.push_back({q, area == 0, ratio});
            }
            std::sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) {
                if (a.empty != b.empty) return b.empty;
                if (a.ratio != b.ratio) return a.ratio > b.ratio;
                return a.point < b.point;
            });
            out.order.clear();
            for (const auto& k : keys) {
                out.order.push_back(k.point);
                auto residual = masks[k.point].minus(out.pseudo_mask);
                if (mask_positive_score(residual, weights, grid) > 0.0f) {
                    out.accepted.push_back(k.point);
                    out.pseudo_mask |= residual;
                    out.residuals.push_back(std::move(residual));
                }
            }
            break;
        }
    }
    std::sort(out.accepted.begin(), out.accepted.end());
    return out;
}

ScoreMatrix self_consistency_scores(const FeatureMap& target, const PointSet& points, const Clustering& clustering,
                                    const MaskSet& masks) {
    const std::size_t n = points.size();
    if (clustering.component_of.size() != n || masks.size() != n)
        throw std::invalid_argument("self_consistency_scores: clustering, points and masks disagree in size");
    const GridSize grid = target.grid();
    const auto cells = static_cast<std::size_t>(grid.cells());

    // ReLU-cosine of every point's feature against every grid cell
    std::vector<float> sim(n * cells);
    for (std::size_t l = 0; l < n; ++l) {
        const auto a = target.at(points.points[l]);
        for (std::size_t i = 0; i < cells; ++i) sim[l * cells + i] = relu_cosine(a, target.at(static_cast<int>(i)));
    }

    ScoreMatrix out;
    out.rows = n;
    out.cols = clustering.count();
    out.values.assign(out.rows * out.cols, 0.0f);
    for (std::size_t p = 0; p < clustering.count(); ++p) {
        const auto& members = clustering.clusters[p];
        BinaryMask u(masks.resolution);
        for (auto q : members) u |= masks[q];
        const auto g = mask_to_grid(u, grid);
        const auto fg = g.count();
        if (fg == 0) continue;
        auto gd = g.data();
        for (std::size_t l = 0; l < n; ++l) {
            double sum = 0.0;
            for (std::size_t i = 0; i < cells; ++i)
                if (gd[i]) sum += sim[l * cells + i];
            double nearest = std::numeric_limits<double>::infinity();
            const auto a = points.points[l];
            for (auto q : members) {
                const double dr = a.row - points.points[q].row;
                const double dc = a.col - points.points[q].col;
                nearest = std::min(nearest, std::sqrt(dr * dr + dc * dc));
            }
            const double dist = std::max(1.0, nearest);
            out.values[l * out.cols + p] = static_cast<float>(sum / (static_cast<double>(fg) * dist));
        }
    }
    return out;
}

std::vector<std::size_t> filter_overshooting(const ScoreMatrix& scores, const Clustering& clustering) {
    if (scores.rows != clustering.component_of.size() || scores.cols != clustering.count())
        throw std::invalid_argument("filter_overshooting: score matrix shape does not match the clustering");
    std::vector<std::size_t> kept;
    for (std::size_t l = 0; l < scores.rows; ++l) {
        const auto own = clustering.component_of[l];
        const float own_score = scores(l, own);
        bool best = true;
        for (std::size_t p = 0; p < scores.cols && best; ++p)
            if (scores(l, p) > own_score) best = false;
        if (best) kept.push_back(l);
    }
    return kept;
}

BinaryMask merge_prediction(const MaskSet& masks, std::span<const std::size_t> p_plus, std::span<const std::size_t> p_sc) {
    std::vector<bool> in_sc(masks.size(), false);
    for (auto l : p_sc) {
        if (l >= masks.size()) throw std::invalid_argument("merge_prediction: index out of range");
        in_sc[l] = true;
    }
    BinaryMask out(masks.resolution);
    for (auto l : p_plus) {
        if (l >= masks.size()) throw std::invalid_argument("merge_prediction: index out of range");
        if (in_sc[l]) out |= masks[l];
    }
    return out;
}

GateOutcome gate(const FeatureMap& target, const SimilarityMaps& maps, const PointSet& points, const MaskSet& masks,
                 const Clustering& clustering, const GateConfig& config) {
    const auto polarity = polarity_map(maps.mean_pos, maps.mean_neg, config.pivot);
    const auto weights = gate_weights(polarity, config.positive);

    GateOutcome out;
    for (const auto& cluster : clustering.clusters) {
        auto grown = grow_cluster(masks, cluster, weights, target.grid(), config.growth);
        out.positive_points.insert(out.positive_points.end(), grown.accepted.begin(), grown.accepted.end());
    }
    std::sort(out.positive_points.begin(), out.positive_points.end());

    if (config.overshoot) {
        out.consistent_points = filter_overshooting(self_consistency_scores(target, points, clustering, masks), clustering);
    } else {
        out.consistent_points.resize(points.size());
        for (std::size_t l = 0; l < points.size(); ++l) out.consistent_points[l] = l;
    }
    out.final_mask = merge_prediction(masks, out.positive_points, out.consistent_points);
    return out;
}

}  // namespace gfseg
