#pragma once
// Point-mask clustering over the directed coverage graph.

#include <cstddef>
#include <utility>
#include <vector>

#include "gfseg/alignment.hpp"
#include "gfseg/mask_provider.hpp"

namespace gfseg {

/// Directed simple graph; adjacency lists are sorted and free of self-loops and duplicates.
class CoverageGraph {
public:
    explicit CoverageGraph(std::size_t n = 0) : adjacency_(n) {}

    /// Throws std::invalid_argument on self-loops, duplicate edges or out-of-range vertices.
    static CoverageGraph from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

    std::size_t size() const { return adjacency_.size(); }
    const std::vector<std::size_t>& successors(std::size_t v) const { return adjacency_[v]; }
    std::size_t edge_count() const;
    bool has_edge(std::size_t from, std::size_t to) const;

private:
    std::vector<std::vector<std::size_t>> adjacency_;
};

/// Partition of the vertices; clusters ordered by their smallest vertex, members ascending.
struct Clustering {
    std::vector<std::size_t> component_of;
    std::vector<std::vector<std::size_t>> clusters;

    std::size_t count() const { return clusters.size(); }
    /// Relabels an arbitrary component assignment into canonical order.
    static Clustering from_labels(const std::vector<std::size_t>& labels);
};

/// Edge l -> m (l != m) iff masks[l] is set at image_points[m].
/// Throws std::invalid_argument when a point falls outside the mask resolution.
CoverageGraph build_coverage_graph(const PointSet& points, const MaskSet& masks);

Clustering weakly_connected_components(const CoverageGraph& g);
Clustering strongly_connected_components(const CoverageGraph& g);

}  // namespace gfseg
