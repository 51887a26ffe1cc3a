#include "gfseg/clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace gfseg {
namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t v) {
        std::size_t root = v;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[v] != root) v = std::exchange(parent_[v], root);
        return root;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

}  // namespace

CoverageGraph CoverageGraph::from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    CoverageGraph g(n);
    for (auto [a, b] : edges) {
        if (a >= n || b >= n) throw std::invalid_argument("edge endpoint out of range");
        if (a == b) throw std::invalid_argument("self-loop " + std::to_string(a) + " -> " + std::to_string(a));
        g.adjacency_[a].push_back(b);
    }
    for (auto& adj : g.adjacency_) {
        std::sort(adj.begin(), adj.end());
        if (std::adjacent_find(adj.begin(), adj.end()) != adj.end()) throw std::invalid_argument("duplicate edge");
    }
    return g;
}

std::size_t CoverageGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& a : adjacency_) n += a.size();
    return n;
}

bool CoverageGraph::has_edge(std::size_t from, std::size_t to) const {
    const auto& a = adjacency_.at(from);
    return std::binary_search(a.begin(), a.end(), to);
}

Clustering Clustering::from_labels(const std::vector<std::size_t>& labels) {
    std::unordered_map<std::size_t, std::size_t> remap;
    Clustering c;
    c.component_of.resize(labels.size());
    for (std::size_t v = 0; v < labels.size(); ++v) {
        const auto [it, fresh] = remap.try_emplace(labels[v], c.clusters.size());
        if (fresh) c.clusters.emplace_back();
        c.component_of[v] = it->second;
        c.clusters[it->second].push_back(v);
    }
    return c;
}

CoverageGraph build_coverage_graph(const PointSet& points, const MaskSet& masks) {
    if (points.size() != masks.size())
        throw std::invalid_argument("build_coverage_graph: " + std::to_string(points.size()) + " points but " +
                                    std::to_string(masks.size()) + " masks");
    const std::size_t n = points.size();
    for (std::size_t m = 0; m < n; ++m) {
        const auto p = points.image_points[m];
        if (p.x < 0 || p.y < 0 || p.x >= masks.resolution.width || p.y >= masks.resolution.height)
            throw std::invalid_argument("build_coverage_graph: point " + std::to_string(m) + " (" + std::to_string(p.x) +
                                        ", " + std::to_string(p.y) + ") lies outside the mask resolution");
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t l = 0; l < n; ++l) {
        const auto& mask = masks[l];
        for (std::size_t m = 0; m < n; ++m) {
            if (m == l) continue;
            const auto p = points.image_points[m];
            if (mask(p.y, p.x)) edges.emplace_back(l, m);
        }
    }
    return CoverageGraph::from_edges(n, edges);
}

Clustering weakly_connected_components(const CoverageGraph& g) {
    DisjointSets sets(g.size());
    for (std::size_t v = 0; v < g.size(); ++v)
        for (auto w : g.successors(v)) sets.unite(v, w);
    std::vector<std::size_t> labels(g.size());
    for (std::size_t v = 0; v < g.size(); ++v) labels[v] = sets.find(v);
    return Clustering::from_labels(labels);
}

// Iterative Tarjan: an explicit frame stack replaces recursion.
Clustering strongly_connected_components(const CoverageGraph& g) {
    constexpr auto unvisited = std::numeric_limits<std::size_t>::max();
    const std::size_t n = g.size();
    std::vector<std::size_t> index(n, unvisited), low(n, 0), labels(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    struct Frame {
        std::size_t v;
        std::size_t next;
    };
    std::vector<Frame> frames;
    std::size_t counter = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        frames.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!frames.empty()) {
            auto& f = frames.back();
            const auto& succ = g.successors(f.v);
            if (f.next < succ.size()) {
                const auto w = succ[f.next++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const auto v = f.v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            if (low[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    labels[w] = v;
                } while (w != v);
            }
        }
    }
    return Clustering::from_labels(labels);
}

}  // namespace gfseg
