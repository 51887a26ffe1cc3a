#include "gfseg/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gfseg {
namespace {

std::vector<double> norms(const FeatureMap& f) {
    std::vector<double> out(static_cast<std::size_t>(f.grid().cells()));
    for (int i = 0; i < f.grid().cells(); ++i) {
        double s = 0.0;
        for (float v : f.at(i)) s += static_cast<double>(v) * v;
        out[i] = std::sqrt(s);
    }
    return out;
}

}  // namespace

float relu_cosine(std::span<const float> a, std::span<const float> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += static_cast<double>(a[k]) * b[k];
        na += static_cast<double>(a[k]) * a[k];
        nb += static_cast<double>(b[k]) * b[k];
    }
    if (na == 0.0 || nb == 0.0) return 0.0f;
    return static_cast<float>(std::max(0.0, dot / (std::sqrt(na) * std::sqrt(nb))));
}

CorrelationSplit compute_correlation(const FeatureMap& target, std::span<const GridReference> references) {
    if (references.empty()) throw std::invalid_argument("compute_correlation: no references");

    struct Column {
        const FeatureMap* f;
        int cell;
        double norm;
    };
    std::vector<Column> fg, bg;
    for (const auto& ref : references) {
        if (ref.features->channels() != target.channels())
            throw std::invalid_argument("compute_correlation: channel mismatch between target and reference");
        if (ref.grid_mask->size() != ImageSize{ref.features->height(), ref.features->width()})
            throw std::invalid_argument("compute_correlation: reference mask is not at feature resolution");
        const auto ref_norms = norms(*ref.features);
        auto m = ref.grid_mask->data();
        for (int j = 0; j < ref.features->grid().cells(); ++j)
            (m[j] ? fg : bg).push_back({ref.features, j, ref_norms[j]});
    }

    const int rows = target.grid().cells();
    const int c = target.channels();
    const auto target_norms = norms(target);

    CorrelationSplit split;
    split.rows = rows;
    split.foreground_count = static_cast<int>(fg.size());
    split.background_count = static_cast<int>(bg.size());
    split.positive.assign(static_cast<std::size_t>(rows) * fg.size(), 0.0f);
    split.negative.assign(static_cast<std::size_t>(rows) * bg.size(), 0.0f);

    auto fill = [&](const std::vector<Column>& cols, std::vector<float>& out) {
        const std::size_t n = cols.size();
        for (int i = 0; i < rows; ++i) {
            const auto t = target.at(i);
            const double tn = target_norms[i];
            float* row = out.data() + static_cast<std::size_t>(i) * n;
            for (std::size_t j = 0; j < n; ++j) {
                const auto r = cols[j].f->at(cols[j].cell);
                double dot = 0.0;
                for (int k = 0; k < c; ++k) dot += static_cast<double>(t[k]) * r[k];
                const double denom = tn * cols[j].norm;
                const double cosine = denom > 0.0 ? dot / denom : 0.0;
                row[j] = cosine > 0.0 ? static_cast<float>(std::min(cosine, 1.0)) : 0.0f;
            }
        }
    };
    fill(fg, split.positive);
    fill(bg, split.negative);
    return split;
}

std::vector<float> min_max_normalize(std::span<const float> v) {
    std::vector<float> out(v.size(), 0.0f);
    if (v.empty()) return out;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const float range = *hi - *lo;
    if (!(range > 0.0f)) return out;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - *lo) / range;
    return out;
}

SimilarityMaps build_similarity_maps(const CorrelationSplit& split) {
    if (split.foreground_count < 1) throw std::invalid_argument("build_similarity_maps: no foreground reference cells");
    const auto rows = static_cast<std::size_t>(split.rows);

    SimilarityMaps m;
    m.mean_pos.resize(rows);
    m.max_pos.resize(rows);
    m.mix_pos.resize(rows);
    m.mean_neg.assign(rows, 0.0f);
    for (int i = 0; i < split.rows; ++i) {
        double sum = 0.0;
        float mx = 0.0f;
        for (int j = 0; j < split.foreground_count; ++j) {
            const float v = split.pos(i, j);
            sum += v;
            mx = std::max(mx, v);
        }
        m.mean_pos[i] = static_cast<float>(sum / split.foreground_count);
        m.max_pos[i] = mx;
        m.mix_pos[i] = m.mean_pos[i] * m.max_pos[i];
        if (split.background_count > 0) {
            double nsum = 0.0;
            for (int j = 0; j < split.background_count; ++j) nsum += split.neg(i, j);
            m.mean_neg[i] = static_cast<float>(nsum / split.background_count);
        }
    }

    const auto mix_n = min_max_normalize(m.mix_pos);
    const auto neg_n = min_max_normalize(m.mean_neg);
    m.filtered.resize(rows);
    for (std::size_t i = 0; i < rows; ++i) m.filtered[i] = mix_n[i] > neg_n[i] ? mix_n[i] : 0.0f;
    return m;
}

PixelPoint grid_to_image(GridPoint p, GridSize grid, ImageSize image) {
    // floor((col + 0.5) * W / w) evaluated exactly in integers
    const auto x = (static_cast<std::int64_t>(2 * p.col + 1) * image.width) / (2 * static_cast<std::int64_t>(grid.w));
    const auto y = (static_cast<std::int64_t>(2 * p.row + 1) * image.height) / (2 * static_cast<std::int64_t>(grid.h));
    return {static_cast<int>(x), static_cast<int>(y)};
}

PointSet select_points(const SimilarityMaps& maps, GridSize grid, ImageSize image) {
    const auto& f = maps.filtered;
    if (f.size() != static_cast<std::size_t>(grid.cells()))
        throw std::invalid_argument("select_points: filtered map does not match the grid");

    std::vector<int> candidates;
    double total = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        total += f[i];
        if (f[i] > 0.0f) candidates.push_back(static_cast<int>(i));
    }
    PointSet out;
    if (candidates.empty()) return out;

    const auto nnz = static_cast<long>(candidates.size());
    const long n = std::clamp(std::lround(total), 1L, nnz);

    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) { return f[a] > f[b]; });
    candidates.resize(static_cast<std::size_t>(n));
    for (int idx : candidates) {
        const GridPoint g{idx / grid.w, idx % grid.w};
        out.points.push_back(g);
        out.image_points.push_back(grid_to_image(g, grid, image));
        out.scores.push_back(f[idx]);
    }
    return out;
}

}  // namespace gfseg
