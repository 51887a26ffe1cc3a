#include "gfseg/resample.hpp"

#include <algorithm>
#include <stdexcept>

namespace gfseg {

AxisFootprint::AxisFootprint(int pixels_, int cells_) : pixels(pixels_), cells(cells_), by_pixel(pixels_) {
    if (cells < 1 || pixels < cells) throw std::invalid_argument("footprint requires pixels >= cells >= 1");
    // pixel p covers [p*cells, (p+1)*cells); cell c covers [c*pixels, (c+1)*pixels)
    for (int p = 0; p < pixels; ++p) {
        const std::int64_t lo = static_cast<std::int64_t>(p) * cells;
        const std::int64_t hi = lo + cells;
        const int first = static_cast<int>(lo / pixels);
        const int last = static_cast<int>((hi - 1) / pixels);
        for (int c = first; c <= last; ++c) {
            const std::int64_t clo = static_cast<std::int64_t>(c) * pixels;
            const std::int64_t chi = clo + pixels;
            const std::int64_t len = std::min(hi, chi) - std::max(lo, clo);
            if (len > 0) by_pixel[p].push_back({c, len});
        }
    }
}

std::vector<std::int64_t> cell_coverage(const BinaryMask& mask, GridSize grid) {
    if (grid.h < 1 || grid.w < 1 || mask.height() < grid.h || mask.width() < grid.w)
        throw std::invalid_argument("mask_to_grid: grid " + std::to_string(grid.h) + "x" + std::to_string(grid.w) +
                                    " exceeds mask " + std::to_string(mask.height()) + "x" +
                                    std::to_string(mask.width()) + " (upsampling is not supported)");
    const AxisFootprint ys(mask.height(), grid.h);
    const AxisFootprint xs(mask.width(), grid.w);

    std::vector<std::int64_t> cover(static_cast<std::size_t>(grid.cells()), 0);
    std::vector<std::int64_t> row_acc(static_cast<std::size_t>(grid.w));
    for (int y = 0; y < mask.height(); ++y) {
        std::fill(row_acc.begin(), row_acc.end(), 0);
        bool any = false;
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask(y, x)) continue;
            any = true;
            for (const auto& o : xs.by_pixel[x]) row_acc[o.cell] += o.length;
        }
        if (!any) continue;
        for (const auto& oy : ys.by_pixel[y]) {
            std::int64_t* dst = cover.data() + static_cast<std::size_t>(oy.cell) * grid.w;
            for (int c = 0; c < grid.w; ++c) dst[c] += oy.length * row_acc[c];
        }
    }
    return cover;
}

BinaryMask mask_to_grid(const BinaryMask& mask, GridSize grid) {
    const auto cover = cell_coverage(mask, grid);
    const std::int64_t cell_area = static_cast<std::int64_t>(mask.height()) * mask.width();
    BinaryMask out({grid.h, grid.w});
    auto d = out.data();
    for (std::size_t i = 0; i < cover.size(); ++i) d[i] = 2 * cover[i] > cell_area ? 1 : 0;
    return out;
}

BinaryMask resize_prediction(const BinaryMask& mask, ImageSize size) {
    if (mask.size() == size) return mask;
    BinaryMask out(size);
    if (mask.height() == 0 || mask.width() == 0) return out;
    std::vector<int> src_x(static_cast<std::size_t>(size.width));
    for (int x = 0; x < size.width; ++x) src_x[x] = nearest_source(x, mask.width(), size.width);
    for (int y = 0; y < size.height; ++y) {
        const int sy = nearest_source(y, mask.height(), size.height);
        for (int x = 0; x < size.width; ++x) out(y, x) = mask(sy, src_x[x]);
    }
    return out;
}

}  // namespace gfseg
