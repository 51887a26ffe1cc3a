#pragma once
// Resolution changes between provider masks, the feature grid and the evaluation image.

#include <cstdint>
#include <vector>

#include "gfseg/tensor.hpp"

namespace gfseg {

/// Exact overlap of source pixels with destination cells along one axis.
/// Lengths are measured in units of 1/cells of a source pixel, so every overlap is an integer:
/// a pixel spans `cells` units and a cell spans `pixels` units.
struct AxisFootprint {
    struct Overlap {
        int cell;
        std::int64_t length;
    };
    int pixels = 0;
    int cells = 0;
    /// At most two overlaps per source pixel when pixels >= cells.
    std::vector<std::vector<Overlap>> by_pixel;

    AxisFootprint(int pixels, int cells);
};

/// Per-cell covered area in units of 1/(h*w) pixel; full cell area is H*W.
std::vector<std::int64_t> cell_coverage(const BinaryMask& mask, GridSize grid);

/// Area-average pooling onto the grid, then threshold: cell = 1 iff covered fraction > 0.5.
/// Throws std::invalid_argument when the grid is larger than the mask.
BinaryMask mask_to_grid(const BinaryMask& mask, GridSize grid);

/// Nearest-neighbour resampling with pixel-centre alignment.
BinaryMask resize_prediction(const BinaryMask& mask, ImageSize size);

/// Pixel-centre nearest source index: floor((dst + 0.5) * src / dst_extent).
inline int nearest_source(int dst, int src_extent, int dst_extent) {
    return static_cast<int>((static_cast<std::int64_t>(2 * dst + 1) * src_extent) / (2 * static_cast<std::int64_t>(dst_extent)));
}

}  // namespace gfseg
