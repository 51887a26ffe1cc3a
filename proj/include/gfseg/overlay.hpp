#pragma once
// Qualitative overlay: prediction, ground-truth boundary and prompt points coloured by cluster.
//
// Colour encoding: the red channel is 255 exactly on predicted pixels and 0 elsewhere; the GT
// boundary and point markers only change green/blue, so the prediction stays countable.

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "gfseg/episode.hpp"
#include "gfseg/pipeline.hpp"

namespace gfseg {

struct RgbImage {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    std::array<std::uint8_t, 3> at(int y, int x) const {
        const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
        return {rgb[i], rgb[i + 1], rgb[i + 2]};
    }
};

RgbImage render_overlay(const Episode& episode, const EpisodeResult& result);
std::vector<std::uint8_t> encode_png(const RgbImage& image);
void emit_overlay(const Episode& episode, const EpisodeResult& result, const std::filesystem::path& path);

}  // namespace gfseg
