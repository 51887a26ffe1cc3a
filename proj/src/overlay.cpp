#include "gfseg/overlay.hpp"

#include <png.h>

#include <fstream>
#include <stdexcept>

#include "gfseg/resample.hpp"

namespace gfseg {
namespace {

constexpr std::uint8_t kBackgroundGreen = 40;
constexpr std::uint8_t kBackgroundBlue = 40;
constexpr std::uint8_t kPredictionGreen = 90;
constexpr std::uint8_t kPredictionBlue = 60;

// (green, blue) pairs; red is reserved for the prediction.
constexpr std::array<std::array<std::uint8_t, 2>, 8> kClusterPalette{{
    {0, 255}, {255, 255}, {160, 0}, {80, 200}, {200, 120}, {120, 255}, {255, 160}, {0, 160},
}};

bool is_boundary(const BinaryMask& m, int y, int x) {
    if (!m(y, x)) return false;
    constexpr int dy[4] = {-1, 1, 0, 0};
    constexpr int dx[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
        const int ny = y + dy[k], nx = x + dx[k];
        if (ny < 0 || nx < 0 || ny >= m.height() || nx >= m.width() || !m(ny, nx)) return true;
    }
    return false;
}

void png_write_to_vector(png_structp png, png_bytep data, png_size_t length) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

}  // namespace

RgbImage render_overlay(const Episode& episode, const EpisodeResult& result) {
    const auto size = episode.image_size;
    if (result.prediction.size() != size) throw std::invalid_argument("overlay: prediction does not match image_size");

    RgbImage img{size.height, size.width, std::vector<std::uint8_t>(size.pixels() * 3)};
    for (int y = 0; y < size.height; ++y) {
        for (int x = 0; x < size.width; ++x) {
            auto* px = &img.rgb[(static_cast<std::size_t>(y) * size.width + x) * 3];
            const bool pred = result.prediction(y, x) != 0;
            px[0] = pred ? 255 : 0;
            px[1] = pred ? kPredictionGreen : kBackgroundGreen;
            px[2] = pred ? kPredictionBlue : kBackgroundBlue;
            if (episode.target_gt && is_boundary(*episode.target_gt, y, x)) {
                px[1] = 255;
                px[2] = 0;
            }
        }
    }

    // 5x5 plus-shaped markers at the provider coordinates mapped to the image
    const auto provider = episode.provider_size;
    for (std::size_t l = 0; l < result.points.size(); ++l) {
        const auto p = result.points.image_points[l];
        const int cx = nearest_source(p.x, size.width, provider.width);
        const int cy = nearest_source(p.y, size.height, provider.height);
        const auto cluster = l < result.component_of.size() ? result.component_of[l] : 0;
        const auto& colour = kClusterPalette[cluster % kClusterPalette.size()];
        for (int d = -2; d <= 2; ++d) {
            for (auto [yy, xx] : {std::pair{cy + d, cx}, std::pair{cy, cx + d}}) {
                if (yy < 0 || xx < 0 || yy >= size.height || xx >= size.width) continue;
                auto* px = &img.rgb[(static_cast<std::size_t>(yy) * size.width + xx) * 3];
                px[1] = colour[0];
                px[2] = colour[1];
            }
        }
    }
    return img;
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw std::runtime_error("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw std::runtime_error("png_create_info_struct failed");
    }
    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("PNG encoding failed");
    }
    png_set_write_fn(png, &out, png_write_to_vector, nullptr);
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width), static_cast<png_uint_32>(image.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y)
        png_write_row(png, const_cast<png_bytep>(image.rgb.data() + static_cast<std::size_t>(y) * image.width * 3));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void emit_overlay(const Episode& episode, const EpisodeResult& result, const std::filesystem::path& path) {
    const auto bytes = encode_png(render_overlay(episode, result));
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write overlay '" + path.string() + "'");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("write failed for overlay '" + path.string() + "'");
}

}  // namespace gfseg
