#pragma once
// Shared helpers for the test binaries: scratch directories and random fixtures.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfseg/alignment.hpp"
#include "gfseg/container.hpp"
#include "gfseg/mask_provider.hpp"
#include "gfseg/tensor.hpp"

namespace gfseg::test {

class ScratchDir {
public:
    ScratchDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "gfseg-test-XXXXXX").string();
        if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline float uniform_float(Rng& rng, float lo, float hi) { return std::uniform_real_distribution<float>(lo, hi)(rng); }

inline FeatureMap random_features(Rng& rng, GridSize grid, int channels) {
    std::normal_distribution<float> n(0.0f, 1.0f);
    std::vector<float> d(static_cast<std::size_t>(grid.cells()) * channels);
    for (auto& v : d) v = n(rng);
    return FeatureMap(grid, channels, std::move(d));
}

inline BinaryMask random_mask(Rng& rng, ImageSize size, double density) {
    std::bernoulli_distribution b(density);
    BinaryMask m(size);
    for (auto& v : m.data()) v = b(rng) ? 1 : 0;
    return m;
}

inline BinaryMask rect_mask(ImageSize size, int y0, int x0, int y1, int x1) {
    BinaryMask m(size);
    for (int y = std::max(0, y0); y < std::min(size.height, y1); ++y)
        for (int x = std::max(0, x0); x < std::min(size.width, x1); ++x) m(y, x) = 1;
    return m;
}

/// Union of 1-3 random axis-aligned rectangles.
inline BinaryMask random_blocks(Rng& rng, ImageSize size) {
    BinaryMask m(size);
    const int k = uniform_int(rng, 1, 3);
    for (int i = 0; i < k; ++i) {
        const int y0 = uniform_int(rng, 0, size.height - 1), x0 = uniform_int(rng, 0, size.width - 1);
        const int y1 = uniform_int(rng, y0 + 1, size.height), x1 = uniform_int(rng, x0 + 1, size.width);
        m |= rect_mask(size, y0, x0, y1, x1);
    }
    return m;
}

/// Points on distinct grid cells, with image coordinates from grid_to_image.
inline PointSet random_points(Rng& rng, GridSize grid, ImageSize image, int n) {
    std::vector<int> cells(static_cast<std::size_t>(grid.cells()));
    for (int i = 0; i < grid.cells(); ++i) cells[i] = i;
    std::shuffle(cells.begin(), cells.end(), rng);
    PointSet ps;
    for (int l = 0; l < n && l < grid.cells(); ++l) {
        GridPoint g{cells[l] / grid.w, cells[l] % grid.w};
        ps.points.push_back(g);
        ps.image_points.push_back(grid_to_image(g, grid, image));
        ps.scores.push_back(1.0f);
    }
    return ps;
}

/// Random tensor of any dtype and rank 1-4; f32 payloads are arbitrary bit patterns (NaNs included).
inline Tensor random_tensor(Rng& rng, const std::string& name) {
    const int rank = uniform_int(rng, 1, 4);
    std::vector<std::uint32_t> dims;
    std::size_t count = 1;
    for (int i = 0; i < rank; ++i) {
        dims.push_back(static_cast<std::uint32_t>(uniform_int(rng, 0, rank > 2 ? 5 : 12)));
        count *= dims.back();
    }
    switch (uniform_int(rng, 0, 2)) {
        case 0: {
            std::vector<float> v(count);
            for (auto& x : v) x = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
            return Tensor(name, dims, std::move(v));
        }
        case 1: {
            std::vector<std::uint8_t> v(count);
            for (auto& x : v) x = static_cast<std::uint8_t>(rng());
            return Tensor(name, dims, std::move(v));
        }
        default: {
            std::vector<std::int32_t> v(count);
            for (auto& x : v) x = static_cast<std::int32_t>(static_cast<std::uint32_t>(rng()));
            return Tensor(name, dims, std::move(v));
        }
    }
}

inline std::vector<Tensor> random_entries(Rng& rng) {
    std::vector<Tensor> out;
    const int n = uniform_int(rng, 0, 6);
    for (int i = 0; i < n; ++i) {
        std::string name = "t" + std::to_string(i);
        for (int k = uniform_int(rng, 0, 8); k > 0; --k) name.push_back(static_cast<char>('a' + uniform_int(rng, 0, 25)));
        out.push_back(random_tensor(rng, name));
    }
    return out;
}

/// Random post-gating inputs: features, distinct-cell points, block masks and map values.
struct GatingFixture {
    FeatureMap target;
    PointSet points;
    MaskSet masks;
    std::vector<float> mean_pos;
    std::vector<float> mean_neg;
};

inline GatingFixture random_gating_fixture(Rng& rng) {
    GatingFixture f;
    const GridSize grid{uniform_int(rng, 3, 9), uniform_int(rng, 3, 9)};
    const ImageSize image{grid.h * uniform_int(rng, 1, 3) + uniform_int(rng, 0, 5),
                          grid.w * uniform_int(rng, 1, 3) + uniform_int(rng, 0, 5)};
    f.target = random_features(rng, grid, uniform_int(rng, 2, 8));
    f.points = random_points(rng, grid, image, uniform_int(rng, 1, std::min(12, grid.cells())));
    f.masks.resolution = image;
    for (std::size_t l = 0; l < f.points.size(); ++l) {
        auto m = random_blocks(rng, image);
        if (uniform_int(rng, 0, 1)) m(f.points.image_points[l].y, f.points.image_points[l].x) = 1;
        f.masks.masks.push_back(std::move(m));
    }
    // coarse values so that exact ties occur
    for (int i = 0; i < grid.cells(); ++i) {
        f.mean_pos.push_back(static_cast<float>(uniform_int(rng, 0, 20)) / 20.0f);
        f.mean_neg.push_back(static_cast<float>(uniform_int(rng, 0, 20)) / 20.0f);
    }
    return f;
}

struct CorruptCase {
    std::string label;
    std::vector<std::uint8_t> bytes;
    ContainerError::Code expected;
};

/// Hand-built malformed GFSB byte streams, each violating exactly one rule.
inline std::vector<CorruptCase> corrupt_cases() {
    using Code = ContainerError::Code;
    auto header = [](std::uint16_t version, std::uint32_t count) {
        std::vector<std::uint8_t> b{'G', 'F', 'S', 'B'};
        b.push_back(static_cast<std::uint8_t>(version));
        b.push_back(static_cast<std::uint8_t>(version >> 8));
        for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(count >> (8 * i)));
        return b;
    };
    auto entry = [](std::vector<std::uint8_t>& b, const std::string& name, std::uint8_t dtype, std::uint8_t ndim,
                    std::vector<std::uint32_t> dims, std::size_t payload) {
        b.push_back(static_cast<std::uint8_t>(name.size()));
        b.push_back(0);
        b.insert(b.end(), name.begin(), name.end());
        b.push_back(dtype);
        b.push_back(ndim);
        for (auto d : dims)
            for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(d >> (8 * i)));
        b.insert(b.end(), payload, 0x3F);
    };

    std::vector<CorruptCase> cases;
    {
        auto b = header(1, 0);
        std::copy_n("XXXX", 4, b.begin());
        cases.push_back({"magic XXXX", b, Code::bad_magic});
    }
    cases.push_back({"two-byte file", {'G', 'F'}, Code::bad_magic});
    cases.push_back({"version 2", header(2, 0), Code::unsupported_version});
    {
        auto b = header(1, 0);
        b.resize(7);
        cases.push_back({"header cut inside count", b, Code::truncated});
    }
    {
        auto b = header(1, 1);
        entry(b, "t", 0, 1, {2}, 8);
        b.resize(b.size() - 4);
        cases.push_back({"payload cut short", b, Code::truncated});
    }
    {
        auto b = header(1, 2);
        entry(b, "t", 1, 1, {3}, 3);
        cases.push_back({"entry count exceeds entries", b, Code::truncated});
    }
    {
        auto b = header(1, 1);
        entry(b, "t", 7, 1, {2}, 8);
        cases.push_back({"dtype 7", b, Code::bad_dtype});
    }
    {
        auto b = header(1, 1);
        entry(b, "t", 1, 0, {}, 0);
        cases.push_back({"rank 0", b, Code::dims_mismatch});
    }
    {
        auto b = header(1, 1);
        entry(b, "t", 1, 5, {1, 1, 1, 1, 1}, 1);
        cases.push_back({"rank 5", b, Code::dims_mismatch});
    }
    {
        auto b = header(1, 1);
        entry(b, "t", 1, 1, {2}, 2);
        b.push_back(0);
        cases.push_back({"trailing byte", b, Code::dims_mismatch});
    }
    {
        auto b = header(1, 2);
        entry(b, "t", 1, 1, {1}, 1);
        entry(b, "t", 1, 1, {1}, 1);
        cases.push_back({"duplicate name", b, Code::duplicate_name});
    }
    {
        auto b = header(1, 1);
        entry(b, "", 1, 1, {1}, 1);
        cases.push_back({"empty name", b, Code::invalid_name});
    }
    return cases;
}

}  // namespace gfseg::test
