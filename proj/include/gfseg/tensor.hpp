#pragma once
// Core array types shared by every stage of the pipeline.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace gfseg {

enum class DType : std::uint8_t { f32 = 0, u8 = 1, i32 = 2 };

const char* dtype_name(DType d);
std::size_t dtype_size(DType d);

/// Named, row-major, little-endian-serializable array.
/// Payload is held as a typed vector; the active alternative is the dtype.
class Tensor {
public:
    using Payload = std::variant<std::vector<float>, std::vector<std::uint8_t>, std::vector<std::int32_t>>;

    Tensor() = default;
    Tensor(std::string name, std::vector<std::uint32_t> dims, std::vector<float> data);
    Tensor(std::string name, std::vector<std::uint32_t> dims, std::vector<std::uint8_t> data);
    Tensor(std::string name, std::vector<std::uint32_t> dims, std::vector<std::int32_t> data);

    const std::string& name() const { return name_; }
    DType dtype() const { return static_cast<DType>(payload_.index()); }
    const std::vector<std::uint32_t>& dims() const { return dims_; }
    std::size_t element_count() const;

    std::span<const float> f32() const;
    std::span<const std::uint8_t> u8() const;
    std::span<const std::int32_t> i32() const;

    const Payload& payload() const { return payload_; }

    /// Bitwise equality: f32 payloads compare by representation, so NaNs round-trip.
    friend bool operator==(const Tensor& a, const Tensor& b);

private:
    void validate() const;

    std::string name_;
    std::vector<std::uint32_t> dims_;
    Payload payload_;
};

struct GridSize {
    int h = 0;
    int w = 0;
    int cells() const { return h * w; }
    friend bool operator==(const GridSize&, const GridSize&) = default;
};

struct ImageSize {
    int height = 0;
    int width = 0;
    std::size_t pixels() const { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
    friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

struct GridPoint {
    int row = 0;
    int col = 0;
    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct PixelPoint {
    int x = 0;
    int y = 0;
    friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

/// Dense h x w x c embedding grid.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(GridSize grid, int channels, std::vector<float> data);

    static FeatureMap from_tensor(const Tensor& t);
    Tensor to_tensor(std::string name = "features") const;

    GridSize grid() const { return grid_; }
    int height() const { return grid_.h; }
    int width() const { return grid_.w; }
    int channels() const { return channels_; }

    std::span<const float> at(int flat) const {
        return {data_.data() + static_cast<std::size_t>(flat) * static_cast<std::size_t>(channels_),
                static_cast<std::size_t>(channels_)};
    }
    std::span<const float> at(GridPoint p) const { return at(p.row * grid_.w + p.col); }
    std::span<const float> data() const { return data_; }

private:
    GridSize grid_;
    int channels_ = 0;
    std::vector<float> data_;
};

/// H x W mask with values in {0, 1}.
class BinaryMask {
public:
    BinaryMask() = default;
    explicit BinaryMask(ImageSize size);
    BinaryMask(ImageSize size, std::vector<std::uint8_t> data);

    static BinaryMask from_tensor(const Tensor& t);
    Tensor to_tensor(std::string name = "mask") const;

    ImageSize size() const { return size_; }
    int height() const { return size_.height; }
    int width() const { return size_.width; }

    std::uint8_t operator()(int y, int x) const { return data_[static_cast<std::size_t>(y) * size_.width + x]; }
    std::uint8_t& operator()(int y, int x) { return data_[static_cast<std::size_t>(y) * size_.width + x]; }

    std::span<const std::uint8_t> data() const { return data_; }
    std::span<std::uint8_t> data() { return data_; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }

    BinaryMask& operator|=(const BinaryMask& other);
    BinaryMask& operator&=(const BinaryMask& other);
    /// this & ~other
    BinaryMask minus(const BinaryMask& other) const;
    bool intersects(const BinaryMask& other) const;
    bool subset_of(const BinaryMask& other) const;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    void require_same_size(const BinaryMask& other) const;

    ImageSize size_;
    std::vector<std::uint8_t> data_;
};

std::size_t intersection_count(const BinaryMask& a, const BinaryMask& b);
std::size_t union_count(const BinaryMask& a, const BinaryMask& b);

}  // namespace gfseg
