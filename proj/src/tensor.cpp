#include "gfseg/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace gfseg {

const char* dtype_name(DType d) {
    switch (d) {
        case DType::f32: return "f32";
        case DType::u8: return "u8";
        case DType::i32: return "i32";
    }
    return "?";
}

std::size_t dtype_size(DType d) {
    switch (d) {
        case DType::f32: return 4;
        case DType::u8: return 1;
        case DType::i32: return 4;
    }
    return 0;
}

Tensor::Tensor(std::string name, std::vector<std::uint32_t> dims, std::vector<float> data)
    : name_(std::move(name)), dims_(std::move(dims)), payload_(std::move(data)) {
    validate();
}

Tensor::Tensor(std::string name, std::vector<std::uint32_t> dims, std::vector<std::uint8_t> data)
    : name_(std::move(name)), dims_(std::move(dims)), payload_(std::move(data)) {
    validate();
}

Tensor::Tensor(std::string name, std::vector<std::uint32_t> dims, std::vector<std::int32_t> data)
    : name_(std::move(name)), dims_(std::move(dims)), payload_(std::move(data)) {
    validate();
}

std::size_t Tensor::element_count() const {
    return std::visit([](const auto& v) { return v.size(); }, payload_);
}

void Tensor::validate() const {
    if (dims_.empty() || dims_.size() > 4)
        throw std::invalid_argument("tensor '" + name_ + "': rank must be in [1, 4]");
    std::uint64_t product = 1;
    for (auto d : dims_) product *= d;
    if (product != element_count())
        throw std::invalid_argument("tensor '" + name_ + "': dims product " + std::to_string(product) +
                                    " != payload size " + std::to_string(element_count()));
}

std::span<const float> Tensor::f32() const {
    if (dtype() != DType::f32) throw std::invalid_argument("tensor '" + name_ + "' is not f32");
    return std::get<0>(payload_);
}

std::span<const std::uint8_t> Tensor::u8() const {
    if (dtype() != DType::u8) throw std::invalid_argument("tensor '" + name_ + "' is not u8");
    return std::get<1>(payload_);
}

std::span<const std::int32_t> Tensor::i32() const {
    if (dtype() != DType::i32) throw std::invalid_argument("tensor '" + name_ + "' is not i32");
    return std::get<2>(payload_);
}

bool operator==(const Tensor& a, const Tensor& b) {
    if (a.name_ != b.name_ || a.dims_ != b.dims_ || a.payload_.index() != b.payload_.index()) return false;
    if (a.dtype() == DType::f32) {
        auto x = a.f32();
        auto y = b.f32();
        return std::equal(x.begin(), x.end(), y.begin(), y.end(), [](float p, float q) {
            return std::bit_cast<std::uint32_t>(p) == std::bit_cast<std::uint32_t>(q);
        });
    }
    return a.payload_ == b.payload_;
}

FeatureMap::FeatureMap(GridSize grid, int channels, std::vector<float> data)
    : grid_(grid), channels_(channels), data_(std::move(data)) {
    if (grid_.h < 1 || grid_.w < 1 || channels_ < 1)
        throw std::invalid_argument("feature map extents must be >= 1");
    if (data_.size() != static_cast<std::size_t>(grid_.cells()) * static_cast<std::size_t>(channels_))
        throw std::invalid_argument("feature map payload does not match h*w*c");
    if (!std::all_of(data_.begin(), data_.end(), [](float v) { return std::isfinite(v); }))
        throw std::invalid_argument("feature map contains non-finite values");
}

FeatureMap FeatureMap::from_tensor(const Tensor& t) {
    if (t.dims().size() != 3) throw std::invalid_argument("features tensor must be rank 3 (h x w x c)");
    auto v = t.f32();
    return FeatureMap({static_cast<int>(t.dims()[0]), static_cast<int>(t.dims()[1])},
                      static_cast<int>(t.dims()[2]), std::vector<float>(v.begin(), v.end()));
}

Tensor FeatureMap::to_tensor(std::string name) const {
    return Tensor(std::move(name),
                  {static_cast<std::uint32_t>(grid_.h), static_cast<std::uint32_t>(grid_.w),
                   static_cast<std::uint32_t>(channels_)},
                  data_);
}

BinaryMask::BinaryMask(ImageSize size) : size_(size), data_(size.pixels(), 0) {
    if (size.height < 0 || size.width < 0) throw std::invalid_argument("negative mask extent");
}

BinaryMask::BinaryMask(ImageSize size, std::vector<std::uint8_t> data) : size_(size), data_(std::move(data)) {
    if (size.height < 0 || size.width < 0) throw std::invalid_argument("negative mask extent");
    if (data_.size() != size_.pixels()) throw std::invalid_argument("mask payload does not match H*W");
    if (!std::all_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v <= 1; }))
        throw std::invalid_argument("mask values must be 0 or 1");
}

BinaryMask BinaryMask::from_tensor(const Tensor& t) {
    if (t.dims().size() != 2) throw std::invalid_argument("mask tensor must be rank 2 (H x W)");
    auto v = t.u8();
    return BinaryMask({static_cast<int>(t.dims()[0]), static_cast<int>(t.dims()[1])},
                      std::vector<std::uint8_t>(v.begin(), v.end()));
}

Tensor BinaryMask::to_tensor(std::string name) const {
    return Tensor(std::move(name),
                  {static_cast<std::uint32_t>(size_.height), static_cast<std::uint32_t>(size_.width)}, data_);
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(data_.begin(), data_.end(), std::uint8_t{1}));
}

void BinaryMask::require_same_size(const BinaryMask& other) const {
    if (size_ != other.size_) throw std::invalid_argument("mask size mismatch");
}

BinaryMask& BinaryMask::operator|=(const BinaryMask& other) {
    require_same_size(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] |= other.data_[i];
    return *this;
}

BinaryMask& BinaryMask::operator&=(const BinaryMask& other) {
    require_same_size(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] &= other.data_[i];
    return *this;
}

BinaryMask BinaryMask::minus(const BinaryMask& other) const {
    require_same_size(other);
    BinaryMask out(size_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] & static_cast<std::uint8_t>(!other.data_[i]);
    return out;
}

bool BinaryMask::intersects(const BinaryMask& other) const {
    require_same_size(other);
    for (std::size_t i = 0; i < data_.size(); ++i)
        if (data_[i] & other.data_[i]) return true;
    return false;
}

bool BinaryMask::subset_of(const BinaryMask& other) const {
    require_same_size(other);
    for (std::size_t i = 0; i < data_.size(); ++i)
        if (data_[i] && !other.data_[i]) return false;
    return true;
}

std::size_t intersection_count(const BinaryMask& a, const BinaryMask& b) {
    if (a.size() != b.size()) throw std::invalid_argument("mask size mismatch");
    auto x = a.data();
    auto y = b.data();
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) n += x[i] & y[i];
    return n;
}

std::size_t union_count(const BinaryMask& a, const BinaryMask& b) {
    if (a.size() != b.size()) throw std::invalid_argument("mask size mismatch");
    auto x = a.data();
    auto y = b.data();
    std::size_t n = 0;
    for (std::size_t i = 0; i < x.size(); ++i) n += x[i] | y[i];
    return n;
}

}  // namespace gfseg
