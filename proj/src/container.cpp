#include "gfseg/container.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <set>

namespace gfseg {
namespace {

using Code = ContainerError::Code;

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void bytes(const void* p, std::size_t n) {
        auto b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

    bool has(std::size_t n) const { return in_.size() - pos_ >= n; }
    std::size_t remaining() const { return in_.size() - pos_; }

    void need(std::size_t n, const char* what) const {
        if (!has(n)) throw ContainerError(Code::truncated, std::string("truncated container while reading ") + what);
    }
    std::uint8_t u8(const char* what) {
        need(1, what);
        return in_[pos_++];
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = static_cast<std::uint16_t>(in_[pos_] | (in_[pos_ + 1] << 8));
        pos_ += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    const std::uint8_t* take(std::size_t n, const char* what) {
        need(n, what);
        const std::uint8_t* p = in_.data() + pos_;
        pos_ += n;
        return p;
    }

private:
    const std::vector<std::uint8_t>& in_;
    std::size_t pos_ = 0;
};

void encode_payload(Writer& w, const Tensor& t) {
    switch (t.dtype()) {
        case DType::f32:
            for (float v : t.f32()) w.u32(std::bit_cast<std::uint32_t>(v));
            break;
        case DType::u8: {
            auto v = t.u8();
            w.bytes(v.data(), v.size());
            break;
        }
        case DType::i32:
            for (std::int32_t v : t.i32()) w.u32(static_cast<std::uint32_t>(v));
            break;
    }
}

std::uint32_t le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::vector<std::uint8_t> encode_container(const std::vector<Tensor>& entries) {
    std::set<std::string> seen;
    for (const auto& t : entries) {
        if (t.name().empty()) throw ContainerError(Code::invalid_name, "tensor name must be non-empty");
        if (t.name().size() > 0xFFFF) throw ContainerError(Code::invalid_name, "tensor name too long");
        if (!seen.insert(t.name()).second)
            throw ContainerError(Code::duplicate_name, "duplicate tensor name '" + t.name() + "'");
    }

    Writer w;
    w.bytes("GFSB", 4);
    w.u16(kContainerVersion);
    w.u32(static_cast<std::uint32_t>(entries.size()));
    for (const auto& t : entries) {
        w.u16(static_cast<std::uint16_t>(t.name().size()));
        w.bytes(t.name().data(), t.name().size());
        w.u8(static_cast<std::uint8_t>(t.dtype()));
        w.u8(static_cast<std::uint8_t>(t.dims().size()));
        for (auto d : t.dims()) w.u32(d);
        encode_payload(w, t);
    }
    return w.take();
}

std::vector<Tensor> decode_container(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes);
    if (!r.has(4)) throw ContainerError(Code::bad_magic, "file too short for GFSB magic");
    const std::uint8_t* magic = r.take(4, "magic");
    if (std::string(reinterpret_cast<const char*>(magic), 4) != "GFSB")
        throw ContainerError(Code::bad_magic, "bad magic: not a GFSB container");
    std::uint16_t version = r.u16("version");
    if (version != kContainerVersion)
        throw ContainerError(Code::unsupported_version, "unsupported GFSB version " + std::to_string(version));
    std::uint32_t count = r.u32("entry count");

    std::vector<Tensor> out;
    std::set<std::string> seen;
    for (std::uint32_t e = 0; e < count; ++e) {
        std::uint16_t name_len = r.u16("name length");
        if (name_len == 0) throw ContainerError(Code::invalid_name, "entry " + std::to_string(e) + " has an empty name");
        const std::uint8_t* name_bytes = r.take(name_len, "name");
        std::string name(reinterpret_cast<const char*>(name_bytes), name_len);
        if (!seen.insert(name).second) throw ContainerError(Code::duplicate_name, "duplicate tensor name '" + name + "'");

        std::uint8_t dtype = r.u8("dtype");
        if (dtype > 2) throw ContainerError(Code::bad_dtype, "entry '" + name + "' has unknown dtype " + std::to_string(dtype));
        std::uint8_t ndim = r.u8("ndim");
        if (ndim < 1 || ndim > 4)
            throw ContainerError(Code::dims_mismatch, "entry '" + name + "' has rank " + std::to_string(ndim));
        std::vector<std::uint32_t> dims(ndim);
        std::uint64_t elements = 1;
        for (auto& d : dims) {
            d = r.u32("dims");
            elements *= d;
        }
        const std::size_t elem_size = dtype_size(static_cast<DType>(dtype));
        if (elements > r.remaining() / elem_size)
            throw ContainerError(Code::truncated, "truncated payload for entry '" + name + "'");
        const std::uint8_t* p = r.take(static_cast<std::size_t>(elements) * elem_size, "payload");
        const auto n = static_cast<std::size_t>(elements);

        switch (static_cast<DType>(dtype)) {
            case DType::f32: {
                std::vector<float> v(n);
                for (std::size_t i = 0; i < n; ++i) v[i] = std::bit_cast<float>(le32(p + 4 * i));
                out.emplace_back(std::move(name), std::move(dims), std::move(v));
                break;
            }
            case DType::u8:
                out.emplace_back(std::move(name), std::move(dims), std::vector<std::uint8_t>(p, p + n));
                break;
            case DType::i32: {
                std::vector<std::int32_t> v(n);
                for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::int32_t>(le32(p + 4 * i));
                out.emplace_back(std::move(name), std::move(dims), std::move(v));
                break;
            }
        }
    }
    if (r.remaining() != 0)
        throw ContainerError(Code::dims_mismatch,
                             std::to_string(r.remaining()) + " trailing bytes after the declared payloads");
    return out;
}

void write_container(const std::vector<Tensor>& entries, const std::filesystem::path& path) {
    auto bytes = encode_container(entries);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ContainerError(Code::io, "cannot open '" + path.string() + "' for writing");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw ContainerError(Code::io, "write failed for '" + path.string() + "'");
}

std::vector<Tensor> read_container(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ContainerError(Code::io, "cannot open '" + path.string() + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    try {
        return decode_container(bytes);
    } catch (const ContainerError& e) {
        throw ContainerError(e.code(), path.string() + ": " + e.what());
    }
}

const Tensor* try_find_tensor(const std::vector<Tensor>& entries, const std::string& name) {
    for (const auto& t : entries)
        if (t.name() == name) return &t;
    return nullptr;
}

const Tensor& find_tensor(const std::vector<Tensor>& entries, const std::string& name) {
    if (auto t = try_find_tensor(entries, name)) return *t;
    throw std::out_of_range("missing tensor '" + name + "'");
}

}  // namespace gfseg
