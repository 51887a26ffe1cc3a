#pragma once
// GFSB: minimal binary tensor container used between the core and external providers.
//
// Layout (all integers little-endian):
//   "GFSB" | u16 version (=1) | u32 entry_count
//   per entry: u16 name_len | name bytes | u8 dtype (0=f32, 1=u8, 2=i32) | u8 ndim
//              | ndim x u32 dims | payload (row-major, little-endian)

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfseg/tensor.hpp"

namespace gfseg {

inline constexpr std::uint16_t kContainerVersion = 1;

class ContainerError : public std::runtime_error {
public:
    enum class Code {
        io,
        bad_magic,
        unsupported_version,
        truncated,
        dims_mismatch,
        bad_dtype,
        duplicate_name,
        invalid_name,
    };

    ContainerError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

std::vector<std::uint8_t> encode_container(const std::vector<Tensor>& entries);
std::vector<Tensor> decode_container(const std::vector<std::uint8_t>& bytes);

void write_container(const std::vector<Tensor>& entries, const std::filesystem::path& path);
std::vector<Tensor> read_container(const std::filesystem::path& path);

/// Looks up an entry by name; throws std::out_of_range naming the missing tensor.
const Tensor& find_tensor(const std::vector<Tensor>& entries, const std::string& name);
const Tensor* try_find_tensor(const std::vector<Tensor>& entries, const std::string& name);

}  // namespace gfseg
