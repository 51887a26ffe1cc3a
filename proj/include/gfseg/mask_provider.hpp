#pragma once
// Promptable mask generation behind a small interface: one mask per point prompt.
//
// Exec protocol: the provider process is started as
//   <executable> [template args...] --points-in <file> --episode <id> --masks-out <file>
// where the points file is a GFSB container with "points" (i32 N x 2, (x, y)) and the
// process must write a GFSB container with "masks" (u8 N x H x W), in point order.
// Template args may contain {episode} and {hint}, substituted per request.
//
// Dump layout: <dir>/<episode_id>.gfsb with tensors "points" and "masks"; requested points
// must equal the recorded points exactly.

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfseg/alignment.hpp"
#include "gfseg/tensor.hpp"

namespace gfseg {

struct MaskSet {
    std::vector<BinaryMask> masks;
    ImageSize resolution;

    std::size_t size() const { return masks.size(); }
    const BinaryMask& operator[](std::size_t i) const { return masks[i]; }
};

struct ProviderSpec {
    enum class Kind { oracle, dump, exec };
    Kind kind = Kind::oracle;
    std::string locator;
};

/// Parses "oracle", "oracle:<ambiguity>", "dump", "dump:<dir>" or "exec:<command line>".
ProviderSpec parse_provider_spec(const std::string& text);

class ProviderError : public std::runtime_error {
public:
    enum class Code { missing_dump, point_mismatch, process_failed, count_mismatch, bad_response, config };

    ProviderError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

struct MaskRequest {
    std::string episode_id;
    std::string hint;
    ImageSize resolution;
};

class MaskProvider {
public:
    virtual ~MaskProvider() = default;

    /// Validates the response (count, resolution, binary values) and counts the call.
    MaskSet generate_masks(const MaskRequest& request, const PointSet& points);

    std::size_t call_count() const { return calls_.load(); }

protected:
    virtual MaskSet produce(const MaskRequest& request, const PointSet& points) = 0;

private:
    std::atomic<std::size_t> calls_{0};
};

class DumpProvider final : public MaskProvider {
public:
    explicit DumpProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}

protected:
    MaskSet produce(const MaskRequest& request, const PointSet& points) override;

private:
    std::filesystem::path dir_;
};

class ExecProvider final : public MaskProvider {
public:
    explicit ExecProvider(std::string command_line);

    const std::vector<std::string>& argv_template() const { return argv_; }

protected:
    MaskSet produce(const MaskRequest& request, const PointSet& points) override;

private:
    std::vector<std::string> argv_;
};

/// "points" tensor (i32 N x 2 of (x, y)) for a point set.
Tensor points_tensor(const PointSet& points);
/// "masks" tensor (u8 N x H x W).
Tensor masks_tensor(const MaskSet& masks);
MaskSet masks_from_tensor(const Tensor& t);

/// Records a replayable dump for one episode.
void write_dump(const std::filesystem::path& dir, const std::string& episode_id, const PointSet& points,
                const MaskSet& masks);

}  // namespace gfseg
