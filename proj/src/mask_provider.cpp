#include "gfseg/mask_provider.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <sstream>

#include "gfseg/container.hpp"

extern char** environ;

namespace gfseg {
namespace {

using Code = ProviderError::Code;

std::string substitute(std::string s, const std::string& key, const std::string& value) {
    for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size()))
        s.replace(pos, key.size(), value);
    return s;
}

class TempDir {
public:
    TempDir() {
        auto pattern = (std::filesystem::temp_directory_path() / "gfseg-XXXXXX").string();
        if (!mkdtemp(pattern.data())) throw ProviderError(Code::process_failed, "cannot create temporary directory");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

int run_process(const std::vector<std::string>& args) {
    std::vector<char*> argv;
    argv.reserve(args.size() + 1);
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    pid_t pid = 0;
    const int rc = posix_spawnp(&pid, argv[0], nullptr, nullptr, argv.data(), environ);
    if (rc != 0) throw ProviderError(Code::process_failed, "cannot start '" + args[0] + "': " + std::strerror(rc));
    int status = 0;
    while (waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) throw ProviderError(Code::process_failed, "waitpid failed for '" + args[0] + "'");
    }
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
}

}  // namespace

ProviderSpec parse_provider_spec(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string{} : text.substr(colon + 1);
    if (head == "oracle") return {ProviderSpec::Kind::oracle, rest};
    if (head == "dump") return {ProviderSpec::Kind::dump, rest};
    if (head == "exec") {
        if (rest.empty()) throw ProviderError(Code::config, "exec provider needs a command: exec:<path> [args]");
        return {ProviderSpec::Kind::exec, rest};
    }
    throw ProviderError(Code::config, "unknown provider '" + text + "' (expected oracle, dump or exec:<path>)");
}

MaskSet MaskProvider::generate_masks(const MaskRequest& request, const PointSet& points) {
    ++calls_;
    MaskSet out = produce(request, points);
    if (out.size() != points.size())
        throw ProviderError(Code::count_mismatch, request.episode_id + ": provider returned " +
                                                      std::to_string(out.size()) + " masks for " +
                                                      std::to_string(points.size()) + " points");
    if (out.resolution != request.resolution)
        throw ProviderError(Code::bad_response, request.episode_id + ": provider resolution " +
                                                    std::to_string(out.resolution.height) + "x" +
                                                    std::to_string(out.resolution.width) + " differs from expected " +
                                                    std::to_string(request.resolution.height) + "x" +
                                                    std::to_string(request.resolution.width));
    for (const auto& m : out.masks)
        if (m.size() != out.resolution) throw ProviderError(Code::bad_response, request.episode_id + ": mask size mismatch");
    return out;
}

Tensor points_tensor(const PointSet& points) {
    std::vector<std::int32_t> xy;
    xy.reserve(points.size() * 2);
    for (const auto& p : points.image_points) {
        xy.push_back(p.x);
        xy.push_back(p.y);
    }
    return Tensor("points", {static_cast<std::uint32_t>(points.size()), 2}, std::move(xy));
}

Tensor masks_tensor(const MaskSet& masks) {
    std::vector<std::uint8_t> data;
    data.reserve(masks.size() * masks.resolution.pixels());
    for (const auto& m : masks.masks) data.insert(data.end(), m.data().begin(), m.data().end());
    return Tensor("masks",
                  {static_cast<std::uint32_t>(masks.size()), static_cast<std::uint32_t>(masks.resolution.height),
                   static_cast<std::uint32_t>(masks.resolution.width)},
                  std::move(data));
}

MaskSet masks_from_tensor(const Tensor& t) {
    if (t.dtype() != DType::u8 || t.dims().size() != 3)
        throw ProviderError(Code::bad_response, "'masks' must be a u8 tensor of shape N x H x W");
    MaskSet out;
    out.resolution = {static_cast<int>(t.dims()[1]), static_cast<int>(t.dims()[2])};
    const auto plane = out.resolution.pixels();
    auto data = t.u8();
    for (std::uint32_t i = 0; i < t.dims()[0]; ++i) {
        auto first = data.begin() + static_cast<std::ptrdiff_t>(i * plane);
        try {
            out.masks.emplace_back(out.resolution, std::vector<std::uint8_t>(first, first + static_cast<std::ptrdiff_t>(plane)));
        } catch (const std::invalid_argument& e) {
            throw ProviderError(Code::bad_response, "mask " + std::to_string(i) + ": " + e.what());
        }
    }
    return out;
}

void write_dump(const std::filesystem::path& dir, const std::string& episode_id, const PointSet& points,
                const MaskSet& masks) {
    std::filesystem::create_directories(dir);
    write_container({points_tensor(points), masks_tensor(masks)}, dir / (episode_id + ".gfsb"));
}

MaskSet DumpProvider::produce(const MaskRequest& request, const PointSet& points) {
    const auto path = dir_ / (request.episode_id + ".gfsb");
    if (!std::filesystem::exists(path))
        throw ProviderError(Code::missing_dump, "no recorded masks for episode '" + request.episode_id + "' in " + dir_.string());
    std::vector<Tensor> entries;
    try {
        entries = read_container(path);
    } catch (const ContainerError& e) {
        throw ProviderError(Code::bad_response, e.what());
    }
    const Tensor* recorded = try_find_tensor(entries, "points");
    const Tensor* masks = try_find_tensor(entries, "masks");
    if (!recorded || !masks) throw ProviderError(Code::bad_response, path.string() + ": expected 'points' and 'masks'");
    if (!(*recorded == points_tensor(points)))
        throw ProviderError(Code::point_mismatch,
                            request.episode_id + ": requested points differ from the recorded points in " + path.string());
    return masks_from_tensor(*masks);
}

ExecProvider::ExecProvider(std::string command_line) {
    std::istringstream in(command_line);
    for (std::string tok; in >> tok;) argv_.push_back(tok);
    if (argv_.empty()) throw ProviderError(Code::config, "exec provider: empty command line");
}

MaskSet ExecProvider::produce(const MaskRequest& request, const PointSet& points) {
    TempDir tmp;
    const auto points_in = tmp.path() / "points.gfsb";
    const auto masks_out = tmp.path() / "masks.gfsb";
    write_container({points_tensor(points)}, points_in);

    std::vector<std::string> args;
    for (const auto& a : argv_) args.push_back(substitute(substitute(a, "{episode}", request.episode_id), "{hint}", request.hint));
    args.insert(args.end(), {"--points-in", points_in.string(), "--episode", request.episode_id, "--masks-out",
                             masks_out.string()});

    const int rc = run_process(args);
    if (rc != 0)
        throw ProviderError(Code::process_failed,
                            request.episode_id + ": provider '" + argv_.front() + "' exited with status " + std::to_string(rc));
    if (!std::filesystem::exists(masks_out))
        throw ProviderError(Code::bad_response, request.episode_id + ": provider wrote no masks container");
    std::vector<Tensor> entries;
    try {
        entries = read_container(masks_out);
    } catch (const ContainerError& e) {
        throw ProviderError(Code::bad_response, request.episode_id + ": unreadable provider response: " + e.what());
    }
    const Tensor* masks = try_find_tensor(entries, "masks");
    if (!masks) throw ProviderError(Code::bad_response, request.episode_id + ": response lacks a 'masks' tensor");
    return masks_from_tensor(*masks);
}

}  // namespace gfseg
