#pragma once
// Command-level operations behind the gfseg CLI: running a manifest, evaluating a results
// directory and writing synthetic suites.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfseg/evaluation.hpp"
#include "gfseg/gating.hpp"
#include "gfseg/mask_provider.hpp"
#include "gfseg/pipeline.hpp"
#include "gfseg/synthetic.hpp"

namespace gfseg::app {

/// Bad flags, manifest defaults or episode data; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunSettings {
    std::string provider = "oracle";
    GateConfig gate;
    std::uint64_t seed = 0;
    synth::Ambiguity ambiguity = synth::Ambiguity::mixed;
    int threads = 1;
};

/// Built-in defaults, overridden by manifest "defaults", overridden by explicit flags.
/// Both objects use the flag names as keys: provider, clustering, positive, growth, pivot,
/// overshoot ("on"/"off" or bool), seed, ambiguity, threads.
RunSettings resolve_settings(const nlohmann::json& manifest_defaults, const nlohmann::json& flags);

std::unique_ptr<MaskProvider> make_provider(const RunSettings& settings, const Manifest& manifest);

struct RunSummary {
    std::vector<EpisodeResult> results;  // manifest order
    std::optional<Report> report;        // present when every episode has ground truth
    std::size_t provider_calls = 0;
};

/// Runs every manifest episode, writes <out>/<id>.gfsb per episode and <out>/report.json.
RunSummary run_manifest(const std::filesystem::path& manifest_path, const nlohmann::json& flags,
                        const std::filesystem::path& out, const std::optional<std::filesystem::path>& overlays = {});

/// Same, with an already-resolved configuration and provider.
RunSummary run_manifest(const Manifest& manifest, const RunSettings& settings, MaskProvider& provider,
                        const std::filesystem::path& out, const std::optional<std::filesystem::path>& overlays = {});

/// Report over every *.gfsb result container in a directory.
Report evaluate_results_dir(const std::filesystem::path& results);

struct SynthSuiteOptions {
    std::uint64_t seed = 0;
    int count = 10;
    synth::Difficulty difficulty = synth::Difficulty::easy;
    synth::Ambiguity ambiguity = synth::Ambiguity::mixed;
    synth::SyntheticOptions episode;
};

/// Writes manifest.json, episode containers, scene ground truth and replayable dumps (dumps/<id>.gfsb).
void synth_suite(const SynthSuiteOptions& options, const std::filesystem::path& out);

/// Seed of the i-th episode of a suite.
std::uint64_t suite_episode_seed(std::uint64_t seed, int index);
std::string suite_episode_id(synth::Difficulty difficulty, int index);

}  // namespace gfseg::app
