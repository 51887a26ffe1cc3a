#include "gfseg/app.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <thread>

#include "gfseg/container.hpp"
#include "gfseg/overlay.hpp"

namespace gfseg::app {
namespace {

using nlohmann::json;

std::string as_text(const json& v, const char* key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "on" : "off";
    throw ConfigError(std::string("setting '") + key + "' must be a string");
}

template <typename T, typename Parse>
T parse_setting(const json& v, const char* key, Parse parse) {
    try {
        return parse(as_text(v, key));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(key) + ": " + e.what());
    }
}

void apply(RunSettings& s, const json& layer, const char* origin) {
    if (layer.is_null()) return;
    if (!layer.is_object()) throw ConfigError(std::string(origin) + " must be a JSON object");
    for (const auto& [key, v] : layer.items()) {
        if (key == "provider") {
            s.provider = as_text(v, "provider");
        } else if (key == "clustering") {
            s.gate.clustering = parse_setting<ClusteringMode>(v, "clustering", parse_clustering_mode);
        } else if (key == "positive") {
            s.gate.positive = parse_setting<PositiveStrategy>(v, "positive", parse_positive_strategy);
        } else if (key == "growth") {
            s.gate.growth = parse_setting<GrowthMode>(v, "growth", parse_growth_mode);
        } else if (key == "pivot") {
            s.gate.pivot = parse_setting<PivotMode>(v, "pivot", parse_pivot_mode);
        } else if (key == "overshoot") {
            const auto t = as_text(v, "overshoot");
            if (t != "on" && t != "off") throw ConfigError("overshoot must be on|off, got '" + t + "'");
            s.gate.overshoot = t == "on";
        } else if (key == "seed") {
            if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0))
                throw ConfigError("seed must be a non-negative integer");
            s.seed = v.get<std::uint64_t>();
        } else if (key == "ambiguity") {
            s.ambiguity = parse_setting<synth::Ambiguity>(v, "ambiguity", synth::parse_ambiguity);
        } else if (key == "threads") {
            if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 256)
                throw ConfigError("threads must be an integer in [1, 256]");
            s.threads = v.get<int>();
        } else {
            throw ConfigError(std::string("unknown setting '") + key + "' in " + origin);
        }
    }
}

std::map<std::string, std::filesystem::path> scene_paths(const Manifest& manifest) {
    std::map<std::string, std::filesystem::path> out;
    for (const auto& e : manifest.episodes())
        if (e.is_object() && e.contains("scene") && e.contains("id"))
            out[e.at("id").get<std::string>()] = manifest.root / e.at("scene").get<std::string>();
    return out;
}

}  // namespace

RunSettings resolve_settings(const json& manifest_defaults, const json& flags) {
    RunSettings s;
    apply(s, manifest_defaults, "manifest defaults");
    apply(s, flags, "flags");
    return s;
}

std::unique_ptr<MaskProvider> make_provider(const RunSettings& settings, const Manifest& manifest) {
    ProviderSpec spec;
    try {
        spec = parse_provider_spec(settings.provider);
    } catch (const ProviderError& e) {
        throw ConfigError(e.what());
    }
    switch (spec.kind) {
        case ProviderSpec::Kind::oracle: {
            auto ambiguity = settings.ambiguity;
            if (!spec.locator.empty()) {
                try {
                    ambiguity = synth::parse_ambiguity(spec.locator);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(e.what());
                }
            }
            auto paths = scene_paths(manifest);
            synth::SceneLookup lookup = [paths = std::move(paths)](const std::string& id) {
                auto it = paths.find(id);
                if (it == paths.end())
                    throw ProviderError(ProviderError::Code::config,
                                        "oracle provider: episode '" + id + "' has no 'scene' entry in the manifest");
                try {
                    return synth::scene_from_tensors(read_container(it->second));
                } catch (const std::exception& e) {
                    throw ProviderError(ProviderError::Code::config, "oracle provider: " + std::string(e.what()));
                }
            };
            return std::make_unique<synth::OracleProvider>(std::move(lookup), ambiguity, settings.seed);
        }
        case ProviderSpec::Kind::dump:
            return std::make_unique<DumpProvider>(spec.locator.empty() ? manifest.root / "dumps"
                                                                       : std::filesystem::path(spec.locator));
        case ProviderSpec::Kind::exec:
            return std::make_unique<ExecProvider>(spec.locator);
    }
    throw ConfigError("unsupported provider");
}

RunSummary run_manifest(const Manifest& manifest, const RunSettings& settings, MaskProvider& provider,
                        const std::filesystem::path& out, const std::optional<std::filesystem::path>& overlays) {
    const auto& entries = manifest.episodes();
    const std::size_t n = entries.size();
    std::vector<std::optional<EpisodeResult>> results(n);
    std::vector<std::exception_ptr> errors(n);
    std::filesystem::create_directories(out);
    if (overlays) std::filesystem::create_directories(*overlays);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                const auto episode = load_episode(entries[i], manifest.root);
                auto r = run_episode(episode, provider, settings.gate);
                write_result(r, out);
                if (overlays) emit_overlay(episode, r, *overlays / (episode.id + ".png"));
                results[i] = std::move(r);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, settings.threads));
    if (threads == 1 || n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    RunSummary summary;
    summary.provider_calls = provider.call_count();
    for (auto& r : results) summary.results.push_back(std::move(*r));
    const bool all_gt = !summary.results.empty() &&
                        std::all_of(summary.results.begin(), summary.results.end(), [](const auto& r) { return r.has_gt; });
    if (all_gt) {
        summary.report = evaluate(summary.results);
        write_report(*summary.report, out / "report.json");
    }
    return summary;
}

RunSummary run_manifest(const std::filesystem::path& manifest_path, const json& flags, const std::filesystem::path& out,
                        const std::optional<std::filesystem::path>& overlays) {
    const auto manifest = read_manifest(manifest_path);
    const auto settings = resolve_settings(manifest.defaults(), flags);
    auto provider = make_provider(settings, manifest);
    return run_manifest(manifest, settings, *provider, out, overlays);
}

Report evaluate_results_dir(const std::filesystem::path& results) {
    if (!std::filesystem::is_directory(results))
        throw ConfigError("results directory '" + results.string() + "' does not exist");
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(results))
        if (e.is_regular_file() && e.path().extension() == ".gfsb") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no result containers in '" + results.string() + "'");
    std::vector<EpisodeScore> scores;
    for (const auto& f : files) scores.push_back(read_result_score(f));
    return evaluate(scores);
}

std::uint64_t suite_episode_seed(std::uint64_t seed, int index) {
    return synth::derive_seed(seed, 1000 + static_cast<std::uint64_t>(index));
}

std::string suite_episode_id(synth::Difficulty difficulty, int index) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d", index);
    return synth::to_string(difficulty) + "_" + buf;
}

void synth_suite(const SynthSuiteOptions& options, const std::filesystem::path& out) {
    if (options.count < 0) throw ConfigError("count must be non-negative");
    std::filesystem::create_directories(out / "dumps");

    json episodes = json::array();
    for (int i = 0; i < options.count; ++i) {
        const auto id = suite_episode_id(options.difficulty, i);
        const auto ep = synth::make_episode(suite_episode_seed(options.seed, i), options.difficulty, options.episode, id);
        const auto& e = ep.episode;

        write_container({e.target_features.to_tensor("features")}, out / (id + "_target.gfsb"));
        json refs = json::array();
        for (std::size_t k = 0; k < e.references.size(); ++k) {
            const auto name = id + "_ref" + std::to_string(k) + ".gfsb";
            write_container({e.references[k].features.to_tensor("features"), e.references[k].mask.to_tensor("mask")},
                            out / name);
            refs.push_back(name);
        }
        write_container({e.target_gt->to_tensor("mask")}, out / (id + "_gt.gfsb"));
        write_container(synth::scene_tensors(ep.target), out / (id + "_scene.gfsb"));

        const auto aligned = align_episode(e);
        write_dump(out / "dumps", id, aligned.points,
                   synth::oracle_masks(ep.target, aligned.points, options.ambiguity, options.seed));

        json entry;
        entry["id"] = id;
        entry["class_id"] = e.class_id;
        entry["target"] = id + "_target.gfsb";
        entry["references"] = refs;
        entry["gt"] = id + "_gt.gfsb";
        entry["scene"] = id + "_scene.gfsb";
        entry["image_size"] = {e.image_size.height, e.image_size.width};
        entry["provider_size"] = {e.provider_size.height, e.provider_size.width};
        episodes.push_back(std::move(entry));
    }

    json doc;
    doc["episodes"] = std::move(episodes);
    doc["defaults"] = {{"seed", options.seed}, {"ambiguity", synth::to_string(options.ambiguity)}};
    write_manifest(doc, out / "manifest.json");
}

}  // namespace gfseg::app
