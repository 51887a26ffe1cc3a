// gfseg: run few-shot segmentation episodes, evaluate results, generate synthetic suites.
//
// Exit codes: 0 success, 1 unexpected failure, 2 configuration or data error, 3 provider error.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "gfseg/app.hpp"
#include "gfseg/container.hpp"
#include "gfseg/episode.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitProvider = 3;

void print_report(const gfseg::Report& report) {
    std::cout << gfseg::report_json(report).dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Training-free graph-based few-shot segmentation"};
    cli.require_subcommand(1);

    auto* run = cli.add_subcommand("run", "Segment every episode of a manifest");
    std::string manifest, out, overlays;
    std::string provider, clustering, positive, growth, pivot, overshoot, ambiguity;
    std::uint64_t seed = 0;
    int threads = 1;
    run->add_option("--manifest", manifest, "Episode manifest (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out, "Results directory")->required();
    run->add_option("--overlays", overlays, "Directory for PNG overlays");
    auto* o_provider = run->add_option("--provider", provider, "oracle[:ambiguity] | dump[:dir] | exec:<command>");
    auto* o_clustering = run->add_option("--clustering", clustering, "weak|strong");
    auto* o_positive = run->add_option("--positive", positive, "num|sum");
    auto* o_growth = run->add_option("--growth", growth, "grow|union|off");
    auto* o_pivot = run->add_option("--pivot", pivot, "prod|plus|mid|neg");
    auto* o_overshoot = run->add_option("--overshoot", overshoot, "on|off");
    auto* o_seed = run->add_option("--seed", seed, "Oracle seed");
    auto* o_ambiguity = run->add_option("--ambiguity", ambiguity, "Oracle ambiguity: instance|part|mixed");
    auto* o_threads = run->add_option("--threads", threads, "Worker threads");

    auto* eval = cli.add_subcommand("eval", "Compute mIoU over a results directory");
    std::string results, report_path;
    eval->add_option("--results", results, "Results directory")->required();
    eval->add_option("--report", report_path, "Report JSON output path");

    auto* synth = cli.add_subcommand("synth", "Write a seeded synthetic episode suite");
    std::uint64_t synth_seed = 0;
    int count = 10, shots = 1;
    float noise = 0.1f;
    std::string difficulty = "easy", synth_ambiguity = "mixed", synth_out;
    synth->add_option("--seed", synth_seed, "Suite seed");
    synth->add_option("--count", count, "Number of episodes")->check(CLI::NonNegativeNumber);
    synth->add_option("--difficulty", difficulty, "easy|ambiguous|multi-instance");
    synth->add_option("--out", synth_out, "Output directory")->required();
    synth->add_option("--shots", shots, "Reference shots per episode")->check(CLI::PositiveNumber);
    synth->add_option("--noise", noise, "Feature noise sigma")->check(CLI::NonNegativeNumber);
    synth->add_option("--ambiguity", synth_ambiguity, "Oracle ambiguity for the recorded dumps");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            nlohmann::json flags = nlohmann::json::object();
            auto set = [&](CLI::Option* opt, const char* key, const auto& value) {
                if (opt->count() > 0) flags[key] = value;
            };
            set(o_provider, "provider", provider);
            set(o_clustering, "clustering", clustering);
            set(o_positive, "positive", positive);
            set(o_growth, "growth", growth);
            set(o_pivot, "pivot", pivot);
            set(o_overshoot, "overshoot", overshoot);
            set(o_seed, "seed", seed);
            set(o_ambiguity, "ambiguity", ambiguity);
            set(o_threads, "threads", threads);

            std::optional<std::filesystem::path> overlay_dir;
            if (!overlays.empty()) overlay_dir = overlays;
            const auto summary = gfseg::app::run_manifest(manifest, flags, out, overlay_dir);
            std::cerr << summary.results.size() << " episodes, " << summary.provider_calls << " provider calls\n";
            if (summary.report) print_report(*summary.report);
        } else if (*eval) {
            const auto report = gfseg::app::evaluate_results_dir(results);
            if (!report_path.empty()) gfseg::write_report(report, report_path);
            print_report(report);
        } else if (*synth) {
            gfseg::app::SynthSuiteOptions opts;
            opts.seed = synth_seed;
            opts.count = count;
            opts.difficulty = gfseg::synth::parse_difficulty(difficulty);
            opts.ambiguity = gfseg::synth::parse_ambiguity(synth_ambiguity);
            opts.episode.shots = shots;
            opts.episode.noise_sigma = noise;
            gfseg::app::synth_suite(opts, synth_out);
            std::cerr << "wrote " << count << " episodes to " << synth_out << '\n';
        }
    } catch (const gfseg::ProviderError& e) {
        std::cerr << "provider error: " << e.what() << '\n';
        return kExitProvider;
    } catch (const gfseg::app::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const gfseg::EpisodeError& e) {
        std::cerr << "episode error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const gfseg::ContainerError& e) {
        std::cerr << "container error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "manifest error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
