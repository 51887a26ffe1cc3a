#pragma once
// Accumulated per-class IoU and mIoU.

#include <filesystem>
#include <map>
#include <span>
#include <string>

#include <json.hpp>

#include "gfseg/pipeline.hpp"

namespace gfseg {

struct Report {
    std::map<int, double> per_class_iou;
    double miou = 0.0;
    std::map<int, double> per_fold;  // empty unless episodes carry folds
    std::size_t episode_count = 0;
};

/// Per class: sum of intersections over sum of unions. A class whose union is zero everywhere
/// (empty prediction and empty gt) scores 1. Throws std::invalid_argument if a score lacks gt.
Report evaluate(std::span<const EpisodeScore> scores);
Report evaluate(std::span<const EpisodeResult> results);
/// Class assignment taken from `class_map` (episode id -> class) instead of the results.
Report evaluate(std::span<const EpisodeResult> results, const std::map<std::string, int>& class_map);

/// {"miou": f, "per_class": {"<id>": f, ...}, "episodes": n[, "per_fold": {...}]}
nlohmann::ordered_json report_json(const Report& report);
void write_report(const Report& report, const std::filesystem::path& path);

}  // namespace gfseg
