#include "gfseg/evaluation.hpp"

#include <fstream>
#include <set>
#include <stdexcept>
#include <vector>

namespace gfseg {
namespace {

struct Accumulator {
    std::uint64_t intersection = 0;
    std::uint64_t union_ = 0;
    double iou() const {
        return union_ == 0 ? 1.0 : static_cast<double>(intersection) / static_cast<double>(union_);
    }
};

double mean_of(const std::map<int, double>& m) {
    if (m.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [k, v] : m) s += v;
    return s / static_cast<double>(m.size());
}

}  // namespace

Report evaluate(std::span<const EpisodeScore> scores) {
    std::map<int, Accumulator> classes;
    std::map<int, std::set<int>> fold_classes;
    for (const auto& s : scores) {
        if (!s.has_gt) throw std::invalid_argument("evaluate: episode '" + s.episode_id + "' has no ground truth");
        if (s.intersection > s.union_) throw std::invalid_argument("evaluate: intersection exceeds union in '" + s.episode_id + "'");
        auto& acc = classes[s.class_id];
        acc.intersection += s.intersection;
        acc.union_ += s.union_;
        if (s.fold >= 0) fold_classes[s.fold].insert(s.class_id);
    }

    Report r;
    r.episode_count = scores.size();
    for (const auto& [cls, acc] : classes) r.per_class_iou[cls] = acc.iou();
    r.miou = mean_of(r.per_class_iou);
    for (const auto& [fold, cls_set] : fold_classes) {
        std::map<int, double> sub;
        for (int c : cls_set) sub[c] = r.per_class_iou[c];
        r.per_fold[fold] = mean_of(sub);
    }
    return r;
}

Report evaluate(std::span<const EpisodeResult> results) {
    std::vector<EpisodeScore> scores;
    scores.reserve(results.size());
    for (const auto& r : results) scores.push_back(r.score());
    return evaluate(scores);
}

Report evaluate(std::span<const EpisodeResult> results, const std::map<std::string, int>& class_map) {
    std::vector<EpisodeScore> scores;
    scores.reserve(results.size());
    for (const auto& r : results) {
        auto s = r.score();
        auto it = class_map.find(r.episode_id);
        if (it == class_map.end()) throw std::invalid_argument("evaluate: no class for episode '" + r.episode_id + "'");
        s.class_id = it->second;
        scores.push_back(s);
    }
    return evaluate(scores);
}

nlohmann::ordered_json report_json(const Report& report) {
    nlohmann::ordered_json j;
    j["miou"] = report.miou;
    j["per_class"] = nlohmann::ordered_json::object();
    for (const auto& [cls, iou] : report.per_class_iou) j["per_class"][std::to_string(cls)] = iou;
    j["episodes"] = report.episode_count;
    if (!report.per_fold.empty()) {
        j["per_fold"] = nlohmann::ordered_json::object();
        for (const auto& [fold, v] : report.per_fold) j["per_fold"][std::to_string(fold)] = v;
    }
    return j;
}

void write_report(const Report& report, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write report '" + path.string() + "'");
    f << report_json(report).dump(2) << '\n';
}

}  // namespace gfseg
