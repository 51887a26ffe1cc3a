#include "gfseg/synthetic.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gfseg/container.hpp"
#include "gfseg/resample.hpp"

namespace gfseg::synth {
namespace {

using Rng = std::mt19937_64;

// Euclidean gap between circumscribed circles; 12 > 8 * sqrt(2) keeps at least 8 background
// pixels between instances along both axes.
constexpr double kEasyGap = 12.0;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct Shape {
    enum class Kind { ellipse, rectangle } kind = Kind::ellipse;
    double cx = 0, cy = 0;
    double radius = 0;  // circumscribed
    double a = 0, b = 0, theta = 0;

    bool contains(double px, double py) const {
        const double dx = px - cx, dy = py - cy;
        const double c = std::cos(theta), s = std::sin(theta);
        const double u = dx * c + dy * s;
        const double v = -dx * s + dy * c;
        if (kind == Kind::ellipse) return (u * u) / (a * a) + (v * v) / (b * b) <= 1.0;
        return std::fabs(u) <= a && std::fabs(v) <= b;
    }
};

struct Circle {
    double cx, cy, r;
};

class Canvas {
public:
    Canvas(ImageSize size, Rng& rng) : size_(size), rng_(rng) {}

    /// Random position for a circle of radius r, at least `gap` px from every placed circle.
    bool place(double r, double gap, Circle& out, int attempts = 400) {
        for (int i = 0; i < attempts; ++i) {
            const double lo_x = r + 2, hi_x = size_.width - r - 2;
            const double lo_y = r + 2, hi_y = size_.height - r - 2;
            if (hi_x <= lo_x || hi_y <= lo_y) return false;
            Circle c{uniform(rng_, lo_x, hi_x), uniform(rng_, lo_y, hi_y), r};
            if (fits(c, gap)) {
                circles_.push_back(c);
                out = c;
                return true;
            }
        }
        return false;
    }

    /// Position touching `anchor` with an edge gap in [gap_lo, gap_hi], `min_gap` from the rest.
    bool place_near(const Circle& anchor, double r, double gap_lo, double gap_hi, double min_gap, Circle& out,
                    int attempts = 400) {
        for (int i = 0; i < attempts; ++i) {
            const double angle = uniform(rng_, 0.0, 2.0 * std::numbers::pi);
            const double d = anchor.r + r + uniform(rng_, gap_lo, gap_hi);
            Circle c{anchor.cx + d * std::cos(angle), anchor.cy + d * std::sin(angle), r};
            if (c.cx < r + 2 || c.cy < r + 2 || c.cx > size_.width - r - 2 || c.cy > size_.height - r - 2) continue;
            if (fits(c, min_gap)) {
                circles_.push_back(c);
                out = c;
                return true;
            }
        }
        return false;
    }

private:
    bool fits(const Circle& c, double gap) const {
        for (const auto& o : circles_)
            if (std::hypot(c.cx - o.cx, c.cy - o.cy) < c.r + o.r + gap) return false;
        return true;
    }

    ImageSize size_;
    Rng& rng_;
    std::vector<Circle> circles_;
};

Shape random_shape(const Circle& c, Rng& rng) {
    Shape s;
    s.cx = c.cx;
    s.cy = c.cy;
    s.radius = c.r;
    s.theta = uniform(rng, 0.0, std::numbers::pi);
    if (uniform(rng, 0.0, 1.0) < 0.65) {
        s.kind = Shape::Kind::ellipse;
        s.a = c.r;
        s.b = c.r * uniform(rng, 0.6, 1.0);
    } else {
        s.kind = Shape::Kind::rectangle;
        const double phi = uniform(rng, 0.5, 1.07);
        s.a = c.r * std::cos(phi);
        s.b = c.r * std::sin(phi);
    }
    return s;
}

BinaryMask rasterize(const Shape& s, ImageSize size) {
    BinaryMask m(size);
    const int y0 = std::max(0, static_cast<int>(std::floor(s.cy - s.radius)) - 1);
    const int y1 = std::min(size.height - 1, static_cast<int>(std::ceil(s.cy + s.radius)) + 1);
    const int x0 = std::max(0, static_cast<int>(std::floor(s.cx - s.radius)) - 1);
    const int x1 = std::min(size.width - 1, static_cast<int>(std::ceil(s.cx + s.radius)) + 1);
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (s.contains(x + 0.5, y + 0.5)) m(y, x) = 1;
    return m;
}

/// Splits a region into k angular sectors around (cx, cy); empty sectors are dropped.
std::vector<BinaryMask> sector_parts(const BinaryMask& region, double cx, double cy, int k, Rng& rng) {
    const double start = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double width = 2.0 * std::numbers::pi / k;
    std::vector<BinaryMask> parts(static_cast<std::size_t>(k), BinaryMask(region.size()));
    for (int y = 0; y < region.height(); ++y) {
        for (int x = 0; x < region.width(); ++x) {
            if (!region(y, x)) continue;
            double a = std::atan2(y + 0.5 - cy, x + 0.5 - cx) - start;
            a = std::fmod(a, 2.0 * std::numbers::pi);
            if (a < 0) a += 2.0 * std::numbers::pi;
            const int idx = std::min(k - 1, static_cast<int>(a / width));
            parts[idx](y, x) = 1;
        }
    }
    std::erase_if(parts, [](const BinaryMask& m) { return m.empty(); });
    return parts;
}

SceneInstance single_part(int class_id, BinaryMask region) {
    SceneInstance inst;
    inst.class_id = class_id;
    inst.parts.push_back(region);
    inst.part_classes.push_back(class_id);
    inst.region = std::move(region);
    return inst;
}

SceneInstance sectored(int class_id, BinaryMask region, const Circle& c, int k, Rng& rng) {
    SceneInstance inst;
    inst.class_id = class_id;
    inst.parts = sector_parts(region, c.cx, c.cy, k, rng);
    inst.part_classes.assign(inst.parts.size(), class_id);
    inst.region = std::move(region);
    return inst;
}

/// Object of class `carrier` whose leading `fraction` (along a random direction) is class `part_class`.
SceneInstance composite(int carrier, int part_class, BinaryMask region, const Circle& c, double fraction, Rng& rng) {
    const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double ux = std::cos(angle), uy = std::sin(angle);
    std::vector<double> proj;
    for (int y = 0; y < region.height(); ++y)
        for (int x = 0; x < region.width(); ++x)
            if (region(y, x)) proj.push_back((x + 0.5 - c.cx) * ux + (y + 0.5 - c.cy) * uy);
    std::vector<double> sorted = proj;
    std::sort(sorted.begin(), sorted.end());
    const double cut = sorted[std::min(sorted.size() - 1, static_cast<std::size_t>(fraction * static_cast<double>(sorted.size())))];

    SceneInstance inst;
    inst.class_id = carrier;
    BinaryMask embedded(region.size()), rest(region.size());
    for (int y = 0; y < region.height(); ++y)
        for (int x = 0; x < region.width(); ++x)
            if (region(y, x)) ((x + 0.5 - c.cx) * ux + (y + 0.5 - c.cy) * uy < cut ? embedded : rest)(y, x) = 1;
    inst.parts = {std::move(embedded), std::move(rest)};
    inst.part_classes = {part_class, carrier};
    inst.region = std::move(region);
    return inst;
}

std::vector<int> other_classes(int exclude, Rng& rng) {
    std::vector<int> out;
    for (int c = 1; c <= kClassCount; ++c)
        if (c != exclude) out.push_back(c);
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

void generate_easy(Scene& scene, int target, bool parts, Rng& rng) {
    Canvas canvas(scene.image_size, rng);
    const double r_lo = parts ? 22.0 : 18.0;
    const double r_hi = parts ? 32.0 : 28.0;
    auto others = other_classes(target, rng);
    std::vector<int> classes{target};
    const int n_other = uniform_int(rng, 1, 2);
    classes.insert(classes.end(), others.begin(), others.begin() + n_other);

    for (int cls : classes) {
        const int count = uniform_int(rng, 1, 2);
        for (int i = 0; i < count; ++i) {
            Circle c{};
            if (!canvas.place(uniform(rng, r_lo, r_hi), kEasyGap, c)) continue;
            auto region = rasterize(random_shape(c, rng), scene.image_size);
            scene.instances.push_back(parts ? sectored(cls, std::move(region), c, uniform_int(rng, 2, 4), rng)
                                            : single_part(cls, std::move(region)));
        }
    }
}

void generate_multi_instance(Scene& scene, int target, Rng& rng) {
    Canvas canvas(scene.image_size, rng);
    auto others = other_classes(target, rng);
    const int carrier = others[0];

    std::vector<Circle> anchors;
    Circle c{};
    if (canvas.place(uniform(rng, 26.0, 32.0), 20.0, c)) {
        auto region = rasterize(random_shape(c, rng), scene.image_size);
        scene.instances.push_back(composite(carrier, target, std::move(region), c, uniform(rng, 0.55, 0.7), rng));
        anchors.push_back(c);
    }
    for (int i = 0; i < 2; ++i) {
        if (!canvas.place(uniform(rng, 16.0, 24.0), 20.0, c)) continue;
        auto region = rasterize(random_shape(c, rng), scene.image_size);
        scene.instances.push_back(sectored(target, std::move(region), c, uniform_int(rng, 1, 3), rng));
        anchors.push_back(c);
    }
    const int n_distractors = uniform_int(rng, 1, 2);
    for (int i = 0; i < n_distractors && !anchors.empty(); ++i) {
        const int cls = others[1 + static_cast<std::size_t>(i) % (others.size() - 1)];
        const auto& anchor = anchors[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(anchors.size()) - 1))];
        const double r = uniform(rng, 14.0, 22.0);
        if (!canvas.place_near(anchor, r, 2.0, 5.0, 2.0, c) && !canvas.place(r, 10.0, c)) continue;
        scene.instances.push_back(single_part(cls, rasterize(random_shape(c, rng), scene.image_size)));
    }
}

constexpr int label_slot(int label) { return label + kBackgroundZones; }

}  // namespace

Difficulty parse_difficulty(const std::string& s) {
    if (s == "easy") return Difficulty::easy;
    if (s == "ambiguous") return Difficulty::ambiguous;
    if (s == "multi-instance" || s == "multi_instance" || s == "multi") return Difficulty::multi_instance;
    throw std::invalid_argument("difficulty must be easy|ambiguous|multi-instance, got '" + s + "'");
}

Ambiguity parse_ambiguity(const std::string& s) {
    if (s == "instance") return Ambiguity::instance;
    if (s == "part") return Ambiguity::part;
    if (s == "mixed") return Ambiguity::mixed;
    throw std::invalid_argument("ambiguity must be instance|part|mixed, got '" + s + "'");
}

std::string to_string(Difficulty d) {
    switch (d) {
        case Difficulty::easy: return "easy";
        case Difficulty::ambiguous: return "ambiguous";
        case Difficulty::multi_instance: return "multi-instance";
    }
    return "?";
}

std::string to_string(Ambiguity a) {
    switch (a) {
        case Ambiguity::instance: return "instance";
        case Ambiguity::part: return "part";
        case Ambiguity::mixed: return "mixed";
    }
    return "?";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

World make_world(std::uint64_t seed) {
    Rng rng(seed);
    std::array<int, kChannels> rows{};
    for (int i = 0; i < kChannels; ++i) rows[i] = i;
    std::shuffle(rows.begin(), rows.end(), rng);

    auto hadamard_row = [&](int r) {
        const float sign = (rng() & 1) ? -1.0f : 1.0f;
        std::vector<float> v(kChannels);
        for (int j = 0; j < kChannels; ++j)
            v[j] = sign * ((std::popcount(static_cast<unsigned>(r & j)) & 1) ? -0.25f : 0.25f);
        return v;
    };

    World w;
    int next = 0;
    for (int c = 1; c <= kClassCount; ++c) w.prototypes[c] = hadamard_row(rows[next++]);
    for (int z = 0; z < kBackgroundZones; ++z) w.background_prototypes.push_back(hadamard_row(rows[next++]));
    return w;
}

BinaryMask Scene::class_mask(int class_id) const {
    BinaryMask m(image_size);
    for (const auto& inst : instances)
        for (std::size_t p = 0; p < inst.parts.size(); ++p)
            if (inst.part_classes[p] == class_id) m |= inst.parts[p];
    return m;
}

int Scene::background_zone(int y, int x) const {
    int best = 0;
    long best_d = -1;
    for (std::size_t z = 0; z < background_sites.size(); ++z) {
        const long dx = x - background_sites[z].x, dy = y - background_sites[z].y;
        const long d = dx * dx + dy * dy;
        if (best_d < 0 || d < best_d) {
            best_d = d;
            best = static_cast<int>(z);
        }
    }
    return best;
}

std::vector<int> Scene::semantic_labels() const {
    std::vector<int> labels(image_size.pixels());
    for (int y = 0; y < image_size.height; ++y)
        for (int x = 0; x < image_size.width; ++x)
            labels[static_cast<std::size_t>(y) * image_size.width + x] = -(background_zone(y, x) + 1);
    for (const auto& inst : instances) {
        for (std::size_t p = 0; p < inst.parts.size(); ++p) {
            auto d = inst.parts[p].data();
            for (std::size_t i = 0; i < d.size(); ++i)
                if (d[i]) labels[i] = inst.part_classes[p];
        }
    }
    return labels;
}

int Scene::instance_at(int y, int x) const {
    for (std::size_t i = 0; i < instances.size(); ++i)
        if (instances[i].region(y, x)) return static_cast<int>(i);
    return -1;
}

int Scene::part_at(int instance, int y, int x) const {
    const auto& inst = instances.at(static_cast<std::size_t>(instance));
    for (std::size_t p = 0; p < inst.parts.size(); ++p)
        if (inst.parts[p](y, x)) return static_cast<int>(p);
    return -1;
}

Scene generate_scene(std::uint64_t seed, Difficulty difficulty, const SceneOptions& options) {
    if (options.target_class < 1 || options.target_class > kClassCount)
        throw std::invalid_argument("target class out of range");
    Rng rng(seed);
    Scene scene;
    scene.image_size = options.image_size;
    scene.noise_sigma = options.noise_sigma;
    scene.seed = seed;
    scene.prototypes = options.world.prototypes;
    scene.background_prototypes = options.world.background_prototypes;
    for (int z = 0; z < kBackgroundZones; ++z)
        scene.background_sites.push_back(
            {uniform_int(rng, 0, options.image_size.width - 1), uniform_int(rng, 0, options.image_size.height - 1)});

    switch (difficulty) {
        case Difficulty::easy: generate_easy(scene, options.target_class, false, rng); break;
        case Difficulty::ambiguous: generate_easy(scene, options.target_class, true, rng); break;
        case Difficulty::multi_instance: generate_multi_instance(scene, options.target_class, rng); break;
    }
    return scene;
}

Scene generate_scene(std::uint64_t seed, Difficulty difficulty) {
    SceneOptions opts;
    opts.world = make_world(derive_seed(seed, 1));
    opts.target_class = 1 + static_cast<int>(derive_seed(seed, 2) % kTargetClassCount);
    return generate_scene(seed, difficulty, opts);
}

FeatureMap render_features(const Scene& scene, GridSize grid) {
    const auto labels = scene.semantic_labels();
    const AxisFootprint ys(scene.image_size.height, grid.h);
    const AxisFootprint xs(scene.image_size.width, grid.w);
    constexpr int slots = kClassCount + kBackgroundZones + 1;

    std::vector<std::int64_t> hist(static_cast<std::size_t>(grid.cells()) * slots, 0);
    for (int y = 0; y < scene.image_size.height; ++y) {
        for (int x = 0; x < scene.image_size.width; ++x) {
            const int slot = label_slot(labels[static_cast<std::size_t>(y) * scene.image_size.width + x]);
            for (const auto& oy : ys.by_pixel[y])
                for (const auto& ox : xs.by_pixel[x])
                    hist[(static_cast<std::size_t>(oy.cell) * grid.w + ox.cell) * slots + slot] += oy.length * ox.length;
        }
    }

    Rng rng(derive_seed(scene.seed, 0xFEA7));
    std::normal_distribution<float> noise(0.0f, scene.noise_sigma > 0.0f ? scene.noise_sigma : 1.0f);
    std::vector<float> data(static_cast<std::size_t>(grid.cells()) * kChannels);
    for (int cell = 0; cell < grid.cells(); ++cell) {
        const std::int64_t* h = &hist[static_cast<std::size_t>(cell) * slots];
        int best = 0;
        for (int s = 1; s < slots; ++s)
            if (h[s] >= h[best]) best = s;  // ties favour the larger label (classes over background)
        const int label = best - kBackgroundZones;
        const auto& proto = label > 0 ? scene.prototypes.at(label)
                                      : scene.background_prototypes.at(static_cast<std::size_t>(-label - 1));
        float* v = &data[static_cast<std::size_t>(cell) * kChannels];
        double norm = 0.0;
        for (int k = 0; k < kChannels; ++k) {
            v[k] = proto[k] + (scene.noise_sigma > 0.0f ? noise(rng) : 0.0f);
            norm += static_cast<double>(v[k]) * v[k];
        }
        const double n = std::sqrt(norm);
        if (n > 0.0)
            for (int k = 0; k < kChannels; ++k) v[k] = static_cast<float>(v[k] / n);
    }
    return FeatureMap(grid, kChannels, std::move(data));
}

MaskSet oracle_masks(const Scene& scene, const PointSet& points, Ambiguity ambiguity, std::uint64_t seed) {
    MaskSet out;
    out.resolution = scene.image_size;
    const auto H = scene.image_size.height, W = scene.image_size.width;

    BinaryMask occupied(scene.image_size);
    for (const auto& inst : scene.instances) occupied |= inst.region;

    const std::uint64_t key = seed ^ scene.seed;
    for (const auto& p : points.image_points) {
        if (p.x < 0 || p.y < 0 || p.x >= W || p.y >= H)
            throw std::invalid_argument("oracle: point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                        ") outside the scene");
        const auto pixel = static_cast<std::uint64_t>(p.y) * static_cast<std::uint64_t>(W) + static_cast<std::uint64_t>(p.x);
        const int inst = scene.instance_at(p.y, p.x);
        if (inst >= 0) {
            const auto& instance = scene.instances[static_cast<std::size_t>(inst)];
            bool whole = ambiguity == Ambiguity::instance;
            if (ambiguity == Ambiguity::mixed) whole = (derive_seed(key, pixel) & 1) != 0;
            out.masks.push_back(whole ? instance.region
                                      : instance.parts[static_cast<std::size_t>(scene.part_at(inst, p.y, p.x))]);
            continue;
        }
        // background: a blob inside the point's zone that avoids every instance
        const int radius = 6 + static_cast<int>(derive_seed(key, pixel + (1ULL << 40)) % 15);
        const int zone = scene.background_zone(p.y, p.x);
        BinaryMask blob(scene.image_size);
        for (int y = std::max(0, p.y - radius); y <= std::min(H - 1, p.y + radius); ++y)
            for (int x = std::max(0, p.x - radius); x <= std::min(W - 1, p.x + radius); ++x) {
                const int dx = x - p.x, dy = y - p.y;
                if (dx * dx + dy * dy <= radius * radius && !occupied(y, x) && scene.background_zone(y, x) == zone)
                    blob(y, x) = 1;
            }
        out.masks.push_back(std::move(blob));
    }
    return out;
}

std::vector<Tensor> scene_tensors(const Scene& scene) {
    const auto H = static_cast<std::uint32_t>(scene.image_size.height);
    const auto W = static_cast<std::uint32_t>(scene.image_size.width);
    std::vector<std::int32_t> instance_labels(scene.image_size.pixels(), -1), part_labels(scene.image_size.pixels(), -1);
    std::vector<std::int32_t> instance_class, instance_parts, part_classes;
    for (std::size_t i = 0; i < scene.instances.size(); ++i) {
        const auto& inst = scene.instances[i];
        instance_class.push_back(inst.class_id);
        instance_parts.push_back(static_cast<std::int32_t>(inst.parts.size()));
        for (std::size_t p = 0; p < inst.parts.size(); ++p) {
            part_classes.push_back(inst.part_classes[p]);
            auto d = inst.parts[p].data();
            for (std::size_t k = 0; k < d.size(); ++k)
                if (d[k]) {
                    instance_labels[k] = static_cast<std::int32_t>(i);
                    part_labels[k] = static_cast<std::int32_t>(p);
                }
        }
    }
    std::vector<std::int32_t> sites;
    for (const auto& s : scene.background_sites) {
        sites.push_back(s.x);
        sites.push_back(s.y);
    }
    std::vector<std::int32_t> proto_ids;
    std::vector<float> protos, bg;
    for (const auto& [id, v] : scene.prototypes) {
        proto_ids.push_back(id);
        protos.insert(protos.end(), v.begin(), v.end());
    }
    for (const auto& v : scene.background_prototypes) bg.insert(bg.end(), v.begin(), v.end());
    const auto c = static_cast<std::uint32_t>(kChannels);
    const auto n_inst = static_cast<std::uint32_t>(instance_class.size());

    std::vector<Tensor> out;
    out.emplace_back("instance_labels", std::vector<std::uint32_t>{H, W}, std::move(instance_labels));
    out.emplace_back("part_labels", std::vector<std::uint32_t>{H, W}, std::move(part_labels));
    out.emplace_back("instance_class", std::vector<std::uint32_t>{n_inst}, std::move(instance_class));
    out.emplace_back("instance_parts", std::vector<std::uint32_t>{n_inst}, std::move(instance_parts));
    out.emplace_back("part_classes", std::vector<std::uint32_t>{static_cast<std::uint32_t>(part_classes.size())},
                     std::move(part_classes));
    out.emplace_back("background_sites", std::vector<std::uint32_t>{static_cast<std::uint32_t>(scene.background_sites.size()), 2},
                     std::move(sites));
    out.emplace_back("prototype_ids", std::vector<std::uint32_t>{static_cast<std::uint32_t>(proto_ids.size())}, std::move(proto_ids));
    out.emplace_back("prototypes", std::vector<std::uint32_t>{static_cast<std::uint32_t>(scene.prototypes.size()), c},
                     std::move(protos));
    out.emplace_back("background_prototypes",
                     std::vector<std::uint32_t>{static_cast<std::uint32_t>(scene.background_prototypes.size()), c},
                     std::move(bg));
    out.emplace_back("noise_sigma", std::vector<std::uint32_t>{1}, std::vector<float>{scene.noise_sigma});
    out.emplace_back("seed", std::vector<std::uint32_t>{2},
                     std::vector<std::int32_t>{static_cast<std::int32_t>(scene.seed & 0xFFFFFFFFu),
                                               static_cast<std::int32_t>(scene.seed >> 32)});
    return out;
}

Scene scene_from_tensors(const std::vector<Tensor>& entries) {
    Scene scene;
    const auto& il = find_tensor(entries, "instance_labels");
    const auto& pl = find_tensor(entries, "part_labels");
    scene.image_size = {static_cast<int>(il.dims()[0]), static_cast<int>(il.dims()[1])};
    const auto inst_labels = il.i32();
    const auto part_labels = pl.i32();
    const auto inst_class = find_tensor(entries, "instance_class").i32();
    const auto inst_parts = find_tensor(entries, "instance_parts").i32();
    const auto part_classes = find_tensor(entries, "part_classes").i32();

    std::size_t part_offset = 0;
    for (std::size_t i = 0; i < inst_class.size(); ++i) {
        SceneInstance inst;
        inst.class_id = inst_class[i];
        inst.region = BinaryMask(scene.image_size);
        for (int p = 0; p < inst_parts[i]; ++p) {
            inst.parts.emplace_back(scene.image_size);
            inst.part_classes.push_back(part_classes[part_offset + static_cast<std::size_t>(p)]);
        }
        part_offset += static_cast<std::size_t>(inst_parts[i]);
        scene.instances.push_back(std::move(inst));
    }
    for (std::size_t k = 0; k < inst_labels.size(); ++k) {
        if (inst_labels[k] < 0) continue;
        auto& inst = scene.instances.at(static_cast<std::size_t>(inst_labels[k]));
        inst.region.data()[k] = 1;
        inst.parts.at(static_cast<std::size_t>(part_labels[k])).data()[k] = 1;
    }

    const auto sites = find_tensor(entries, "background_sites").i32();
    for (std::size_t k = 0; k + 1 < sites.size(); k += 2) scene.background_sites.push_back({sites[k], sites[k + 1]});
    const auto ids = find_tensor(entries, "prototype_ids").i32();
    const auto protos = find_tensor(entries, "prototypes").f32();
    for (std::size_t i = 0; i < ids.size(); ++i)
        scene.prototypes[ids[i]] = std::vector<float>(protos.begin() + static_cast<std::ptrdiff_t>(i * kChannels),
                                                      protos.begin() + static_cast<std::ptrdiff_t>((i + 1) * kChannels));
    const auto bg = find_tensor(entries, "background_prototypes").f32();
    for (std::size_t i = 0; i * kChannels < bg.size(); ++i)
        scene.background_prototypes.emplace_back(bg.begin() + static_cast<std::ptrdiff_t>(i * kChannels),
                                                 bg.begin() + static_cast<std::ptrdiff_t>((i + 1) * kChannels));
    scene.noise_sigma = find_tensor(entries, "noise_sigma").f32()[0];
    const auto seed = find_tensor(entries, "seed").i32();
    scene.seed = static_cast<std::uint64_t>(static_cast<std::uint32_t>(seed[0])) |
                 (static_cast<std::uint64_t>(static_cast<std::uint32_t>(seed[1])) << 32);
    return scene;
}

MaskSet OracleProvider::produce(const MaskRequest& request, const PointSet& points) {
    const Scene scene = lookup_(request.episode_id);
    if (scene.image_size != request.resolution)
        throw ProviderError(ProviderError::Code::config,
                            request.episode_id + ": oracle scene resolution differs from the requested provider resolution");
    return oracle_masks(scene, points, ambiguity_, seed_);
}

SyntheticEpisode make_episode(std::uint64_t seed, Difficulty difficulty, const SyntheticOptions& options, std::string id) {
    if (options.shots < 1) throw std::invalid_argument("synthetic episode needs at least one shot");
    SceneOptions so;
    so.image_size = options.image_size;
    so.noise_sigma = options.noise_sigma;
    so.world = make_world(derive_seed(seed, 1));
    so.target_class = 1 + static_cast<int>(derive_seed(seed, 2) % kTargetClassCount);

    SyntheticEpisode out;
    out.target = generate_scene(derive_seed(seed, 3), difficulty, so);
    for (int k = 0; k < options.shots; ++k)
        out.references.push_back(generate_scene(derive_seed(seed, 100 + static_cast<std::uint64_t>(k)), difficulty, so));

    auto& ep = out.episode;
    ep.id = id.empty() ? to_string(difficulty) + "_" + std::to_string(seed) : std::move(id);
    ep.class_id = so.target_class;
    ep.image_size = options.image_size;
    ep.provider_size = options.image_size;
    ep.target_features = render_features(out.target, options.grid);
    for (const auto& ref : out.references)
        ep.references.push_back({render_features(ref, options.grid), ref.class_mask(so.target_class)});
    ep.target_gt = out.target.class_mask(so.target_class);
    ep.validate();
    return out;
}

}  // namespace gfseg::synth
