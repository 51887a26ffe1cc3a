#include <doctest.h>

#include <numeric>

#include "gfseg/gating.hpp"
#include "gfseg/resample.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace gfseg;

namespace {

// 6x6 field, one pixel per cell: columns 0-3 positive, columns 4-5 negative.
std::vector<float> split_field() {
    std::vector<float> w(36);
    for (int i = 0; i < 36; ++i) w[i] = i % 6 < 4 ? 1.0f : -1.0f;
    return w;
}

std::vector<std::size_t> all_points(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

}  // namespace

TEST_SUITE("gating") {

TEST_CASE("polarity examples") {
    const std::vector<float> pos{1.0f, 0.0f}, neg{0.0f, 0.0f};
    const auto p = polarity_map(pos, neg, PivotMode::product);
    CHECK(p.s_mid == 0.5f);
    CHECK(p.values[0] == 1);

    // p^2 == s_mid * n exactly: s_mid = (1 + 0) / 2 and 0.5^2 = 0.5 * 0.5
    const std::vector<float> pos2{1.0f, 0.0f, 0.5f}, neg2{0.0f, 0.0f, 0.5f};
    CHECK(polarity_map(pos2, neg2, PivotMode::product).values[2] == -1);
}

TEST_CASE("polarity matches the literal rule for every pivot") {
    test::Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<float> pos(16), neg(16);
        for (auto& v : pos) v = test::uniform_float(rng, 0.0f, 1.0f);
        for (auto& v : neg) v = test::uniform_float(rng, 0.0f, 1.0f);
        const float s_mid = (*std::max_element(pos.begin(), pos.end()) + *std::min_element(pos.begin(), pos.end())) / 2.0f;
        for (int mode = 0; mode < 4; ++mode) {
            const auto p = polarity_map(pos, neg, static_cast<PivotMode>(mode));
            for (int i = 0; i < 16; ++i) CHECK(p.values[i] == oracle::polarity(pos[i], neg[i], s_mid, mode));
        }
    }
}

TEST_CASE("mask score examples") {
    const auto w = split_field();
    CHECK(mask_positive_score(test::rect_mask({6, 6}, 0, 0, 1, 5), w, {6, 6}) == 3.0f);
    CHECK(mask_positive_score(test::rect_mask({6, 6}, 0, 0, 5, 1), w, {6, 6}) == 5.0f);
    CHECK(mask_positive_score(test::rect_mask({6, 6}, 0, 1, 3, 3), w, {6, 6}) == 6.0f);
    CHECK(mask_positive_score(test::rect_mask({6, 6}, 0, 2, 3, 6), w, {6, 6}) == 0.0f);
    CHECK(mask_positive_score(BinaryMask(ImageSize{6, 6}), w, {6, 6}) == 0.0f);
}

TEST_CASE("random mask scores match the scalar loop") {
    test::Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const auto m = test::random_mask(rng, {24, 24}, 0.5);
        std::vector<float> w(64);
        for (auto& v : w) v = test::uniform_int(rng, 0, 1) ? 1.0f : -1.0f;
        CHECK(mask_positive_score(m, w, {8, 8}) == static_cast<float>(oracle::grid_score(oracle::pool_to_grid(m, {8, 8}), w)));
    }
}

TEST_CASE("sum strategy weights are signed margins") {
    const std::vector<float> pos{0.9f, 0.1f, 0.5f}, neg{0.1f, 0.8f, 0.2f};
    const auto p = polarity_map(pos, neg, PivotMode::product);
    const auto w = gate_weights(p, PositiveStrategy::sum);
    for (int i = 0; i < 3; ++i) {
        const float margin = std::fabs(pos[i] * pos[i] - p.s_mid * neg[i]);
        CHECK(w[i] == doctest::Approx(p.values[i] * margin));
    }
    CHECK(gate_weights(p, PositiveStrategy::num) == std::vector<float>{1, -1, 1});
}

TEST_CASE("single mask cluster") {
    const auto w = split_field();
    MaskSet masks{{test::rect_mask({6, 6}, 0, 0, 1, 3)}, {6, 6}};
    const std::size_t cluster[] = {0};
    const auto g = grow_cluster(masks, cluster, w, {6, 6}, GrowthMode::mask_growth);
    CHECK(g.accepted == std::vector<std::size_t>{0});
    CHECK(g.pseudo_mask == masks[0]);
}

TEST_CASE("identical masks: the second residual is empty and rejected") {
    const auto w = split_field();
    const auto m = test::rect_mask({6, 6}, 0, 0, 2, 2);
    MaskSet masks{{m, m}, {6, 6}};
    const std::size_t cluster[] = {0, 1};
    const auto g = grow_cluster(masks, cluster, w, {6, 6}, GrowthMode::mask_growth);
    CHECK(g.accepted == std::vector<std::size_t>{0});
}

TEST_CASE("three staggered masks follow the hand simulation") {
    // A: rows 0-1, cols 0-3 (score 8, ratio 1); B: rows 0-3, cols 2-5 (score 0, ratio 0);
    // C: rows 1-3, cols 0-4 (score 9, ratio 0.6). Order A, C, B. A accepted; C's residual scores
    // 8 - 3 = 5, accepted; B's residual lies in columns 4-5 only, scores -5, rejected.
    const auto w = split_field();
    MaskSet masks{{test::rect_mask({6, 6}, 0, 0, 2, 4), test::rect_mask({6, 6}, 0, 2, 4, 6), test::rect_mask({6, 6}, 1, 0, 4, 5)},
                  {6, 6}};
    const std::size_t cluster[] = {0, 1, 2};
    const auto g = grow_cluster(masks, cluster, w, {6, 6}, GrowthMode::mask_growth);
    CHECK(g.order == std::vector<std::size_t>{0, 2, 1});
    CHECK(g.accepted == std::vector<std::size_t>{0, 2});
    auto expected = masks[0];
    expected |= masks[2];
    CHECK(g.pseudo_mask == expected);

    const auto u = grow_cluster(masks, cluster, w, {6, 6}, GrowthMode::union_all);
    CHECK(u.accepted == std::vector<std::size_t>{0, 1, 2});
    const auto off = grow_cluster(masks, cluster, w, {6, 6}, GrowthMode::off);
    CHECK(off.accepted == std::vector<std::size_t>{0, 2});
}

TEST_CASE("empty grid masks are processed last") {
    const auto w = split_field();
    MaskSet masks{{BinaryMask(ImageSize{6, 6}), test::rect_mask({6, 6}, 0, 4, 1, 6)}, {6, 6}};
    const std::size_t cluster[] = {0, 1};
    const auto g = grow_cluster(masks, cluster, w, {6, 6}, GrowthMode::mask_growth);
    CHECK(g.order == std::vector<std::size_t>{1, 0});
    CHECK(g.accepted.empty());
}

TEST_CASE("growth matches the step simulator and keeps its invariants") {
    test::Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto f = test::random_gating_fixture(rng);
        const auto polarity = polarity_map(f.mean_pos, f.mean_neg, PivotMode::product);
        const auto weights = gate_weights(polarity, trial % 2 ? PositiveStrategy::sum : PositiveStrategy::num);
        const auto grid = f.target.grid();
        const auto cluster = all_points(f.points.size());
        const auto g = grow_cluster(f.masks, cluster, weights, grid, GrowthMode::mask_growth);
        const auto sim = oracle::simulate_growth(f.masks.masks, cluster, weights, grid);
        CHECK(g.order == sim.order);
        auto accepted = sim.accepted;
        std::sort(accepted.begin(), accepted.end());
        CHECK(g.accepted == accepted);
        CHECK(g.pseudo_mask == sim.pseudo);

        BinaryMask grown(f.masks.resolution), all(f.masks.resolution);
        for (const auto& r : g.residuals) {
            CHECK_FALSE(r.intersects(grown));
            grown |= r;
        }
        for (const auto& m : f.masks.masks) all |= m;
        CHECK(grown == g.pseudo_mask);
        CHECK(g.pseudo_mask.subset_of(all));
    }
}

TEST_CASE("constant features give unit self-consistency for a point's own cluster") {
    FeatureMap t(GridSize{4, 4}, 2, std::vector<float>(32, 1.0f));
    PointSet p;
    p.points = {{1, 1}};
    p.image_points = {{1, 1}};
    MaskSet m{{test::rect_mask({4, 4}, 0, 0, 3, 3)}, {4, 4}};
    const auto c = Clustering::from_labels({0});
    const auto s = self_consistency_scores(t, p, c, m);
    CHECK(s(0, 0) == doctest::Approx(1.0));
    CHECK(filter_overshooting(s, c) == std::vector<std::size_t>{0});
}

TEST_CASE("self-consistency matches the definition on random fixtures") {
    test::Rng rng(13);
    for (int trial = 0; trial < 60; ++trial) {
        const auto f = test::random_gating_fixture(rng);
        std::vector<std::size_t> labels(f.points.size());
        for (auto& l : labels) l = static_cast<std::size_t>(test::uniform_int(rng, 0, 3));
        const auto c = Clustering::from_labels(labels);
        const auto s = self_consistency_scores(f.target, f.points, c, f.masks);
        const auto o = oracle::self_consistency(f.target, f.points.points, c.clusters, f.masks.masks);
        for (std::size_t l = 0; l < f.points.size(); ++l)
            for (std::size_t k = 0; k < c.count(); ++k) CHECK(s(l, k) == doctest::Approx(o[l][k]).epsilon(1e-5));
    }
}

TEST_CASE("well separated prototype clusters prefer their own cluster") {
    // left half prototype e0, right half e1; one point and one mask per half
    std::vector<float> d;
    for (int r = 0; r < 4; ++r)
        for (int col = 0; col < 8; ++col) {
            d.push_back(col < 4 ? 1.0f : 0.0f);
            d.push_back(col < 4 ? 0.0f : 1.0f);
        }
    FeatureMap t(GridSize{4, 8}, 2, d);
    PointSet p;
    p.points = {{1, 1}, {2, 6}};
    p.image_points = {{1, 1}, {6, 2}};
    MaskSet m{{test::rect_mask({4, 8}, 0, 0, 4, 4), test::rect_mask({4, 8}, 0, 4, 4, 8)}, {4, 8}};
    const auto c = Clustering::from_labels({0, 1});
    const auto s = self_consistency_scores(t, p, c, m);
    CHECK(s(0, 0) > s(0, 1));
    CHECK(s(1, 1) > s(1, 0));
}

TEST_CASE("overshooting filter examples") {
    const auto one = Clustering::from_labels({0, 0, 0});
    ScoreMatrix s1{3, 1, {0.1f, 0.0f, 0.7f}};
    CHECK(filter_overshooting(s1, one) == std::vector<std::size_t>{0, 1, 2});

    const auto two = Clustering::from_labels({0, 1});
    ScoreMatrix s2{2, 2, {0.2f, 0.9f, 0.5f, 0.5f}};
    CHECK(filter_overshooting(s2, two) == std::vector<std::size_t>{1});
}

TEST_CASE("overshooting filter matches an argmax oracle") {
    test::Rng rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = test::uniform_int(rng, 1, 10), k = test::uniform_int(rng, 1, 4);
        std::vector<std::size_t> labels(n);
        for (auto& l : labels) l = static_cast<std::size_t>(test::uniform_int(rng, 0, k - 1));
        const auto c = Clustering::from_labels(labels);
        ScoreMatrix s{static_cast<std::size_t>(n), c.count(), {}};
        for (std::size_t i = 0; i < s.rows * s.cols; ++i) s.values.push_back(static_cast<float>(test::uniform_int(rng, 0, 4)));
        std::vector<std::size_t> expected;
        for (int l = 0; l < n; ++l) {
            float best = s(l, 0);
            for (std::size_t p = 1; p < s.cols; ++p) best = std::max(best, s(l, p));
            if (s(l, c.component_of[l]) == best) expected.push_back(l);
        }
        CHECK(filter_overshooting(s, c) == expected);
    }
}

TEST_CASE("merge examples") {
    MaskSet m{{test::rect_mask({4, 4}, 0, 0, 1, 1), test::rect_mask({4, 4}, 1, 1, 2, 2), test::rect_mask({4, 4}, 3, 3, 4, 4)},
              {4, 4}};
    const std::size_t all[] = {0, 1, 2};
    const std::size_t none[] = {1};
    CHECK(merge_prediction(m, none, std::span<const std::size_t>{}).empty());
    auto u = m[0];
    u |= m[1];
    u |= m[2];
    CHECK(merge_prediction(m, all, all) == u);
    const std::size_t even[] = {0, 2};
    const auto got = merge_prediction(m, all, even);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 4; ++x) CHECK(got(y, x) == (m[0](y, x) | m[2](y, x)));
}

TEST_CASE("without gating every positive mask survives") {
    test::Rng rng(19);
    for (int trial = 0; trial < 20; ++trial) {
        auto f = test::random_gating_fixture(rng);
        SimilarityMaps maps;
        maps.mean_pos.assign(f.mean_pos.size(), 1.0f);
        maps.mean_neg.assign(f.mean_neg.size(), 0.0f);
        maps.mean_pos[0] = 0.5f;  // keeps s_mid below every p^2
        const auto c = Clustering::from_labels(std::vector<std::size_t>(f.points.size(), 0));
        GateConfig cfg;
        cfg.growth = GrowthMode::off;
        cfg.overshoot = false;
        const auto out = gate(f.target, maps, f.points, f.masks, c, cfg);
        BinaryMask expected(f.masks.resolution);
        for (const auto& m : f.masks.masks)
            if (!mask_to_grid(m, f.target.grid()).empty()) expected |= m;
        CHECK(out.final_mask == expected);
    }
}

TEST_CASE("gate is deterministic and its mask stays inside the provider masks") {
    test::Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = test::random_gating_fixture(rng);
        SimilarityMaps maps;
        maps.mean_pos = f.mean_pos;
        maps.mean_neg = f.mean_neg;
        std::vector<std::size_t> labels(f.points.size());
        for (auto& l : labels) l = static_cast<std::size_t>(test::uniform_int(rng, 0, 2));
        const auto c = Clustering::from_labels(labels);
        const auto a = gate(f.target, maps, f.points, f.masks, c, {});
        const auto b = gate(f.target, maps, f.points, f.masks, c, {});
        CHECK(a.final_mask == b.final_mask);
        CHECK(a.positive_points == b.positive_points);
        BinaryMask all(f.masks.resolution);
        for (const auto& m : f.masks.masks) all |= m;
        CHECK(a.final_mask.subset_of(all));
    }
}

TEST_CASE("flag spellings round trip") {
    for (auto s : {"weak", "strong"}) CHECK(to_string(parse_clustering_mode(s)) == s);
    for (auto s : {"num", "sum"}) CHECK(to_string(parse_positive_strategy(s)) == s);
    for (auto s : {"grow", "union", "off"}) CHECK(to_string(parse_growth_mode(s)) == s);
    for (auto s : {"prod", "plus", "mid", "neg"}) CHECK(to_string(parse_pivot_mode(s)) == s);
    CHECK_THROWS_AS(parse_growth_mode("bogus"), std::invalid_argument);
}

}
