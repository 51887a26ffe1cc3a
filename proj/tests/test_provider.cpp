#include <doctest.h>

#include "gfseg/container.hpp"
#include "gfseg/mask_provider.hpp"
#include "support.hpp"

#ifndef GFSEG_STUB_PROVIDER
#error "GFSEG_STUB_PROVIDER must name the stub provider executable"
#endif

using namespace gfseg;

namespace {

PointSet three_points() {
    PointSet p;
    p.points = {{0, 0}, {1, 1}, {2, 2}};
    p.image_points = {{2, 2}, {8, 8}, {13, 13}};
    p.scores = {1, 1, 1};
    return p;
}

std::string stub(const std::string& extra = {}) {
    return std::string(GFSEG_STUB_PROVIDER) + " --height 16 --width 16 " + extra;
}

ProviderError::Code provider_error(MaskProvider& provider, const PointSet& points, ImageSize res = {16, 16}) {
    try {
        provider.generate_masks({"ep", "", res}, points);
    } catch (const ProviderError& e) {
        return e.code();
    }
    FAIL("provider did not fail");
    return ProviderError::Code::config;
}

}  // namespace

TEST_SUITE("provider") {

TEST_CASE("spec parsing") {
    CHECK(parse_provider_spec("oracle").kind == ProviderSpec::Kind::oracle);
    CHECK(parse_provider_spec("oracle:part").locator == "part");
    CHECK(parse_provider_spec("dump").locator.empty());
    const auto e = parse_provider_spec("exec:/bin/tool --flag x");
    CHECK(e.kind == ProviderSpec::Kind::exec);
    CHECK(e.locator == "/bin/tool --flag x");
    CHECK_THROWS_AS(parse_provider_spec("exec:"), ProviderError);
    CHECK_THROWS_AS(parse_provider_spec("magic"), ProviderError);
}

TEST_CASE("dump replays the recorded masks in order") {
    test::ScratchDir dir;
    test::Rng rng(1);
    const auto pts = three_points();
    MaskSet masks{{}, {16, 16}};
    for (int i = 0; i < 3; ++i) masks.masks.push_back(test::random_mask(rng, {16, 16}, 0.3));
    write_dump(dir.path(), "ep", pts, masks);

    DumpProvider dump(dir.path());
    const auto got = dump.generate_masks({"ep", "", {16, 16}}, pts);
    REQUIRE(got.size() == 3);
    for (int i = 0; i < 3; ++i) CHECK(got[i] == masks[i]);
    CHECK(dump.call_count() == 1);
}

TEST_CASE("dump errors") {
    test::ScratchDir dir;
    auto pts = three_points();
    MaskSet masks{{BinaryMask(ImageSize{16, 16}), BinaryMask(ImageSize{16, 16}), BinaryMask(ImageSize{16, 16})}, {16, 16}};
    write_dump(dir.path(), "ep", pts, masks);
    DumpProvider dump(dir.path());

    auto moved = pts;
    moved.image_points[1].x += 1;
    CHECK(provider_error(dump, moved) == ProviderError::Code::point_mismatch);
    CHECK(provider_error(dump, pts, {8, 8}) == ProviderError::Code::bad_response);

    DumpProvider empty(dir / "missing");
    CHECK(provider_error(empty, pts) == ProviderError::Code::missing_dump);
}

TEST_CASE("exec provider round trip preserves order") {
    ExecProvider exec(stub());
    const auto pts = three_points();
    const auto got = exec.generate_masks({"ep", "", {16, 16}}, pts);
    REQUIRE(got.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto p = pts.image_points[i];
        CHECK(got[i](p.y, p.x) == 1);
        CHECK(got[i].count() == 25);
    }
}

TEST_CASE("exec provider failures map to distinct errors") {
    ExecProvider short_answer(stub("--drop-one"));
    CHECK(provider_error(short_answer, three_points()) == ProviderError::Code::count_mismatch);
    ExecProvider crash(stub("--exit-code 4"));
    CHECK(provider_error(crash, three_points()) == ProviderError::Code::process_failed);
    ExecProvider missing("/nonexistent/provider-binary");
    CHECK(provider_error(missing, three_points()) == ProviderError::Code::process_failed);
    ExecProvider garbage(stub("--garbage"));
    CHECK(provider_error(garbage, three_points()) == ProviderError::Code::bad_response);
    ExecProvider wrong_size(std::string(GFSEG_STUB_PROVIDER) + " --height 8 --width 8");
    CHECK(provider_error(wrong_size, three_points()) == ProviderError::Code::bad_response);
}

TEST_CASE("exec template substitutes the episode id") {
    ExecProvider exec(stub("--expect-episode {episode}"));
    CHECK(exec.argv_template().back() == "{episode}");
    CHECK(exec.generate_masks({"ep", "", {16, 16}}, three_points()).size() == 3);
    ExecProvider other(stub("--expect-episode other"));
    CHECK(provider_error(other, three_points()) == ProviderError::Code::process_failed);
}

TEST_CASE("masks tensor round trip") {
    test::Rng rng(2);
    MaskSet m{{test::random_mask(rng, {5, 7}, 0.5), test::random_mask(rng, {5, 7}, 0.5)}, {5, 7}};
    const auto back = masks_from_tensor(masks_tensor(m));
    CHECK(back.resolution == m.resolution);
    CHECK(back.masks == m.masks);
    CHECK_THROWS_AS(masks_from_tensor(Tensor("masks", {1, 2}, std::vector<std::uint8_t>{0, 1})), ProviderError);
}

}
