#include <doctest.h>

#include <fstream>

#include "gfseg/container.hpp"
#include "support.hpp"

using namespace gfseg;

TEST_SUITE("container") {

TEST_CASE("empty container is the ten-byte header") {
    const auto bytes = encode_container({});
    CHECK(bytes.size() == 10);
    CHECK(bytes == std::vector<std::uint8_t>{'G', 'F', 'S', 'B', 1, 0, 0, 0, 0, 0});
}

TEST_CASE("single f32 tensor byte layout") {
    const auto bytes = encode_container({Tensor("t", {2}, std::vector<float>{1.0f, 2.0f})});
    REQUIRE(bytes.size() == 27);
    // name_len=1, 't', dtype 0, ndim 1, dim 2, then 1.0f and 2.0f little-endian
    const std::vector<std::uint8_t> tail{1, 0, 't', 0, 1, 2, 0, 0, 0, 0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0x40};
    CHECK(std::vector<std::uint8_t>(bytes.begin() + 10, bytes.end()) == tail);
}

TEST_CASE("write then read returns identical entries") {
    test::ScratchDir dir;
    std::vector<Tensor> entries{
        Tensor("features", {2, 2, 3}, std::vector<float>(12, 0.25f)),
        Tensor("mask", {2, 2}, std::vector<std::uint8_t>{1, 0, 0, 1}),
        Tensor("stats", {3}, std::vector<std::int32_t>{-1, 0, 7}),
    };
    write_container(entries, dir / "a.gfsb");
    CHECK(read_container(dir / "a.gfsb") == entries);
}

TEST_CASE("random round trips are bit exact") {
    test::Rng rng(101);
    for (int i = 0; i < 100; ++i) {
        const auto entries = test::random_entries(rng);
        const auto bytes = encode_container(entries);
        const auto back = decode_container(bytes);
        REQUIRE(back == entries);
        CHECK(encode_container(back) == bytes);
    }
}

TEST_CASE("corrupt inputs raise their specific error") {
    for (const auto& c : test::corrupt_cases()) {
        CAPTURE(c.label);
        try {
            decode_container(c.bytes);
            FAIL("decoded a corrupt container");
        } catch (const ContainerError& e) {
            CHECK(e.code() == c.expected);
        }
    }
}

TEST_CASE("missing file is an io error") {
    test::ScratchDir dir;
    try {
        read_container(dir / "nope.gfsb");
        FAIL("read a missing file");
    } catch (const ContainerError& e) {
        CHECK(e.code() == ContainerError::Code::io);
        CHECK(std::string(e.what()).find("nope.gfsb") != std::string::npos);
    }
}

TEST_CASE("encoder rejects duplicate and empty names") {
    CHECK_THROWS_AS(encode_container({Tensor("a", {1}, std::vector<std::uint8_t>{1}),
                                      Tensor("a", {1}, std::vector<std::uint8_t>{1})}),
                    ContainerError);
    CHECK_THROWS_AS(encode_container({Tensor("", {1}, std::vector<std::uint8_t>{1})}), ContainerError);
}

TEST_CASE("tensor construction validates shape") {
    CHECK_THROWS_AS(Tensor("x", {2, 2}, std::vector<float>(3)), std::invalid_argument);
    CHECK_THROWS_AS(Tensor("x", {}, std::vector<float>{}), std::invalid_argument);
    CHECK_THROWS_AS(Tensor("x", {1, 1, 1, 1, 1}, std::vector<float>(1)), std::invalid_argument);
    CHECK_NOTHROW(Tensor("x", {0, 4}, std::vector<float>{}));
}

TEST_CASE("find_tensor reports the missing name") {
    std::vector<Tensor> entries{Tensor("a", {1}, std::vector<std::uint8_t>{1})};
    CHECK(find_tensor(entries, "a").name() == "a");
    CHECK(try_find_tensor(entries, "b") == nullptr);
    CHECK_THROWS_AS(find_tensor(entries, "b"), std::out_of_range);
}

}
