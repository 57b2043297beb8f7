#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "bsfscale/wire.hpp"
#include "doctest.h"

using namespace bsf::wire;

namespace {

std::vector<std::uint8_t> bytes(std::initializer_list<int> values) {
    std::vector<std::uint8_t> out;
    for (int v : values) out.push_back(static_cast<std::uint8_t>(v));
    return out;
}

}  // namespace

TEST_SUITE("wire") {

TEST_CASE("integers serialize little-endian") {
    std::vector<std::uint8_t> out;
    append_u32(out, 0x01020304u);
    CHECK(out == bytes({0x04, 0x03, 0x02, 0x01}));

    out.clear();
    append_u64(out, 0x1122334455667788ull);
    CHECK(out == bytes({0x88, 0x77, 0x66, 0x55, 0x44, 0x33, 0x22, 0x11}));
}

TEST_CASE("doubles serialize as little-endian IEEE-754 bits") {
    std::vector<std::uint8_t> out;
    append_f64(out, 1.0);
    CHECK(out == bytes({0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xF0, 0x3F}));

    out.clear();
    append_f64(out, -2.0);
    CHECK(out == bytes({0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xC0}));
}

TEST_CASE("vectors carry a count then raw doubles") {
    std::vector<std::uint8_t> out;
    append_vector(out, std::vector<double>{1.0, -2.0});
    CHECK(out == bytes({0x02, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xF0, 0x3F,
                        0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xC0}));
}

TEST_CASE("frames are length-prefixed with a one-byte tag") {
    const std::vector<std::uint8_t> payload = bytes({0xAA, 0xBB});
    const std::vector<std::uint8_t> frame = encode_frame(Tag::Order, payload);
    CHECK(frame == bytes({0x02, 0x00, 0x00, 0x00, 0x02, 0xAA, 0xBB}));

    const std::vector<std::uint8_t> stop = encode_frame(Tag::Stop, {});
    CHECK(stop == bytes({0x00, 0x00, 0x00, 0x00, 0x04}));
}

TEST_CASE("tag values match the protocol") {
    CHECK(static_cast<std::uint8_t>(Tag::Init) == 0x01);
    CHECK(static_cast<std::uint8_t>(Tag::Order) == 0x02);
    CHECK(static_cast<std::uint8_t>(Tag::Partial) == 0x03);
    CHECK(static_cast<std::uint8_t>(Tag::Stop) == 0x04);
}

TEST_CASE("order payload layout") {
    const std::vector<double> values{1.0};
    const std::vector<std::uint8_t> payload = order_payload(3, values);
    CHECK(payload == bytes({0x03, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                            0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                            0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xF0, 0x3F}));

    const OrderMessage msg = parse_order(payload);
    CHECK(msg.iteration == 3);
    CHECK(msg.values == values);
}

TEST_CASE("partial payload layout") {
    const std::vector<double> values{-2.0};
    const std::vector<std::uint8_t> payload = partial_payload(7, 2, values);
    CHECK(payload == bytes({0x07, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                            0x02, 0x00, 0x00, 0x00,
                            0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00,
                            0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xC0}));

    const PartialMessage msg = parse_partial(payload);
    CHECK(msg.iteration == 7);
    CHECK(msg.worker == 2);
    CHECK(msg.values == values);
}

TEST_CASE("init payload round-trips arbitrary vectors") {
    const std::vector<double> input{0.0, -0.0, 1.5, 1e-300, 1e300, 0.1};
    const std::vector<double> parsed = parse_init(init_payload(input));
    REQUIRE(parsed.size() == input.size());
    CHECK(std::memcmp(parsed.data(), input.data(), input.size() * sizeof(double)) == 0);
}

TEST_CASE("readers advance their offset") {
    std::vector<std::uint8_t> buf;
    append_u32(buf, 5);
    append_u64(buf, 6);
    append_f64(buf, 7.0);
    std::size_t offset = 0;
    CHECK(read_u32(buf, offset) == 5);
    CHECK(offset == 4);
    CHECK(read_u64(buf, offset) == 6);
    CHECK(offset == 12);
    CHECK(read_f64(buf, offset) == 7.0);
    CHECK(offset == 20);
}

TEST_CASE("truncated buffers are rejected") {
    std::vector<std::uint8_t> buf = bytes({0x01, 0x02});
    std::size_t offset = 0;
    CHECK_THROWS_AS(read_u32(buf, offset), std::runtime_error);
    CHECK_THROWS_AS(read_u64(buf, offset), std::runtime_error);
    CHECK_THROWS_AS(read_f64(buf, offset), std::runtime_error);

    // A vector header promising more doubles than the buffer holds.
    std::vector<std::uint8_t> vec;
    append_u64(vec, 1000);
    append_f64(vec, 1.0);
    offset = 0;
    CHECK_THROWS_AS(read_vector(vec, offset), std::runtime_error);
}

TEST_CASE("payload parsers reject trailing bytes") {
    std::vector<std::uint8_t> payload = init_payload(std::vector<double>{1.0});
    payload.push_back(0x00);
    CHECK_THROWS_AS(parse_init(payload), std::runtime_error);

    std::vector<std::uint8_t> order = order_payload(1, std::vector<double>{1.0});
    order.push_back(0x00);
    CHECK_THROWS_AS(parse_order(order), std::runtime_error);

    std::vector<std::uint8_t> partial = partial_payload(1, 0, std::vector<double>{1.0});
    partial.push_back(0x00);
    CHECK_THROWS_AS(parse_partial(partial), std::runtime_error);
}

TEST_CASE("empty vectors round-trip") {
    const std::vector<double> empty;
    CHECK(parse_init(init_payload(empty)).empty());
    const OrderMessage order = parse_order(order_payload(0, empty));
    CHECK(order.iteration == 0);
    CHECK(order.values.empty());
}

}  // TEST_SUITE
