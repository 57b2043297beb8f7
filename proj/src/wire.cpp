#include "bsfscale/wire.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

namespace bsf::wire {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::runtime_error(what);
}

}  // namespace

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t value) {
    out.push_back(static_cast<std::uint8_t>(value));
    out.push_back(static_cast<std::uint8_t>(value >> 8));
    out.push_back(static_cast<std::uint8_t>(value >> 16));
    out.push_back(static_cast<std::uint8_t>(value >> 24));
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t value) {
    for (int shift = 0; shift < 64; shift += 8) {
        out.push_back(static_cast<std::uint8_t>(value >> shift));
    }
}

void append_f64(std::vector<std::uint8_t>& out, double value) {
    append_u64(out, std::bit_cast<std::uint64_t>(value));
}

void append_vector(std::vector<std::uint8_t>& out, std::span<const double> values) {
    append_u64(out, static_cast<std::uint64_t>(values.size()));
    for (double v : values) append_f64(out, v);
}

std::uint32_t read_u32(std::span<const std::uint8_t> data, std::size_t& offset) {
    require(offset + 4 <= data.size(), "wire: truncated u32");
    std::uint32_t value = 0;
    for (int b = 0; b < 4; ++b) {
        value |= static_cast<std::uint32_t>(data[offset + b]) << (8 * b);
    }
    offset += 4;
    return value;
}

std::uint64_t read_u64(std::span<const std::uint8_t> data, std::size_t& offset) {
    require(offset + 8 <= data.size(), "wire: truncated u64");
    std::uint64_t value = 0;
    for (int b = 0; b < 8; ++b) {
        value |= static_cast<std::uint64_t>(data[offset + b]) << (8 * b);
    }
    offset += 8;
    return value;
}

double read_f64(std::span<const std::uint8_t> data, std::size_t& offset) {
    return std::bit_cast<double>(read_u64(data, offset));
}

std::vector<double> read_vector(std::span<const std::uint8_t> data, std::size_t& offset) {
    const std::uint64_t count = read_u64(data, offset);
    require(count <= (data.size() - offset) / 8, "wire: truncated vector body");
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(count));
    for (std::uint64_t i = 0; i < count; ++i) {
        values.push_back(read_f64(data, offset));
    }
    return values;
}

std::vector<std::uint8_t> encode_frame(Tag tag, std::span<const std::uint8_t> payload) {
    require(payload.size() <= std::numeric_limits<std::uint32_t>::max(),
            "wire: payload exceeds the 32-bit frame limit");
    std::vector<std::uint8_t> frame;
    frame.reserve(5 + payload.size());
    append_u32(frame, static_cast<std::uint32_t>(payload.size()));
    frame.push_back(static_cast<std::uint8_t>(tag));
    frame.insert(frame.end(), payload.begin(), payload.end());
    return frame;
}

std::vector<std::uint8_t> init_payload(std::span<const double> input) {
    std::vector<std::uint8_t> payload;
    payload.reserve(8 + 8 * input.size());
    append_vector(payload, input);
    return payload;
}

std::vector<std::uint8_t> order_payload(std::uint64_t iteration, std::span<const double> order) {
    std::vector<std::uint8_t> payload;
    payload.reserve(16 + 8 * order.size());
    append_u64(payload, iteration);
    append_vector(payload, order);
    return payload;
}

std::vector<std::uint8_t> partial_payload(std::uint64_t iteration, std::uint32_t worker,
                                          std::span<const double> values) {
    std::vector<std::uint8_t> payload;
    payload.reserve(20 + 8 * values.size());
    append_u64(payload, iteration);
    append_u32(payload, worker);
    append_vector(payload, values);
    return payload;
}

std::vector<double> parse_init(std::span<const std::uint8_t> payload) {
    std::size_t offset = 0;
    std::vector<double> input = read_vector(payload, offset);
    require(offset == payload.size(), "wire: trailing bytes in INIT payload");
    return input;
}

OrderMessage parse_order(std::span<const std::uint8_t> payload) {
    std::size_t offset = 0;
    OrderMessage msg;
    msg.iteration = read_u64(payload, offset);
    msg.values = read_vector(payload, offset);
    require(offset == payload.size(), "wire: trailing bytes in ORDER payload");
    return msg;
}

PartialMessage parse_partial(std::span<const std::uint8_t> payload) {
    std::size_t offset = 0;
    PartialMessage msg;
    msg.iteration = read_u64(payload, offset);
    msg.worker = read_u32(payload, offset);
    msg.values = read_vector(payload, offset);
    require(offset == payload.size(), "wire: trailing bytes in PARTIAL payload");
    return msg;
}

}  // namespace bsf::wire
