#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bsf::wire {

// Frame layout: [4-byte unsigned LE payload length][1-byte tag][payload].
// Vectors serialize as an 8-byte LE element count followed by 8-byte LE
// IEEE-754 doubles. The connection handshake is a raw 4-byte LE worker index
// sent by the worker before any frame.
enum class Tag : std::uint8_t {
    Init = 0x01,     // payload: serialized input vector
    Order = 0x02,    // payload: iteration (u64 LE) + serialized order vector
    Partial = 0x03,  // payload: iteration (u64 LE) + worker (u32 LE) + vector
    Stop = 0x04,     // empty payload
};

struct Frame {
    Tag tag = Tag::Stop;
    std::vector<std::uint8_t> payload;
};

struct OrderMessage {
    std::uint64_t iteration = 0;
    std::vector<double> values;
};

struct PartialMessage {
    std::uint64_t iteration = 0;
    std::uint32_t worker = 0;
    std::vector<double> values;
};

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t value);
void append_u64(std::vector<std::uint8_t>& out, std::uint64_t value);
void append_f64(std::vector<std::uint8_t>& out, double value);
void append_vector(std::vector<std::uint8_t>& out, std::span<const double> values);

// Readers advance `offset`; they throw std::runtime_error on truncation.
std::uint32_t read_u32(std::span<const std::uint8_t> data, std::size_t& offset);
std::uint64_t read_u64(std::span<const std::uint8_t> data, std::size_t& offset);
double read_f64(std::span<const std::uint8_t> data, std::size_t& offset);
std::vector<double> read_vector(std::span<const std::uint8_t> data, std::size_t& offset);

std::vector<std::uint8_t> encode_frame(Tag tag, std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> init_payload(std::span<const double> input);
std::vector<std::uint8_t> order_payload(std::uint64_t iteration, std::span<const double> order);
std::vector<std::uint8_t> partial_payload(std::uint64_t iteration, std::uint32_t worker,
                                          std::span<const double> values);

std::vector<double> parse_init(std::span<const std::uint8_t> payload);
OrderMessage parse_order(std::span<const std::uint8_t> payload);
PartialMessage parse_partial(std::span<const std::uint8_t> payload);

}  // namespace bsf::wire
