#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tdmasim/protocol.hpp"

namespace tdma::wire {

// Packet wire format, little-endian throughout:
//   sender_status  u8   (0 = passive, 1 = active)
//   entry count    u16
//   per entry:     id u32, kind u8 (0 = msg, 1 = welcome), rx_time u64
//   payload length u16, payload bytes (length 0 encodes the null payload)
// Occurrence is not transmitted; decoded entries are marked remote.

std::vector<std::uint8_t> encode(const Packet& pkt);

// Returns nothing on malformed input (truncation, bad enum values,
// trailing bytes).
std::optional<Packet> decode(const std::vector<std::uint8_t>& bytes);

} // namespace tdma::wire
