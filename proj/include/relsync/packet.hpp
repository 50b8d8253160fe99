#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "relsync/crc32.hpp"
#include "relsync/types.hpp"

namespace relsync {

// One row of the broadcast clock table: the sender's tracked pseudo-clock
// offset and skew for a neighbor, already extrapolated to the transmit instant.
struct ClockTableEntry {
  AgentId neighbor_id = 0;
  double pseudo_offset = 0.0;  // seconds
  double skew = 0.0;           // dimensionless
  bool valid = false;
};

struct Packet {
  AgentId sender_id = 0;
  double tx_timestamp = 0.0;  // sender local clock at transmit
  Vec2 position = Vec2::Zero();
  std::vector<ClockTableEntry> clock_table;
};

// Wire layout, little-endian:
//   [0]      u8    sender_id (1..255)
//   [1..8]   f64   tx_timestamp
//   [9..16]  f64   position.x
//   [17..24] f64   position.y
//   [25]     u8    table entry count n (<= 254)
//   then n entries of 18 bytes: u8 neighbor_id, f64 pseudo_offset, f64 skew, u8 valid
//   trailing u32 CRC-32 over all preceding bytes
inline constexpr std::size_t kPacketHeaderSize = 26;
inline constexpr std::size_t kPacketEntrySize = 18;
inline constexpr std::size_t kPacketCrcSize = 4;

inline std::size_t encoded_packet_size(std::size_t table_entries) {
  return kPacketHeaderSize + kPacketEntrySize * table_entries + kPacketCrcSize;
}

enum class DecodeErrorKind { short_buffer, crc_mismatch, id_out_of_range, trailing_bytes };

class DecodeError : public std::runtime_error {
 public:
  DecodeError(DecodeErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  DecodeErrorKind kind() const { return kind_; }

 private:
  DecodeErrorKind kind_;
};

namespace detail {
inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}
inline double get_f64(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return std::bit_cast<double>(bits);
}
}  // namespace detail

inline std::vector<std::uint8_t> encode_packet(const Packet& pkt) {
  if (pkt.sender_id < 1 || pkt.sender_id > 255)
    throw std::invalid_argument("encode_packet: sender_id out of range");
  if (pkt.clock_table.size() > 254)
    throw std::invalid_argument("encode_packet: clock table too large");
  for (const auto& e : pkt.clock_table) {
    if (e.neighbor_id < 1 || e.neighbor_id > 255)
      throw std::invalid_argument("encode_packet: neighbor_id out of range");
    if (e.neighbor_id == pkt.sender_id)
      throw std::invalid_argument("encode_packet: table entry for the sender itself");
  }

  std::vector<std::uint8_t> out;
  out.reserve(encoded_packet_size(pkt.clock_table.size()));
  out.push_back(static_cast<std::uint8_t>(pkt.sender_id));
  detail::put_f64(out, pkt.tx_timestamp);
  detail::put_f64(out, pkt.position.x());
  detail::put_f64(out, pkt.position.y());
  out.push_back(static_cast<std::uint8_t>(pkt.clock_table.size()));
  for (const auto& e : pkt.clock_table) {
    out.push_back(static_cast<std::uint8_t>(e.neighbor_id));
    detail::put_f64(out, e.pseudo_offset);
    detail::put_f64(out, e.skew);
    out.push_back(e.valid ? 1 : 0);
  }
  const std::uint32_t c = crc32(out.data(), out.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(c >> (8 * i)));
  return out;
}

inline Packet decode_packet(std::span<const std::uint8_t> buf) {
  if (buf.size() < encoded_packet_size(0))
    throw DecodeError(DecodeErrorKind::short_buffer, "decode_packet: buffer below minimum size");
  const std::size_t n = buf[25];
  const std::size_t expected = encoded_packet_size(n);
  if (buf.size() < expected)
    throw DecodeError(DecodeErrorKind::short_buffer, "decode_packet: truncated clock table");
  if (buf.size() > expected)
    throw DecodeError(DecodeErrorKind::trailing_bytes, "decode_packet: trailing bytes");

  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i)
    stored |= static_cast<std::uint32_t>(buf[expected - 4 + i]) << (8 * i);
  if (crc32(buf.data(), expected - 4) != stored)
    throw DecodeError(DecodeErrorKind::crc_mismatch, "decode_packet: CRC mismatch");

  Packet pkt;
  pkt.sender_id = buf[0];
  if (pkt.sender_id == 0)
    throw DecodeError(DecodeErrorKind::id_out_of_range, "decode_packet: sender_id is 0");
  pkt.tx_timestamp = detail::get_f64(buf.data() + 1);
  pkt.position = Vec2(detail::get_f64(buf.data() + 9), detail::get_f64(buf.data() + 17));
  pkt.clock_table.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint8_t* p = buf.data() + kPacketHeaderSize + k * kPacketEntrySize;
    ClockTableEntry e;
    e.neighbor_id = p[0];
    if (e.neighbor_id == 0)
      throw DecodeError(DecodeErrorKind::id_out_of_range, "decode_packet: neighbor_id is 0");
    e.pseudo_offset = detail::get_f64(p + 1);
    e.skew = detail::get_f64(p + 9);
    e.valid = p[17] != 0;
    pkt.clock_table.push_back(e);
  }
  return pkt;
}

}  // namespace relsync
