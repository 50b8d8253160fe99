#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "relsync/io.hpp"
#include "relsync/packet.hpp"

namespace relsync {

// Conformance vectors for the wire codec: known-good packets plus corrupted
// buffers with their expected decode error kinds.
struct CodecVector {
  std::string label;
  std::vector<std::uint8_t> bytes;
  std::optional<Packet> packet;          // set for decodable vectors
  std::optional<DecodeErrorKind> error;  // set for rejected vectors
};

inline const char* to_string(DecodeErrorKind k) {
  switch (k) {
    case DecodeErrorKind::short_buffer: return "short_buffer";
    case DecodeErrorKind::crc_mismatch: return "crc_mismatch";
    case DecodeErrorKind::id_out_of_range: return "id_out_of_range";
    case DecodeErrorKind::trailing_bytes: return "trailing_bytes";
  }
  return "?";
}

inline std::vector<CodecVector> codec_vectors() {
  std::vector<CodecVector> out;
  auto add_valid = [&](const std::string& label, const Packet& p) {
    out.push_back(CodecVector{label, encode_packet(p), p, std::nullopt});
  };

  Packet minimal;
  minimal.sender_id = 1;
  minimal.tx_timestamp = 0.0;
  minimal.position = {0.0, 0.0};
  minimal.clock_table.push_back(ClockTableEntry{2, 0.0, 0.0, false});
  add_valid("minimal two-agent packet, placeholder entry", minimal);

  Packet plain;
  plain.sender_id = 2;
  plain.tx_timestamp = 1.0009765625;  // exactly representable
  plain.position = {1.5, -2.25};
  plain.clock_table.push_back(ClockTableEntry{1, 2.5e-7, 1.25e-6, true});
  add_valid("single tracked neighbor", plain);

  Packet cycle;
  cycle.sender_id = 3;
  cycle.tx_timestamp = 12.625;
  cycle.position = {40.0, 56.4};
  cycle.clock_table.push_back(ClockTableEntry{1, -3.0e-7, -4.0e-6, true});
  cycle.clock_table.push_back(ClockTableEntry{2, 1.0e-7, 2.0e-6, true});
  cycle.clock_table.push_back(ClockTableEntry{4, 0.0, 0.0, false});
  cycle.clock_table.push_back(ClockTableEntry{5, 8.25e-8, -1.0e-6, true});
  add_valid("five-agent cycle, one untracked neighbor", cycle);

  Packet stale;
  stale.sender_id = 4;
  stale.tx_timestamp = 59.9990234375;
  stale.position = {-13.0, 42.5};
  stale.clock_table.push_back(ClockTableEntry{1, 5.0e-7, 5.0e-6, true});
  stale.clock_table.push_back(ClockTableEntry{2, 4.0e-7, -5.0e-6, false});  // stale, kept
  add_valid("stale entry advertised as invalid", stale);

  Packet empty_table;
  empty_table.sender_id = 254;
  empty_table.tx_timestamp = -0.5;
  empty_table.position = {1e6, -1e6};
  add_valid("empty clock table", empty_table);

  Packet extremes;
  extremes.sender_id = 7;
  extremes.tx_timestamp = 4503599627370496.0;  // 2^52
  extremes.position = {2.2250738585072014e-308, 1.7976931348623157e308};
  extremes.clock_table.push_back(
      ClockTableEntry{255, -2.2250738585072014e-308, 4.9406564584124654e-324, true});
  add_valid("extreme float fields", extremes);

  auto add_bad = [&](const std::string& label, std::vector<std::uint8_t> bytes,
                     DecodeErrorKind kind) {
    out.push_back(CodecVector{label, std::move(bytes), std::nullopt, kind});
  };

  {
    std::vector<std::uint8_t> b = encode_packet(plain);
    b[9] ^= 0x01;  // flip one payload bit, CRC no longer matches
    add_bad("payload bit flip", b, DecodeErrorKind::crc_mismatch);
  }
  {
    std::vector<std::uint8_t> b = encode_packet(plain);
    b.back() ^= 0x80;  // corrupt the checksum itself
    add_bad("checksum corruption", b, DecodeErrorKind::crc_mismatch);
  }
  {
    std::vector<std::uint8_t> b = encode_packet(cycle);
    b.resize(b.size() - 5);
    add_bad("truncated mid-table", b, DecodeErrorKind::short_buffer);
  }
  add_bad("buffer shorter than any packet", {0x01, 0x02, 0x03}, DecodeErrorKind::short_buffer);
  {
    std::vector<std::uint8_t> b = encode_packet(minimal);
    b.push_back(0x00);
    add_bad("one trailing byte", b, DecodeErrorKind::trailing_bytes);
  }
  {
    // hand-built: sender id 0 with a recomputed, matching checksum
    Packet p = minimal;
    std::vector<std::uint8_t> b = encode_packet(p);
    b[0] = 0;
    const std::uint32_t crc = crc32(b.data(), b.size() - kPacketCrcSize);
    for (int k = 0; k < 4; ++k)
      b[b.size() - 4 + static_cast<size_t>(k)] = static_cast<std::uint8_t>(crc >> (8 * k));
    add_bad("sender id zero", b, DecodeErrorKind::id_out_of_range);
  }
  {
    Packet p = plain;
    std::vector<std::uint8_t> b = encode_packet(p);
    b[kPacketHeaderSize] = 0;  // first table entry's neighbor id
    const std::uint32_t crc = crc32(b.data(), b.size() - kPacketCrcSize);
    for (int k = 0; k < 4; ++k)
      b[b.size() - 4 + static_cast<size_t>(k)] = static_cast<std::uint8_t>(crc >> (8 * k));
    add_bad("table neighbor id zero", b, DecodeErrorKind::id_out_of_range);
  }
  return out;
}

inline std::string hex_encode(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 0xf];
  }
  return out;
}

inline std::string codec_vectors_text() {
  const std::vector<CodecVector> vecs = codec_vectors();
  std::string out;
  out += "# wire codec conformance vectors\n";
  out += "# layout: u8 sender | f64 tx_timestamp | 2x f64 position | u8 count |\n";
  out += "#         count x (u8 neighbor, f64 pseudo_offset, f64 skew, u8 valid) | u32 crc\n";
  out += "# all multibyte fields little-endian; crc32 poly 0xedb88320, init/xor 0xffffffff\n";
  int idx = 0;
  for (const CodecVector& v : vecs) {
    out += "\n[vector " + std::to_string(++idx) + "] " + v.label + "\n";
    out += "hex = " + hex_encode(v.bytes) + "\n";
    if (v.error) {
      out += "decode_error = " + std::string(to_string(*v.error)) + "\n";
      continue;
    }
    const Packet& p = *v.packet;
    out += "sender_id = " + std::to_string(p.sender_id) + "\n";
    out += "tx_timestamp = " + format_double(p.tx_timestamp) + "\n";
    out += "position = " + format_double(p.position.x()) + ", " + format_double(p.position.y()) +
           "\n";
    out += "entries = " + std::to_string(p.clock_table.size()) + "\n";
    for (const ClockTableEntry& e : p.clock_table) {
      out += "  neighbor " + std::to_string(e.neighbor_id) + ": pseudo_offset " +
             format_double(e.pseudo_offset) + ", skew " + format_double(e.skew) +
             (e.valid ? ", valid" : ", invalid") + "\n";
    }
  }
  return out;
}

}  // namespace relsync
