#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace relsync {

namespace detail {
inline const std::array<std::uint32_t, 256>& crc32_table() {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1u) ? 0xedb88320u ^ (c >> 1) : (c >> 1);
      t[i] = c;
    }
    return t;
  }();
  return table;
}
}  // namespace detail

// Standard reflected CRC-32 (polynomial 0xEDB88320, init/xorout 0xFFFFFFFF).
inline std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
  const auto& table = detail::crc32_table();
  std::uint32_t c = 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xffu] ^ (c >> 8);
  return c ^ 0xffffffffu;
}

}  // namespace relsync
