#pragma once

// Canonical byte serialization helpers. Every hashed structure in hdcoin
// (datasets, transactions, block headers) is laid out big-endian through
// this buffer so that independent implementations agree byte-for-byte.

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hdcoin {

using Digest32 = std::array<std::uint8_t, 32>;

class ByteBuffer {
 public:
  void append_u8(std::uint8_t v) { data_.push_back(v); }

  void append_u32_be(std::uint32_t v) {
    data_.push_back(static_cast<std::uint8_t>(v >> 24));
    data_.push_back(static_cast<std::uint8_t>(v >> 16));
    data_.push_back(static_cast<std::uint8_t>(v >> 8));
    data_.push_back(static_cast<std::uint8_t>(v));
  }

  void append_u64_be(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) {
      data_.push_back(static_cast<std::uint8_t>(v >> shift));
    }
  }

  void append_double_be(double v) {
    append_u64_be(std::bit_cast<std::uint64_t>(v));
  }

  void append_bytes(std::span<const std::uint8_t> bytes) {
    data_.insert(data_.end(), bytes.begin(), bytes.end());
  }

  // UTF-8 text followed by a NUL terminator, so adjacent strings cannot
  // be reassociated.
  void append_cstr(std::string_view s) {
    data_.insert(data_.end(), s.begin(), s.end());
    data_.push_back(0x00);
  }

  [[nodiscard]] std::span<const std::uint8_t> view() const { return data_; }
  [[nodiscard]] const std::vector<std::uint8_t>& data() const { return data_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

 private:
  std::vector<std::uint8_t> data_;
};

inline std::string hex_encode(std::span<const std::uint8_t> bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const std::uint8_t b : bytes) {
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0x0f]);
  }
  return out;
}

inline std::vector<std::uint8_t> hex_decode(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex_decode: odd length");
  const auto nibble = [](char c) -> std::uint8_t {
    if (c >= '0' && c <= '9') return static_cast<std::uint8_t>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<std::uint8_t>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<std::uint8_t>(c - 'A' + 10);
    throw std::invalid_argument("hex_decode: bad character");
  };
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((nibble(hex[2 * i]) << 4) | nibble(hex[2 * i + 1]));
  }
  return out;
}

inline Digest32 digest_from_hex(std::string_view hex) {
  const auto bytes = hex_decode(hex);
  if (bytes.size() != 32) throw std::invalid_argument("digest_from_hex: need 64 hex chars");
  Digest32 d{};
  std::copy(bytes.begin(), bytes.end(), d.begin());
  return d;
}

}  // namespace hdcoin
