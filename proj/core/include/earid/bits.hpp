#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace earid {

// One bit per element, values restricted to {0, 1}.
using BitVec = std::vector<std::uint8_t>;

// Packs bits LSB-first: bit i lands in byte i/8 at position i%8, trailing
// bits of the last byte are zero. This layout is part of the wire and hash
// contracts and must not change.
inline std::vector<std::uint8_t> pack_bits_lsb(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  return out;
}

inline BitVec unpack_bits_lsb(std::span<const std::uint8_t> bytes, std::size_t n_bits) {
  if (bytes.size() < (n_bits + 7) / 8) {
    throw std::invalid_argument("unpack_bits_lsb: byte buffer too short");
  }
  BitVec out(n_bits);
  for (std::size_t i = 0; i < n_bits; ++i) {
    out[i] = (bytes[i / 8] >> (i % 8)) & 1u;
  }
  return out;
}

inline std::size_t hamming_distance(std::span<const std::uint8_t> a,
                                    std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("hamming_distance: length mismatch");
  }
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] ^ b[i]) ? 1u : 0u;
  }
  return d;
}

inline BitVec xor_bits(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("xor_bits: length mismatch");
  }
  BitVec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((a[i] ^ b[i]) & 1u);
  }
  return out;
}

inline std::size_t popcount_bits(std::span<const std::uint8_t> bits) {
  std::size_t n = 0;
  for (auto b : bits) n += b ? 1u : 0u;
  return n;
}

}  // namespace earid
