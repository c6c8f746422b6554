#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace earid {

using Digest32 = std::array<std::uint8_t, 32>;

// SHA-256 of a byte buffer (OpenSSL EVP under the hood).
Digest32 sha256(std::span<const std::uint8_t> data);

}  // namespace earid
