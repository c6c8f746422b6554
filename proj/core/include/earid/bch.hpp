#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "earid/bits.hpp"

namespace earid::ecc {

// Narrow-sense primitive binary BCH code over GF(2^m). Codeword bit i is the
// coefficient of x^i; encoding is systematic with message bits in positions
// n-k .. n-1. Decoding is bounded-distance: syndromes, Berlekamp-Massey,
// Chien search, with failure whenever the error locator misbehaves.
class BchCode {
 public:
  // t_design shapes the generator polynomial; t_cap (<= t_design) is the
  // decoder's accepted error weight.
  BchCode(unsigned m, unsigned t_design, unsigned t_cap, std::string name);

  const std::string& name() const { return name_; }
  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t t() const { return t_cap_; }

  BitVec encode(std::span<const std::uint8_t> message) const;

  // Message bits if a codeword lies within Hamming distance t of the input;
  // std::nullopt otherwise. Miscorrection for heavier errors is possible and
  // must be caught by the caller (hash check in the commitment scheme).
  std::optional<BitVec> decode(std::span<const std::uint8_t> received) const;

  // All 2*t syndromes zero.
  bool is_codeword(std::span<const std::uint8_t> word) const;

  // Generator polynomial coefficients, degree n-k, GF(2).
  const BitVec& generator() const { return generator_; }

  // The paper's three operating points, constructed once.
  static const BchCode& bch127();  // (127, 64, 10)
  static const BchCode& bch255();  // (255, 123, 19)
  static const BchCode& bch511();  // (511, 241), decode capped at 30
  static const BchCode& by_name(const std::string& name);

 private:
  unsigned field_mul(unsigned a, unsigned b) const;
  unsigned field_pow_alpha(long e) const;  // alpha^e with e reduced mod n
  unsigned field_inv(unsigned a) const;
  unsigned poly_eval_alpha_power(std::span<const std::uint8_t> word, unsigned power) const;

  unsigned m_;
  std::size_t n_;
  std::size_t k_;
  unsigned t_design_;
  unsigned t_cap_;
  std::string name_;
  std::vector<unsigned> exp_;  // alpha^i, i in [0, 2n)
  std::vector<int> log_;       // log_alpha, log_[0] unused
  BitVec generator_;
};

}  // namespace earid::ecc
