#include "earid/bch.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace earid::ecc {

namespace {

// Primitive polynomials (bit i = coefficient of x^i).
unsigned primitive_poly(unsigned m) {
  switch (m) {
    case 7: return 0x89;    // x^7 + x^3 + 1
    case 8: return 0x11d;   // x^8 + x^4 + x^3 + x^2 + 1
    case 9: return 0x211;   // x^9 + x^4 + 1
    default: throw std::invalid_argument("BchCode: unsupported field degree");
  }
}

// Multiplies two GF(2)[x] polynomials given as bit vectors.
BitVec gf2_poly_mul(const BitVec& a, const BitVec& b) {
  BitVec out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] ^= b[j];
  }
  return out;
}

}  // namespace

BchCode::BchCode(unsigned m, unsigned t_design, unsigned t_cap, std::string name)
    : m_(m), n_((1u << m) - 1), t_design_(t_design), t_cap_(t_cap), name_(std::move(name)) {
  if (t_cap_ == 0 || t_cap_ > t_design_) {
    throw std::invalid_argument("BchCode: need 0 < t_cap <= t_design");
  }

  // Field tables.
  const unsigned poly = primitive_poly(m);
  const unsigned size = 1u << m;
  exp_.assign(2 * n_, 0);
  log_.assign(size, -1);
  unsigned x = 1;
  for (std::size_t i = 0; i < n_; ++i) {
    exp_[i] = x;
    log_[x] = static_cast<int>(i);
    x <<= 1;
    if (x & size) x ^= poly;
  }
  if (x != 1) throw std::logic_error("BchCode: polynomial is not primitive");
  for (std::size_t i = n_; i < 2 * n_; ++i) exp_[i] = exp_[i - n_];

  // Generator: LCM of the minimal polynomials of alpha^1 .. alpha^{2 t_design}.
  std::set<unsigned> covered;
  generator_ = BitVec{1};
  for (unsigned e = 1; e <= 2 * t_design_; ++e) {
    const unsigned rep = e % n_;
    if (covered.count(rep)) continue;
    // Cyclotomic coset of rep under doubling mod n.
    std::vector<unsigned> coset;
    unsigned cur = rep;
    do {
      coset.push_back(cur);
      covered.insert(cur);
      cur = static_cast<unsigned>((2ull * cur) % n_);
    } while (cur != rep);

    // Minimal polynomial = prod (x - alpha^c) over the coset; coefficients
    // land in GF(2).
    std::vector<unsigned> mp{1};  // coefficients in GF(2^m), index = degree
    for (unsigned c : coset) {
      std::vector<unsigned> next(mp.size() + 1, 0);
      const unsigned root = exp_[c];
      for (std::size_t d = 0; d < mp.size(); ++d) {
        next[d + 1] ^= mp[d];  // x * mp
        next[d] ^= field_mul(mp[d], root);
      }
      mp.swap(next);
    }
    BitVec mp_bits(mp.size());
    for (std::size_t d = 0; d < mp.size(); ++d) {
      if (mp[d] > 1) throw std::logic_error("BchCode: minimal polynomial not binary");
      mp_bits[d] = static_cast<std::uint8_t>(mp[d]);
    }
    generator_ = gf2_poly_mul(generator_, mp_bits);
  }
  if (generator_.size() > n_) throw std::logic_error("BchCode: generator degree too large");
  k_ = n_ - (generator_.size() - 1);
}

unsigned BchCode::field_mul(unsigned a, unsigned b) const {
  if (a == 0 || b == 0) return 0;
  return exp_[static_cast<std::size_t>(log_[a]) + static_cast<std::size_t>(log_[b])];
}

unsigned BchCode::field_pow_alpha(long e) const {
  long r = e % static_cast<long>(n_);
  if (r < 0) r += static_cast<long>(n_);
  return exp_[static_cast<std::size_t>(r)];
}

unsigned BchCode::field_inv(unsigned a) const {
  if (a == 0) throw std::domain_error("BchCode: inverse of zero");
  return exp_[n_ - static_cast<std::size_t>(log_[a])];
}

unsigned BchCode::poly_eval_alpha_power(std::span<const std::uint8_t> word,
                                        unsigned power) const {
  // Horner evaluation of word(x) at x = alpha^power.
  unsigned acc = 0;
  const unsigned xval = field_pow_alpha(power);
  for (std::size_t i = word.size(); i-- > 0;) {
    acc = field_mul(acc, xval);
    if (word[i]) acc ^= 1u;
  }
  return acc;
}

BitVec BchCode::encode(std::span<const std::uint8_t> message) const {
  if (message.size() != k_) throw std::invalid_argument("bch_encode: message length != k");
  const std::size_t parity = n_ - k_;
  BitVec cw(n_, 0);
  for (std::size_t i = 0; i < k_; ++i) cw[parity + i] = message[i] & 1u;

  // Remainder of x^{n-k} m(x) mod g(x) via long division.
  BitVec rem(parity, 0);
  for (std::size_t i = n_; i-- > parity;) {
    const std::uint8_t incoming = cw[i];
    const std::uint8_t feedback = static_cast<std::uint8_t>(incoming ^ rem[parity - 1]);
    for (std::size_t j = parity - 1; j > 0; --j) {
      rem[j] = static_cast<std::uint8_t>(rem[j - 1] ^ (feedback & generator_[j]));
    }
    rem[0] = static_cast<std::uint8_t>(feedback & generator_[0]);
  }
  for (std::size_t i = 0; i < parity; ++i) cw[i] = rem[i];
  return cw;
}

bool BchCode::is_codeword(std::span<const std::uint8_t> word) const {
  if (word.size() != n_) return false;
  for (unsigned j = 1; j <= 2 * t_cap_; ++j) {
    if (poly_eval_alpha_power(word, j) != 0) return false;
  }
  return true;
}

std::optional<BitVec> BchCode::decode(std::span<const std::uint8_t> received) const {
  if (received.size() != n_) throw std::invalid_argument("bch_decode: word length != n");
  const unsigned t = t_cap_;
  const unsigned n_syn = 2 * t;

  std::vector<unsigned> syn(n_syn + 1, 0);  // syn[1..2t]
  bool all_zero = true;
  for (unsigned j = 1; j <= n_syn; ++j) {
    syn[j] = poly_eval_alpha_power(received, j);
    if (syn[j] != 0) all_zero = false;
  }

  BitVec corrected(received.begin(), received.end());
  if (!all_zero) {
    // Berlekamp-Massey over GF(2^m).
    std::vector<unsigned> lambda{1}, prev{1};
    unsigned l = 0;
    unsigned prev_discrepancy = 1;
    unsigned shift = 1;
    for (unsigned r = 1; r <= n_syn; ++r) {
      unsigned delta = 0;
      for (std::size_t i = 0; i < lambda.size() && i <= l; ++i) {
        if (lambda[i] != 0 && syn[r - i] != 0) delta ^= field_mul(lambda[i], syn[r - i]);
      }
      if (delta == 0) {
        ++shift;
        continue;
      }
      // lambda' = lambda - (delta/prev_discrepancy) x^shift prev
      std::vector<unsigned> next = lambda;
      const unsigned coef = field_mul(delta, field_inv(prev_discrepancy));
      if (next.size() < prev.size() + shift) next.resize(prev.size() + shift, 0);
      for (std::size_t i = 0; i < prev.size(); ++i) {
        if (prev[i]) next[i + shift] ^= field_mul(coef, prev[i]);
      }
      if (2 * l <= r - 1) {
        prev = lambda;
        prev_discrepancy = delta;
        l = r - l;
        shift = 1;
      } else {
        ++shift;
      }
      lambda.swap(next);
    }
    while (!lambda.empty() && lambda.back() == 0) lambda.pop_back();
    const std::size_t deg = lambda.size() - 1;
    if (deg == 0 || deg > t || l != deg) return std::nullopt;

    // Chien search: error at position i iff lambda(alpha^{-i}) == 0.
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < n_; ++i) {
      unsigned acc = 0;
      for (std::size_t d = 0; d < lambda.size(); ++d) {
        if (lambda[d] == 0) continue;
        const long e = static_cast<long>(log_[lambda[d]]) -
                       static_cast<long>(d) * static_cast<long>(i);
        acc ^= field_pow_alpha(e);
      }
      if (acc == 0) {
        positions.push_back(i);
        if (positions.size() > deg) break;
      }
    }
    if (positions.size() != deg) return std::nullopt;
    for (std::size_t p : positions) corrected[p] ^= 1u;

    // The corrected word must clear every syndrome we track.
    if (!is_codeword(corrected)) return std::nullopt;
  }

  BitVec message(corrected.begin() + static_cast<std::ptrdiff_t>(n_ - k_), corrected.end());
  return message;
}

const BchCode& BchCode::bch127() {
  static const BchCode code(7, 10, 10, "bch127");
  return code;
}

const BchCode& BchCode::bch255() {
  static const BchCode code(8, 19, 19, "bch255");
  return code;
}

const BchCode& BchCode::bch511() {
  // Standard (511, 241) narrow-sense construction corrects 36 errors; the
  // accepted weight is capped at 30 to match the operating point used
  // everywhere else in this project.
  static const BchCode code(9, 36, 30, "bch511");
  return code;
}

const BchCode& BchCode::by_name(const std::string& name) {
  if (name == "bch127") return bch127();
  if (name == "bch255") return bch255();
  if (name == "bch511") return bch511();
  throw std::invalid_argument("unknown ECC config: " + name);
}

}  // namespace earid::ecc
