#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "earid/bits.hpp"
#include "earid/dct.hpp"
#include "earid/fft.hpp"
#include "earid/rng.hpp"
#include "earid/sha256.hpp"

using namespace earid;

namespace {

// O(n^2) DFT oracle.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t) / n;
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> random_vector(RandomStream& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.next_normal();
  return v;
}

}  // namespace

TEST_CASE("fft matches the naive DFT") {
  RandomStream rng(42);
  for (std::size_t n : {2u, 8u, 64u, 256u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.next_normal(), rng.next_normal()};
    auto got = x;
    fft_inplace(got);
    const auto want = naive_dft(x);
    for (std::size_t k = 0; k < n; ++k) {
      CHECK(std::abs(got[k] - want[k]) < 1e-9 * static_cast<double>(n));
    }
  }
}

TEST_CASE("irfft inverts rfft") {
  RandomStream rng(43);
  const auto x = random_vector(rng, 1024);
  const auto spec = rfft(x, 1024);
  const auto back = irfft(spec, 1024);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));
}

TEST_CASE("fft_convolve matches direct convolution") {
  RandomStream rng(44);
  const auto a = random_vector(rng, 300);
  const auto b = random_vector(rng, 37);
  const auto got = fft_convolve(a, b, a.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    double want = 0.0;
    for (std::size_t j = 0; j < b.size() && j <= n; ++j) want += a[n - j] * b[j];
    CHECK(got[n] == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("fft_cross_correlate matches the direct sum") {
  RandomStream rng(45);
  const auto s = random_vector(rng, 500);
  const auto r = random_vector(rng, 500);
  const std::size_t max_lag = 64;
  const auto got = fft_cross_correlate(s, r, max_lag);
  for (std::size_t lag = 0; lag < max_lag; ++lag) {
    double want = 0.0;
    for (std::size_t t = 0; t + lag < r.size(); ++t) want += s[t] * r[t + lag];
    CHECK(got[lag] == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("dct forward/inverse are an orthonormal pair") {
  RandomStream rng(46);
  const DctPlan plan(129);
  const auto x = random_vector(rng, 129);
  const auto y = plan.forward(x);
  const auto back = plan.inverse(y);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-12));

  // Parseval: orthonormal transforms preserve energy.
  double ex = 0.0, ey = 0.0;
  for (double v : x) ex += v * v;
  for (double v : y) ey += v * v;
  CHECK(ey == doctest::Approx(ex).epsilon(1e-12));
}

TEST_CASE("dct of a constant is a pure zeroth coefficient") {
  const DctPlan plan(64);
  std::vector<double> x(64, 3.25);
  const auto y = plan.forward(x);
  CHECK(y[0] == doctest::Approx(3.25 * std::sqrt(64.0)));
  for (std::size_t j = 1; j < y.size(); ++j) CHECK(std::abs(y[j]) < 1e-12);
}

TEST_CASE("dct basis row transforms to a single coefficient") {
  const DctPlan plan(97);
  const auto row = plan.basis_row(13);
  const auto y = plan.forward(row);
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (j == 13) {
      CHECK(y[j] == doctest::Approx(1.0).epsilon(1e-12));
    } else {
      CHECK(std::abs(y[j]) < 1e-12);
    }
  }
}

TEST_CASE("counter rng is deterministic and stateless") {
  RandomStream a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(u64_at(99, 5) == u64_at(99, 5));
  CHECK(u64_at(99, 5) != u64_at(99, 6));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
}

TEST_CASE("inverse normal cdf hits known quantiles") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963985).epsilon(1e-6));
  CHECK(inverse_normal_cdf(0.025) == doctest::Approx(-1.959963985).epsilon(1e-6));
  // Symmetry.
  for (double p : {0.001, 0.1, 0.3, 0.49}) {
    CHECK(inverse_normal_cdf(p) == doctest::Approx(-inverse_normal_cdf(1.0 - p)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::invalid_argument);
}

TEST_CASE("normal draws have unit variance at desk scale") {
  RandomStream rng(7);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("bit packing round-trips and keeps LSB-first order") {
  BitVec bits{1, 0, 1, 1, 0, 0, 0, 1, 1, 0, 1};
  const auto packed = pack_bits_lsb(bits);
  REQUIRE(packed.size() == 2);
  CHECK(packed[0] == 0x8d);  // 10110001 LSB-first
  CHECK(packed[1] == 0x05);
  CHECK(unpack_bits_lsb(packed, bits.size()) == bits);

  RandomStream rng(3);
  for (int it = 0; it < 50; ++it) {
    BitVec v(1 + rng.next_below(600));
    for (auto& b : v) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
    CHECK(unpack_bits_lsb(pack_bits_lsb(v), v.size()) == v);
  }
}

TEST_CASE("hamming distance basics") {
  BitVec a{1, 0, 1}, b{1, 1, 0};
  CHECK(hamming_distance(a, b) == 2);
  CHECK(hamming_distance(a, a) == 0);
  BitVec c{1, 0};
  CHECK_THROWS_AS(hamming_distance(a, c), std::invalid_argument);
}

TEST_CASE("sha256 known vector") {
  const std::string msg = "abc";
  const auto digest =
      sha256(std::span(reinterpret_cast<const std::uint8_t*>(msg.data()), msg.size()));
  const std::uint8_t expected[32] = {0xba, 0x78, 0x16, 0xbf, 0x8f, 0x01, 0xcf, 0xea,
                                     0x41, 0x41, 0x40, 0xde, 0x5d, 0xae, 0x22, 0x23,
                                     0xb0, 0x03, 0x61, 0xa3, 0x96, 0x17, 0x7a, 0x9c,
                                     0xb4, 0x10, 0xff, 0x61, 0xf2, 0x00, 0x15, 0xad};
  for (int i = 0; i < 32; ++i) CHECK(digest[static_cast<std::size_t>(i)] == expected[i]);
}
