#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "earid/keygen.hpp"
#include "earid/rng.hpp"

using namespace earid;
using namespace earid::keygen;

namespace {

// Independent brute-force evaluation of the Renyi sum.
double renyi_oracle(const std::vector<double>& p, const std::vector<double>& q, double alpha) {
  if (alpha == 0.0) {
    double mass = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) mass += q[i];
    }
    return -std::log2(mass);
  }
  long double sum = 0.0L;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    sum += std::pow(static_cast<long double>(p[i]), static_cast<long double>(alpha)) *
           std::pow(static_cast<long double>(q[i]), static_cast<long double>(1.0 - alpha));
  }
  return static_cast<double>(std::log2(sum) / (alpha - 1.0));
}

std::vector<double> random_histogram(RandomStream& rng, std::size_t bins, bool allow_zeros) {
  std::vector<double> h(bins);
  double total = 0.0;
  for (auto& v : h) {
    v = allow_zeros && rng.next_unit() < 0.3 ? 0.0 : rng.next_unit();
    total += v;
  }
  if (total == 0.0) {
    h[0] = 1.0;
    total = 1.0;
  }
  for (auto& v : h) v /= total;
  return h;
}

// Brute-force Otsu oracle: recomputes class statistics per candidate
// threshold from scratch and compares with the same exact integer rule.
BitVec otsu_oracle(const std::vector<double>& values) {
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double mn = *mn_it, mx = *mx_it;
  const double width = (mx - mn) / 256.0;
  auto level_of = [&](double v) {
    auto lvl = static_cast<long>(std::floor((v - mn) / width));
    return static_cast<int>(std::clamp(lvl, 0L, 255L));
  };
  using i128 = __int128;
  i128 best_num = -1;
  long long best_den = 1;
  int best_t = 0;
  for (int t = 0; t < 256; ++t) {
    long long w0 = 0, w1 = 0, sum0 = 0, sum1 = 0;
    for (double v : values) {
      const int lvl = level_of(v);
      if (lvl <= t) {
        ++w0;
        sum0 += lvl;
      } else {
        ++w1;
        sum1 += lvl;
      }
    }
    if (w0 == 0 || w1 == 0) continue;
    const long long delta = sum0 * w1 - sum1 * w0;
    const i128 num = static_cast<i128>(delta) * delta;
    const long long den = w0 * w1;
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_t = t;
    }
  }
  BitVec mask(values.size(), 0);
  for (std::size_t i = 0; i < values.size(); ++i) mask[i] = level_of(values[i]) > best_t ? 1 : 0;
  return mask;
}

}  // namespace

TEST_CASE("single sample gives an indicator histogram") {
  HistogramBins bins{0.0, 1.0, 10};
  std::vector<double> sample{4.5};
  const auto p = estimate_distribution(sample, bins);
  for (std::size_t i = 0; i < p.size(); ++i) CHECK(p[i] == (i == 4 ? 1.0 : 0.0));
}

TEST_CASE("uniform samples give a near-uniform histogram") {
  HistogramBins bins{0.0, 1.0 / 32.0, 32};
  RandomStream rng(1);
  std::vector<double> samples(100000);
  for (auto& s : samples) s = rng.next_unit();
  const auto p = estimate_distribution(samples, bins);
  for (double v : p) CHECK(v == doctest::Approx(1.0 / 32.0).epsilon(0.05));
}

TEST_CASE("out-of-range samples clamp to the boundary bins") {
  HistogramBins bins{0.0, 1.0, 4};
  std::vector<double> samples{-10.0, 17.0};
  const auto p = estimate_distribution(samples, bins);
  CHECK(p[0] == 0.5);
  CHECK(p[3] == 0.5);
}

TEST_CASE("laplace smoothing fills empty bins by the documented formula") {
  std::vector<double> q{1.0, 0.0};
  const auto s = laplace_smooth(q, 1e-6);
  CHECK(s[1] == doctest::Approx(1e-6 / (1.0 + 2.0 * 1e-6)).epsilon(1e-12));
  double total = 0.0;
  for (double v : s) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("divergence of a distribution from itself is zero") {
  RandomStream rng(2);
  for (double alpha : {0.0, 0.25, 0.5, 1.0, 2.0}) {
    for (int it = 0; it < 20; ++it) {
      const auto q = laplace_smooth(random_histogram(rng, 16, false));
      CHECK(std::abs(biometric_information(q, q, alpha)) < 1e-9);
    }
  }
}

TEST_CASE("alpha = 0 closed form on an indicator vs two-bin uniform") {
  std::vector<double> p{1.0, 0.0};
  std::vector<double> q{0.5, 0.5};
  CHECK(biometric_information(p, q, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("renyi divergence matches the brute-force sum") {
  RandomStream rng(3);
  for (int it = 0; it < 1000; ++it) {
    const auto p = random_histogram(rng, 8, true);
    const auto q = laplace_smooth(random_histogram(rng, 8, false));
    for (double alpha : {0.0, 0.25, 0.5, 2.0}) {
      CHECK(biometric_information(p, q, alpha) ==
            doctest::Approx(renyi_oracle(p, q, alpha)).epsilon(1e-9));
    }
  }
}

TEST_CASE("alpha -> 0 limit agrees with the closed form") {
  RandomStream rng(4);
  for (int it = 0; it < 100; ++it) {
    const auto p = random_histogram(rng, 32, true);
    const auto q = laplace_smooth(random_histogram(rng, 32, false));
    const double closed = biometric_information(p, q, 0.0);
    const double limit = biometric_information(p, q, 1e-6);
    CHECK(std::abs(closed - limit) < 1e-3);
  }
}

TEST_CASE("divergence is nonnegative for smoothed pairs") {
  RandomStream rng(5);
  for (int it = 0; it < 1000; ++it) {
    const auto p = laplace_smooth(random_histogram(rng, 12, true));
    const auto q = laplace_smooth(random_histogram(rng, 12, true));
    for (double alpha : {0.0, 0.5, 2.0}) {
      CHECK(biometric_information(p, q, alpha) > -1e-9);
    }
  }
}

TEST_CASE("otsu separates two obvious clusters") {
  std::vector<double> bi{0.0, 0.0, 0.0, 10.0, 10.0};
  CHECK(otsu_mask(bi) == BitVec{0, 0, 0, 1, 1});
}

TEST_CASE("otsu equals the brute-force maximizer on random inputs") {
  RandomStream rng(6);
  for (int it = 0; it < 300; ++it) {
    const std::size_t d = 2 + rng.next_below(511);
    std::vector<double> bi(d);
    for (auto& v : bi) {
      // Mixture shape: mostly low values with a heavy upper cluster.
      v = rng.next_unit() < 0.7 ? rng.next_unit() : 3.0 + 2.0 * rng.next_unit();
    }
    CHECK(otsu_mask(bi) == otsu_oracle(bi));
  }
}

TEST_CASE("otsu is invariant to shifting and positive scaling") {
  RandomStream rng(7);
  std::vector<double> bi(128);
  for (auto& v : bi) v = rng.next_normal();
  const auto base = otsu_mask(bi);
  auto shifted = bi;
  for (auto& v : shifted) v += 123.0;
  CHECK(otsu_mask(shifted) == base);
  auto scaled = bi;
  for (auto& v : scaled) v *= 42.0;
  CHECK(otsu_mask(scaled) == base);
}

TEST_CASE("otsu retains everything when the input is constant") {
  std::vector<double> bi(16, 3.0);
  CHECK(otsu_mask(bi) == BitVec(16, 1));
}

TEST_CASE("standardize identities") {
  std::vector<double> values{1.0, 2.0, 3.0, 4.0};
  std::vector<double> mean{1.0, 2.0, 3.0, 4.0};
  std::vector<double> sd{1.0, 1.0, 1.0, 1.0};
  BitVec mask{1, 1, 1, 1};
  const auto zero = standardize(values, mask, mean, sd);
  for (double v : zero) CHECK(v == 0.0);

  std::vector<double> zero_mean(4, 0.0);
  const auto identity = standardize(values, mask, zero_mean, sd);
  CHECK(identity == values);

  BitVec partial{0, 1, 0, 1};
  const auto masked = standardize(values, partial, zero_mean, sd);
  CHECK(masked == std::vector<double>{2.0, 4.0});

  BitVec bad{1, 1};
  CHECK_THROWS_AS(standardize(values, bad, mean, sd), std::invalid_argument);
}

TEST_CASE("standardized population has zero mean and unit spread") {
  RandomStream rng(8);
  const std::size_t dims = 8, n = 6000;
  std::vector<double> mean(dims), sd(dims);
  for (std::size_t i = 0; i < dims; ++i) {
    mean[i] = rng.next_normal() * 5.0;
    sd[i] = 0.5 + rng.next_unit() * 3.0;
  }
  BitVec mask(dims, 1);
  std::vector<double> acc(dims, 0.0), acc_sq(dims, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> v(dims);
    for (std::size_t i = 0; i < dims; ++i) v[i] = mean[i] + sd[i] * rng.next_normal();
    const auto x = standardize(v, mask, mean, sd);
    for (std::size_t i = 0; i < dims; ++i) {
      acc[i] += x[i];
      acc_sq[i] += x[i] * x[i];
    }
  }
  for (std::size_t i = 0; i < dims; ++i) {
    const double m = acc[i] / n;
    const double v = acc_sq[i] / n - m * m;
    CHECK(std::abs(m) < 0.05);
    CHECK(std::sqrt(v) == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("projection boundary: a zero vector maps to all ones") {
  std::vector<double> x(16, 0.0);
  const auto key = project_and_binarize(x, 99, 127);
  CHECK(key.length() == 127);
  for (auto b : key.bits) CHECK(b == 1);
}

TEST_CASE("projection is deterministic and sign-antisymmetric") {
  RandomStream rng(9);
  std::vector<double> x(40);
  for (auto& v : x) v = rng.next_normal();
  const auto a = project_and_binarize(x, 1234, 255);
  const auto b = project_and_binarize(x, 1234, 255);
  CHECK(a.bits == b.bits);
  const auto c = project_and_binarize(x, 1235, 255);
  CHECK(a.bits != c.bits);

  auto negated = x;
  for (auto& v : negated) v = -v;
  const auto d = project_and_binarize(negated, 1234, 255);
  for (std::size_t i = 0; i < a.length(); ++i) CHECK(d.bits[i] == 1 - a.bits[i]);
}

TEST_CASE("projected bits are balanced over random inputs") {
  RandomStream rng(10);
  double ones = 0.0, total = 0.0;
  for (int it = 0; it < 200; ++it) {
    std::vector<double> x(32);
    for (auto& v : x) v = rng.next_normal();
    const auto key = project_and_binarize(x, derive_seed(10, it), 255);
    ones += static_cast<double>(popcount_bits(key.bits));
    total += 255.0;
  }
  CHECK(ones / total == doctest::Approx(0.5).epsilon(0.1));  // 0.5 +/- 0.05
}

TEST_CASE("helper data serialization round-trips bit-exactly") {
  RandomStream rng(11);
  HelperData h;
  h.mask.resize(256);
  for (auto& b : h.mask) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
  if (popcount_bits(h.mask) == 0) h.mask[0] = 1;
  h.projection_seed = 0xdeadbeefcafef00dULL;
  h.key_length = 255;
  const std::size_t retained = popcount_bits(h.mask);
  for (std::size_t i = 0; i < retained; ++i) {
    h.mean.push_back(static_cast<float>(rng.next_normal()));
    h.stddev.push_back(static_cast<float>(0.01 + rng.next_unit()));
  }
  h.config_hash = features::FeatureConfig{}.hash();

  const auto bytes = h.serialize();
  CHECK(bytes[0] == 'E');
  CHECK(bytes[1] == 'I');
  CHECK(bytes[2] == 'D');
  CHECK(bytes[3] == 'H');
  const auto back = HelperData::deserialize(bytes);
  CHECK(back.mask == h.mask);
  CHECK(back.projection_seed == h.projection_seed);
  CHECK(back.key_length == h.key_length);
  CHECK(back.mean == h.mean);
  CHECK(back.stddev == h.stddev);
  CHECK(back.config_hash == h.config_hash);
  CHECK(back.serialize() == bytes);

  // Corrupted inputs are rejected.
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(HelperData::deserialize(bad), std::invalid_argument);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(HelperData::deserialize(truncated), std::invalid_argument);
}
