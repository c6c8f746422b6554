#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "earid/dct.hpp"
#include "earid/features.hpp"
#include "earid/fft.hpp"
#include "earid/rng.hpp"

using namespace earid;
using namespace earid::features;

namespace {

const FeatureConfig kCfg;  // defaults: 48 kHz, 1024-point FFT, 2-8 kHz, 256 dims

std::vector<double> tone(double freq, std::size_t n, double fs, bool hann) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(i) / fs);
    if (hann) {
      v *= 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                 static_cast<double>(n - 1)));
    }
    x[i] = v;
  }
  return x;
}

double energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

double band_energy_of(const std::vector<double>& x, const FeatureConfig& cfg) {
  const auto spec = rfft(x, cfg.n_fft);
  double e = 0.0;
  for (std::size_t k = cfg.bin_low(); k <= cfg.bin_high(); ++k) e += std::norm(spec[k]);
  return e;
}

std::vector<double> random_response(RandomStream& rng, std::size_t n = 1024) {
  std::vector<double> h(n);
  for (auto& v : h) v = rng.next_normal();
  return h;
}

}  // namespace

TEST_CASE("band edges snap to the expected bins") {
  CHECK(kCfg.bin_low() == 43);    // 2000 / 46.875 = 42.67 -> 43
  CHECK(kCfg.bin_high() == 171);  // 8000 / 46.875 = 170.67 -> 171
}

TEST_CASE("bandpass suppresses a 1 kHz tone by 60 dB") {
  const auto x = tone(1000.0, 1024, 48000.0, /*hann=*/true);
  const auto y = bandpass(x, kCfg);
  CHECK(energy(y) / energy(x) < 1e-3);
}

TEST_CASE("bandpass passes a 4 kHz tone") {
  const auto x = tone(4000.0, 1024, 48000.0, /*hann=*/false);
  const auto y = bandpass(x, kCfg);
  CHECK(energy(y) / energy(x) > 0.99);
}

TEST_CASE("bandpass keeps the right share of white noise") {
  // Averaged over draws: out/in energy equals the retained bandwidth share.
  RandomStream rng(17);
  double ratio_sum = 0.0;
  const int draws = 200;
  for (int i = 0; i < draws; ++i) {
    const auto x = random_response(rng);
    ratio_sum += energy(bandpass(x, kCfg)) / energy(x);
  }
  const double expected =
      static_cast<double>(kCfg.bin_high() - kCfg.bin_low() + 1) * 2.0 / 1024.0;
  CHECK(ratio_sum / draws == doctest::Approx(expected).epsilon(0.05));
}

TEST_CASE("bandpass validates edges") {
  FeatureConfig bad = kCfg;
  bad.f_low = 9000.0;
  std::vector<double> x(1024, 1.0);
  CHECK_THROWS_AS(bandpass(x, bad), std::invalid_argument);
}

TEST_CASE("normalize_spectrum yields unit band energy") {
  RandomStream rng(18);
  const auto h = bandpass(random_response(rng), kCfg);
  const auto spec = normalize_spectrum({h}, kCfg);
  double e = 0.0;
  for (double m : spec.magnitudes) e += m * m;
  CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("duplicated trials change nothing") {
  RandomStream rng(19);
  const auto h = bandpass(random_response(rng), kCfg);
  const auto one = normalize_spectrum({h}, kCfg);
  const auto two = normalize_spectrum({h, h}, kCfg);
  REQUIRE(one.magnitudes.size() == two.magnitudes.size());
  for (std::size_t i = 0; i < one.magnitudes.size(); ++i) {
    CHECK(two.magnitudes[i] == doctest::Approx(one.magnitudes[i]).epsilon(1e-12));
  }
}

TEST_CASE("normalize_spectrum is scale invariant") {
  RandomStream rng(20);
  const auto h = bandpass(random_response(rng), kCfg);
  auto scaled = h;
  for (auto& v : scaled) v *= 10.0;
  const auto a = normalize_spectrum({h}, kCfg);
  const auto b = normalize_spectrum({scaled}, kCfg);
  for (std::size_t i = 0; i < a.magnitudes.size(); ++i) {
    CHECK(b.magnitudes[i] == doctest::Approx(a.magnitudes[i]).epsilon(1e-9));
  }
}

TEST_CASE("normalize_spectrum rejects an all-zero aggregate") {
  std::vector<double> zeros(1024, 0.0);
  CHECK_THROWS_AS(normalize_spectrum({zeros}, kCfg), std::domain_error);
}

TEST_CASE("cepstrum of a flat band spectrum is a pure zeroth coefficient plus floor structure") {
  // A genuinely flat full-grid spectrum: all 513 bins at the same magnitude.
  SpectrumFeature spec;
  spec.n_fft = 1024;
  spec.sample_rate = 48000.0;
  spec.bin_low = 0;
  spec.bin_high = 512;
  spec.magnitudes.assign(513, 0.125);
  const auto c = cepstrum(spec);
  CHECK(c[0] == doctest::Approx(std::log(0.125) * std::sqrt(513.0)).epsilon(1e-12));
  for (std::size_t j = 1; j < c.size(); ++j) CHECK(std::abs(c[j]) < 1e-9);
}

TEST_CASE("forward DCT of the cepstrum recovers the log magnitudes") {
  RandomStream rng(21);
  SpectrumFeature spec;
  spec.n_fft = 1024;
  spec.sample_rate = 48000.0;
  spec.bin_low = 0;
  spec.bin_high = 512;
  spec.magnitudes.resize(513);
  for (auto& m : spec.magnitudes) m = 0.01 + rng.next_unit();  // strictly positive
  const auto c = cepstrum(spec);
  const DctPlan plan(513);
  const auto log_back = plan.inverse(c);
  for (std::size_t k = 0; k < 513; ++k) {
    CHECK(std::exp(log_back[k]) == doctest::Approx(spec.magnitudes[k]).epsilon(1e-6));
  }
}

TEST_CASE("a log-spectrum equal to one basis vector gives one coefficient") {
  const DctPlan plan(513);
  const auto row = plan.basis_row(37);
  SpectrumFeature spec;
  spec.n_fft = 1024;
  spec.sample_rate = 48000.0;
  spec.bin_low = 0;
  spec.bin_high = 512;
  spec.magnitudes.resize(513);
  for (std::size_t k = 0; k < 513; ++k) spec.magnitudes[k] = std::exp(row[k]);
  const auto c = cepstrum(spec);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (j == 37) {
      CHECK(c[j] == doctest::Approx(1.0).epsilon(1e-9));
    } else {
      CHECK(std::abs(c[j]) < 1e-9);
    }
  }
}

TEST_CASE("cepstrum clamps zero bins instead of failing") {
  SpectrumFeature spec;
  spec.n_fft = 1024;
  spec.sample_rate = 48000.0;
  spec.bin_low = 43;
  spec.bin_high = 171;
  spec.magnitudes.assign(129, 0.0);
  spec.magnitudes[5] = 1.0;
  const auto c = cepstrum(spec);
  for (double v : c) CHECK(std::isfinite(v));
}

TEST_CASE("lifter keeps 256 coefficients under the default config") {
  RandomStream rng(22);
  std::vector<double> c(513);
  for (auto& v : c) v = rng.next_normal();
  const auto f = lifter(c, kCfg);
  CHECK(f.coefficients.size() == 256);
  for (std::size_t i = 0; i < 256; ++i) CHECK(f.coefficients[i] == c[i]);
}

TEST_CASE("an effectively infinite max_tof keeps everything") {
  RandomStream rng(23);
  std::vector<double> c(513);
  for (auto& v : c) v = rng.next_normal();
  FeatureConfig cfg = kCfg;
  cfg.max_tof = 10.0;   // far beyond the available quefrency range
  cfg.dims = 100000;    // cap above the coefficient count
  const auto f = lifter(c, cfg);
  CHECK(f.coefficients.size() == c.size());
}

TEST_CASE("liftering is a projection: discarded-range noise changes nothing") {
  RandomStream rng(24);
  SpectrumFeature spec;
  spec.n_fft = 1024;
  spec.sample_rate = 48000.0;
  spec.bin_low = 0;
  spec.bin_high = 512;
  spec.magnitudes.resize(513);
  for (auto& m : spec.magnitudes) m = 0.01 + rng.next_unit();

  const auto base = lifter(cepstrum(spec), kCfg);

  // Perturb the log spectrum with components living entirely above the
  // retained quefrency range.
  const DctPlan plan(513);
  auto perturbed = spec;
  for (std::size_t j = 300; j < 500; j += 17) {
    const auto row = plan.basis_row(j);
    for (std::size_t k = 0; k < 513; ++k) {
      perturbed.magnitudes[k] *= std::exp(0.5 * row[k]);
    }
  }
  const auto shifted = lifter(cepstrum(perturbed), kCfg);
  REQUIRE(shifted.coefficients.size() == base.coefficients.size());
  for (std::size_t i = 0; i < base.coefficients.size(); ++i) {
    CHECK(shifted.coefficients[i] == doctest::Approx(base.coefficients[i]).epsilon(1e-9));
  }
}

TEST_CASE("extract_features output length and aggregation identities") {
  RandomStream rng(25);
  std::vector<std::vector<double>> eight;
  for (int i = 0; i < 8; ++i) eight.push_back(random_response(rng));
  const auto f8 = extract_features_from_responses(eight, kCfg);
  CHECK(f8.coefficients.size() == 256);

  std::vector<std::vector<double>> two(eight.begin(), eight.begin() + 2);
  const auto f2 = extract_features_from_responses(two, kCfg);
  CHECK(f2.coefficients.size() == 256);

  // K identical copies == K = 1.
  const auto single = extract_features_from_responses({eight[0]}, kCfg);
  const auto triple = extract_features_from_responses({eight[0], eight[0], eight[0]}, kCfg);
  for (std::size_t i = 0; i < 256; ++i) {
    CHECK(triple.coefficients[i] == doctest::Approx(single.coefficients[i]).epsilon(1e-12));
  }
}

TEST_CASE("feature extraction is scale invariant") {
  RandomStream rng(26);
  std::vector<std::vector<double>> scans;
  for (int i = 0; i < 3; ++i) scans.push_back(random_response(rng));
  auto scaled = scans;
  for (auto& h : scaled) {
    for (auto& v : h) v *= 37.5;
  }
  const auto a = extract_features_from_responses(scans, kCfg);
  const auto b = extract_features_from_responses(scaled, kCfg);
  // Unit-energy normalization inside Eq-style aggregation forces equality on
  // every coefficient, including the zeroth.
  for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
    CHECK(b.coefficients[i] == doctest::Approx(a.coefficients[i]).epsilon(1e-9));
  }
}

TEST_CASE("noise strictly below the passband does not move the features") {
  RandomStream rng(27);
  const auto h = random_response(rng);
  const auto base = extract_features_from_responses({h}, kCfg);

  // Noise supported on grid bins below bin_low (strictly below f_low).
  auto noisy = h;
  for (std::size_t bin : {3u, 10u, 20u, 30u, 42u}) {
    const double f = static_cast<double>(bin) * 48000.0 / 1024.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      noisy[i] += 0.8 * std::cos(2.0 * std::numbers::pi * f * static_cast<double>(i) / 48000.0 +
                                 static_cast<double>(bin));
    }
  }
  const auto shifted = extract_features_from_responses({noisy}, kCfg);
  for (std::size_t i = 0; i < base.coefficients.size(); ++i) {
    CHECK(std::abs(shifted.coefficients[i] - base.coefficients[i]) < 1e-6);
  }
}

TEST_CASE("band magnitude cache path equals the literal composition") {
  RandomStream rng(28);
  std::vector<std::vector<double>> scans;
  for (int i = 0; i < 4; ++i) scans.push_back(random_response(rng));
  std::vector<std::vector<double>> mags;
  for (const auto& h : scans) mags.push_back(band_magnitudes(h, kCfg));
  std::vector<std::span<const double>> views(mags.begin(), mags.end());
  const auto lifted = lifter(cepstrum(aggregate_band_magnitudes(views, kCfg)), kCfg);
  const auto direct = extract_features_from_responses(scans, kCfg);
  CHECK(lifted.coefficients == direct.coefficients);  // bitwise identical
}
