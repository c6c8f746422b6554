#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "earid/fft.hpp"
#include "earid/synth.hpp"

using namespace earid;
using namespace earid::synth;

namespace {

// Circular autocorrelation oracle, O(n^2) on a decimated lag set.
double mls_sidelobe_ratio(const std::vector<double>& s) {
  const std::size_t n = s.size();
  double lag0 = 0.0;
  for (double v : s) lag0 += v * v;
  double worst = 0.0;
  for (std::size_t lag = 1; lag < n; lag += 97) {  // sampled lags keep this O(n^2/97)
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += s[t] * s[(t + lag) % n];
    worst = std::max(worst, std::abs(acc));
  }
  return worst / lag0;
}

// Direct time-domain convolution oracle.
std::vector<double> direct_convolve(const std::vector<double>& a, const std::vector<double>& b,
                                    std::size_t out_len) {
  std::vector<double> out(out_len, 0.0);
  for (std::size_t n = 0; n < out_len; ++n) {
    for (std::size_t j = 0; j < b.size() && j <= n; ++j) out[n] += a[n - j] * b[j];
  }
  return out;
}

double band_energy(const std::vector<double>& x, double f_lo, double f_hi, double fs) {
  const std::size_t n = next_pow2(x.size());
  const auto spec = rfft(x, n);
  double e = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f >= f_lo && f <= f_hi) e += std::norm(spec[k]);
  }
  return e;
}

double highband_correlation(const std::vector<double>& a, const std::vector<double>& b,
                            double f_lo, double fs) {
  const std::size_t n = next_pow2(a.size());
  const auto sa = rfft(a, n);
  const auto sb = rfft(b, n);
  double num = 0.0, ea = 0.0, eb = 0.0;
  for (std::size_t k = 0; k < sa.size(); ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f < f_lo) continue;
    num += (sa[k] * std::conj(sb[k])).real();
    ea += std::norm(sa[k]);
    eb += std::norm(sb[k]);
  }
  return num / std::sqrt(ea * eb);
}

}  // namespace

TEST_CASE("chirp excitation covers the sweep") {
  const auto exc = gen_excitation(ExcitationKind::Chirp, 48000, 1.0, 20, 20000);
  CHECK(exc.samples.size() == 48000);
  for (double v : exc.samples) CHECK(std::abs(v) <= 1.0);

  // Instantaneous frequency from zero-crossing spacing rises monotonically
  // between windows at the start, middle and end of the sweep.
  auto local_freq = [&](std::size_t center) {
    int crossings = 0;
    const std::size_t half = 2000;
    for (std::size_t i = center - half; i + 1 < center + half; ++i) {
      if ((exc.samples[i] <= 0 && exc.samples[i + 1] > 0)) ++crossings;
    }
    return static_cast<double>(crossings) * 48000.0 / (2.0 * half);
  };
  const double f_start = local_freq(2500);
  const double f_mid = local_freq(24000);
  const double f_end = local_freq(45000);
  CHECK(f_start < f_mid);
  CHECK(f_mid < f_end);
  CHECK(f_mid == doctest::Approx(10010.0).epsilon(0.05));
}

TEST_CASE("chirp frequency bounds are validated") {
  CHECK_THROWS_AS(gen_excitation(ExcitationKind::Chirp, 48000, 1.0, 0.0, 20000),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_excitation(ExcitationKind::Chirp, 48000, 1.0, 100, 25000),
                  std::invalid_argument);
  CHECK_THROWS_AS(gen_excitation(ExcitationKind::Chirp, 48000, 0.0, 20, 20000),
                  std::invalid_argument);
}

TEST_CASE("mls is deterministic, binary, and white") {
  const auto a = gen_excitation(ExcitationKind::Mls, 48000, 1.0, 0, 0, /*seed=*/7);
  const auto b = gen_excitation(ExcitationKind::Mls, 48000, 1.0, 0, 0, /*seed=*/7);
  CHECK(a.samples == b.samples);
  const auto c = gen_excitation(ExcitationKind::Mls, 48000, 1.0, 0, 0, /*seed=*/8);
  CHECK(a.samples != c.samples);
  std::set<double> values(a.samples.begin(), a.samples.end());
  CHECK(values == std::set<double>{-1.0, 1.0});
  CHECK(mls_sidelobe_ratio(a.samples) < 0.05);
}

TEST_CASE("subjects are deterministic with independent path sets") {
  const auto a = synth_subject(1, 0);
  const auto b = synth_subject(1, 0);
  CHECK(a.subject_id == b.subject_id);
  REQUIRE(a.paths.size() == b.paths.size());
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    CHECK(a.paths[i].delay_s == b.paths[i].delay_s);
    CHECK(a.paths[i].gain == b.paths[i].gain);
  }
  const auto c = synth_subject(1, 1);
  CHECK(a.paths.front().delay_s != c.paths.front().delay_s);
}

TEST_CASE("a 44-subject population satisfies the profile invariants") {
  std::set<std::string> ids;
  for (std::uint32_t i = 0; i < 44; ++i) {
    const auto p = synth_subject(2024, i);
    ids.insert(p.subject_id);
    CHECK(p.paths.size() >= 3);
    CHECK(p.paths.size() <= 64);
    double max_gain = 0.0;
    for (const auto& tap : p.paths) {
      CHECK(tap.delay_s > 0.0);
      CHECK(tap.delay_s < kMaxTimeOfFlight);
      max_gain = std::max(max_gain, std::abs(tap.gain));
    }
    // Direct path (smallest delay) carries the largest gain.
    CHECK(std::abs(p.paths.front().gain) == doctest::Approx(max_gain));
    for (std::size_t j = 1; j < p.paths.size(); ++j) {
      CHECK(p.paths[j - 1].delay_s <= p.paths[j].delay_s);
    }
  }
  CHECK(ids.size() == 44);
}

TEST_CASE("noiseless zero-jitter scan is the exact convolution") {
  const auto profile = synth_subject(5, 3);
  const auto exc = gen_excitation(ExcitationKind::Chirp, 48000, 0.25, 20, 20000);
  RandomStream rng(1);
  const auto scan = simulate_scan(profile, exc, NoiseCondition::None, 0.0, rng);
  REQUIRE(scan.recorded.size() == exc.samples.size());

  RandomStream unused(1);
  const auto response = render_response(profile, 0.0, unused);
  const auto want = direct_convolve(exc.samples, response, exc.samples.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    CHECK(scan.recorded[i] == doctest::Approx(want[i]).epsilon(1e-8));
  }
}

TEST_CASE("noiseless responses are identical across trials at zero jitter") {
  const auto profile = synth_subject(5, 7);
  RandomStream r1(11), r2(22);
  const auto a = render_response(profile, 0.0, r1);
  const auto b = render_response(profile, 0.0, r2);
  CHECK(a == b);
}

TEST_CASE("street noise strictly exceeds quiet noise below 2 kHz") {
  const auto profile = synth_subject(5, 1);
  const auto exc = gen_excitation(ExcitationKind::Chirp, 48000, 0.5, 20, 20000);
  // Same stream seed: identical jitter and white-noise draws, scaled only.
  RandomStream rng_q(77), rng_s(77);
  const auto quiet = simulate_scan(profile, exc, NoiseCondition::Quiet, 1.0, rng_q);
  const auto street = simulate_scan(profile, exc, NoiseCondition::Street, 1.0, rng_s);
  const double eq = band_energy(quiet.recorded, 0, 2000, 48000);
  const double es = band_energy(street.recorded, 0, 2000, 48000);
  CHECK(es > eq);
}

TEST_CASE("repeat scans with jitter stay correlated above 2 kHz") {
  const auto exc = gen_excitation(ExcitationKind::Chirp, 48000, 1.0, 20, 20000);
  for (std::uint32_t subject = 0; subject < 4; ++subject) {
    const auto profile = synth_subject(9, subject);
    RandomStream r1(derive_seed(9, subject, 1)), r2(derive_seed(9, subject, 2));
    const auto s1 = simulate_scan(profile, exc, NoiseCondition::Quiet, 1.0, r1);
    const auto s2 = simulate_scan(profile, exc, NoiseCondition::Quiet, 1.0, r2);
    const auto h1 = estimate_channel(exc.samples, s1.recorded);
    const auto h2 = estimate_channel(exc.samples, s2.recorded);
    CHECK(highband_correlation(h1, h2, 2000.0, 48000.0) > 0.9);
  }
}

TEST_CASE("estimate_channel identities") {
  // Unit impulse excitation: h(n) == r(n) up to normalization.
  std::vector<double> s(2048, 0.0);
  s[0] = 1.0;
  std::vector<double> r(2048);
  RandomStream rng(3);
  for (auto& v : r) v = rng.next_normal();
  const auto h = estimate_channel(s, r, 256);
  double peak = 0.0;
  for (std::size_t i = 0; i < 256; ++i) peak = std::max(peak, std::abs(r[i]));
  for (std::size_t i = 0; i < 256; ++i) {
    CHECK(h[i] == doctest::Approx(r[i] / peak).epsilon(1e-9));
  }
}

TEST_CASE("mls loopback compresses to a peak at lag zero") {
  const auto exc = gen_excitation(ExcitationKind::Mls, 48000, 1.0, 0, 0, 7);
  const auto h = estimate_channel(exc.samples, exc.samples, 1024);
  CHECK(std::abs(h[0]) == doctest::Approx(1.0));
  for (std::size_t i = 1; i < h.size(); ++i) CHECK(std::abs(h[i]) < 0.05);
}

TEST_CASE("delayed copies recover the delay exactly for every lag") {
  // Exhaustive over a reduced window so the whole lag range is covered.
  const std::size_t window = 256;
  const auto exc = gen_excitation(ExcitationKind::Mls, 48000, 4096.0 / 48000.0, 0, 0, 5);
  for (std::size_t delay = 0; delay < window; ++delay) {
    std::vector<double> r(exc.samples.size(), 0.0);
    for (std::size_t t = delay; t < r.size(); ++t) r[t] = exc.samples[t - delay];
    const auto h = estimate_channel(exc.samples, r, window);
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < h.size(); ++i) {
      if (std::abs(h[i]) > std::abs(h[argmax])) argmax = i;
    }
    CHECK(argmax == delay);
  }
}

TEST_CASE("estimate_channel rejects degenerate input") {
  std::vector<double> zeros(100, 0.0), r(100, 1.0);
  CHECK_THROWS_AS(estimate_channel(zeros, r, 16), std::invalid_argument);
  std::vector<double> short_r(50, 1.0);
  std::vector<double> s(100, 1.0);
  CHECK_THROWS_AS(estimate_channel(s, short_r, 16), std::invalid_argument);
}
