#include "earid/features.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "earid/dct.hpp"
#include "earid/fft.hpp"

namespace earid::features {

namespace {

std::size_t snap_bin(double f, double sample_rate, std::size_t n_fft) {
  const double df = sample_rate / static_cast<double>(n_fft);
  return static_cast<std::size_t>(std::floor(f / df + 0.5));  // round half up
}

const DctPlan& plan_for(std::size_t n) {
  static std::mutex mu;
  static std::unordered_map<std::size_t, std::unique_ptr<DctPlan>> plans;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = plans[n];
  if (!slot) slot = std::make_unique<DctPlan>(n);
  return *slot;
}

void validate_band(const FeatureConfig& cfg) {
  if (!(cfg.f_low >= 0.0 && cfg.f_low < cfg.f_high && cfg.f_high <= cfg.sample_rate / 2.0)) {
    throw std::invalid_argument("FeatureConfig: need 0 <= f_low < f_high <= fs/2");
  }
}

}  // namespace

std::size_t FeatureConfig::bin_low() const { return snap_bin(f_low, sample_rate, n_fft); }
std::size_t FeatureConfig::bin_high() const { return snap_bin(f_high, sample_rate, n_fft); }

std::uint64_t FeatureConfig::hash() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "earid.feature.v1|%.17g|%zu|%.17g|%.17g|%.17g|%zu",
                sample_rate, n_fft, f_low, f_high, max_tof, dims);
  // FNV-1a 64
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<std::uint8_t>(*p);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> bandpass(std::span<const double> h, const FeatureConfig& cfg) {
  validate_band(cfg);
  const std::size_t n = h.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("bandpass: response length must be a power of two");
  }
  FeatureConfig c = cfg;
  c.n_fft = n;
  const std::size_t lo = c.bin_low();
  const std::size_t hi = c.bin_high();
  auto spec = rfft(h, n);
  for (std::size_t k = 0; k < spec.size(); ++k) {
    if (k < lo || k > hi) spec[k] = {0.0, 0.0};
  }
  return irfft(spec, n);
}

SpectrumFeature normalize_spectrum(const std::vector<std::vector<double>>& trials,
                                   const FeatureConfig& cfg) {
  validate_band(cfg);
  if (trials.empty()) throw std::invalid_argument("normalize_spectrum: need K >= 1 trials");
  const std::size_t n = cfg.n_fft;
  for (const auto& t : trials) {
    if (t.size() != trials.front().size()) {
      throw std::invalid_argument("normalize_spectrum: trials have unequal lengths");
    }
  }
  const std::size_t lo = cfg.bin_low();
  const std::size_t hi = cfg.bin_high();

  SpectrumFeature out;
  out.bin_low = lo;
  out.bin_high = hi;
  out.n_fft = n;
  out.sample_rate = cfg.sample_rate;
  out.magnitudes.assign(hi - lo + 1, 0.0);

  for (const auto& trial : trials) {
    auto spec = rfft(trial, n);
    for (std::size_t k = lo; k <= hi; ++k) out.magnitudes[k - lo] += std::abs(spec[k]);
  }
  double energy = 0.0;
  for (double m : out.magnitudes) energy += m * m;
  if (energy <= 0.0) {
    throw std::domain_error("normalize_spectrum: degenerate all-zero aggregate");
  }
  const double inv = 1.0 / std::sqrt(energy);
  for (auto& m : out.magnitudes) m *= inv;
  return out;
}

std::vector<double> cepstrum(const SpectrumFeature& spec) {
  if (spec.n_fft == 0 || spec.magnitudes.empty()) {
    throw std::invalid_argument("cepstrum: empty spectrum");
  }
  const std::size_t full = spec.n_fft / 2 + 1;
  std::vector<double> log_mag(full, std::log(kLogFloor));
  for (std::size_t k = spec.bin_low; k <= spec.bin_high; ++k) {
    const double m = std::max(spec.magnitudes[k - spec.bin_low], kLogFloor);
    log_mag[k] = std::log(m);
  }
  return plan_for(full).forward(log_mag);
}

CepstrumFeature lifter(std::span<const double> c, const FeatureConfig& cfg) {
  if (cfg.max_tof <= 0.0) throw std::invalid_argument("lifter: max_tof must be > 0");
  const std::size_t m = c.size();
  // Quefrency of DCT index j over an m-point grid spanning [0, fs/2]:
  // tau_j = j / (2 * m * df) with df = fs / n_fft.
  const double df = cfg.sample_rate / static_cast<double>(cfg.n_fft);
  const double tau_scale = 2.0 * static_cast<double>(m) * df;
  auto implied = static_cast<std::size_t>(std::floor(cfg.max_tof * tau_scale)) + 1;
  std::size_t keep = std::min(implied, cfg.dims);
  if (keep > m) {
    std::fprintf(stderr, "earid: lifter cutoff %zu exceeds %zu available coefficients; keeping all\n",
                 keep, m);
    keep = m;
  }
  CepstrumFeature out;
  out.max_tof = cfg.max_tof;
  out.coefficients.assign(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(keep));
  for (double v : out.coefficients) {
    if (!std::isfinite(v)) throw std::domain_error("lifter: non-finite cepstrum coefficient");
  }
  return out;
}

CepstrumFeature extract_features_from_responses(
    const std::vector<std::vector<double>>& responses, const FeatureConfig& cfg) {
  if (responses.empty()) {
    throw std::invalid_argument("extract_features: need at least one scan");
  }
  std::vector<std::vector<double>> filtered;
  filtered.reserve(responses.size());
  for (const auto& h : responses) filtered.push_back(bandpass(h, cfg));
  const auto spec = normalize_spectrum(filtered, cfg);
  return lifter(cepstrum(spec), cfg);
}

CepstrumFeature extract_features(const std::vector<synth::EcsScan>& scans,
                                 const FeatureConfig& cfg) {
  std::vector<std::vector<double>> responses;
  responses.reserve(scans.size());
  for (const auto& s : scans) responses.push_back(s.impulse_response);
  return extract_features_from_responses(responses, cfg);
}

std::vector<double> band_magnitudes(std::span<const double> h, const FeatureConfig& cfg) {
  const auto filtered = bandpass(h, cfg);
  auto spec = rfft(filtered, cfg.n_fft);
  const std::size_t lo = cfg.bin_low();
  const std::size_t hi = cfg.bin_high();
  std::vector<double> mags(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) mags[k - lo] = std::abs(spec[k]);
  return mags;
}

SpectrumFeature aggregate_band_magnitudes(const std::vector<std::span<const double>>& mags,
                                          const FeatureConfig& cfg) {
  if (mags.empty()) throw std::invalid_argument("aggregate_band_magnitudes: need K >= 1");
  const std::size_t lo = cfg.bin_low();
  const std::size_t hi = cfg.bin_high();
  const std::size_t width = hi - lo + 1;
  SpectrumFeature out;
  out.bin_low = lo;
  out.bin_high = hi;
  out.n_fft = cfg.n_fft;
  out.sample_rate = cfg.sample_rate;
  out.magnitudes.assign(width, 0.0);
  for (const auto& m : mags) {
    if (m.size() != width) {
      throw std::invalid_argument("aggregate_band_magnitudes: width mismatch");
    }
    for (std::size_t i = 0; i < width; ++i) out.magnitudes[i] += m[i];
  }
  double energy = 0.0;
  for (double m : out.magnitudes) energy += m * m;
  if (energy <= 0.0) {
    throw std::domain_error("aggregate_band_magnitudes: degenerate all-zero aggregate");
  }
  const double inv = 1.0 / std::sqrt(energy);
  for (auto& m : out.magnitudes) m *= inv;
  return out;
}

}  // namespace earid::features
