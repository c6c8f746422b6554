#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "earid/synth.hpp"

namespace earid::features {

struct FeatureConfig {
  double sample_rate = synth::kDefaultSampleRate;
  std::size_t n_fft = 1024;
  double f_low = 2000.0;
  double f_high = 8000.0;
  double max_tof = synth::kMaxTimeOfFlight;
  std::size_t dims = 256;  // hard output length of the liftered cepstrum

  // Band edges snapped to the FFT grid, round half up.
  std::size_t bin_low() const;
  std::size_t bin_high() const;

  // Stable 64-bit hash of every parameter above; embedded in helper data so
  // both parties can detect a configuration mismatch.
  std::uint64_t hash() const;
};

// Magnitudes over the retained band bins [bin_low, bin_high]; unit band
// energy after normalize_spectrum.
struct SpectrumFeature {
  std::vector<double> magnitudes;
  std::size_t bin_low = 0;
  std::size_t bin_high = 0;
  std::size_t n_fft = 0;
  double sample_rate = 0.0;
};

struct CepstrumFeature {
  std::vector<double> coefficients;
  double max_tof = 0.0;
};

// Zero-phase band-pass: hard mask on the n-point FFT grid of h, bins outside
// [f_low, f_high] zeroed, back to the time domain. h.size() must be a power
// of two (it is the FFT size).
std::vector<double> bandpass(std::span<const double> h, const FeatureConfig& cfg);

// Multi-trial aggregation: sums the per-trial band magnitudes and divides by
// the square root of the aggregate band energy, so the result always has
// unit band energy. Trials must be band-passed responses of equal length.
SpectrumFeature normalize_spectrum(const std::vector<std::vector<double>>& trials,
                                   const FeatureConfig& cfg);

// Full cepstrum: orthonormal DCT-II of the log magnitude over the complete
// rfft grid, with out-of-band bins at zero. Zero magnitudes are clamped to
// 1e-12 before the log.
std::vector<double> cepstrum(const SpectrumFeature& spec);

inline constexpr double kLogFloor = 1e-12;

// Time-of-flight liftering: keeps coefficients whose quefrency is within
// max_tof, capped at cfg.dims. If the cutoff exceeds the available
// coefficients everything is kept and a warning is printed.
CepstrumFeature lifter(std::span<const double> c, const FeatureConfig& cfg);

// bandpass -> normalize_spectrum (K = scans.size()) -> cepstrum -> lifter.
CepstrumFeature extract_features(const std::vector<synth::EcsScan>& scans,
                                 const FeatureConfig& cfg);

// Same pipeline on bare impulse responses (datasets store only h).
CepstrumFeature extract_features_from_responses(
    const std::vector<std::vector<double>>& responses, const FeatureConfig& cfg);

// Band magnitudes |rfft(bandpass(h))| over the retained bins; the cacheable
// per-scan half of the pipeline.
std::vector<double> band_magnitudes(std::span<const double> h, const FeatureConfig& cfg);

// Eq-style aggregation over precomputed band magnitudes.
SpectrumFeature aggregate_band_magnitudes(const std::vector<std::span<const double>>& mags,
                                          const FeatureConfig& cfg);

}  // namespace earid::features
