#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "earid/bits.hpp"
#include "earid/features.hpp"

namespace earid::keygen {

inline constexpr int kHistogramBins = 32;
inline constexpr double kSmoothingEpsilon = 1e-6;
inline constexpr double kStdFloor = 1e-9;

// Uniform histogram support for one feature dimension.
struct HistogramBins {
  double lo = 0.0;
  double width = 1.0;
  int count = kHistogramBins;
};

// Gallery-level feature statistics: per-dimension mean/stddev plus the
// smoothed population histogram Q used by the biometric-information metric.
struct PopulationStats {
  std::vector<double> mean;
  std::vector<double> stddev;                // floored at kStdFloor
  std::vector<HistogramBins> bins;           // mean +/- 4 stddev, 32 bins
  std::vector<std::vector<double>> q_hist;   // smoothed, one per dimension
  std::uint64_t feature_hash = 0;

  std::size_t dims() const { return mean.size(); }
};

PopulationStats compute_population_stats(const std::vector<features::CepstrumFeature>& gallery,
                                         const features::FeatureConfig& cfg,
                                         int n_bins = kHistogramBins);

// Normalized histogram over the given bins; out-of-range samples clamp to
// the boundary bins. No smoothing (that is the Q-side treatment).
std::vector<double> estimate_distribution(std::span<const double> samples,
                                          const HistogramBins& bins);

// (q + eps) / (1 + count*eps) per bin.
std::vector<double> laplace_smooth(std::span<const double> hist,
                                   double epsilon = kSmoothingEpsilon);

// Renyi divergence D_alpha(P || Q) in bits. Q must have no zero bins
// (smooth it first). alpha = 0 uses the closed form
// -log2(sum of Q over the support of P); alpha = 1 is the KL limit.
double biometric_information(std::span<const double> p, std::span<const double> q,
                             double alpha);

// Otsu threshold over a 256-level quantization of the value range; the mask
// keeps dimensions strictly above the threshold. All-equal input keeps
// everything (with a warning). Returns one byte per dimension (0/1).
BitVec otsu_mask(std::span<const double> bi_values);

// z-scores the retained dimensions in ascending dimension order.
std::vector<double> standardize(std::span<const double> values, std::span<const std::uint8_t> mask,
                                std::span<const double> mean, std::span<const double> stddev);

struct BiometricKey {
  BitVec bits;
  std::size_t length() const { return bits.size(); }
};

// BioHashing: y = R x with R an L x d' matrix of standard-normal deviates
// generated from (projection_seed, L, d') via the counter-based stream and
// the fixed inverse normal CDF; bit i = (y_i >= 0). Entry (i, j) consumes
// stream value i*d'+j, so the matrix is identical in any implementation
// that follows this note.
BiometricKey project_and_binarize(std::span<const double> x, std::uint64_t projection_seed,
                                  std::size_t key_length);

// Non-secret per-user parameters shipped to the earbud side. Binary layout
// (little-endian): magic "EIDH", version u8, L u16, d u16, mask ceil(d/8)
// bytes LSB-first, projection_seed u64, d' pairs of (mean f32, std f32),
// config hash 8 bytes.
struct HelperData {
  BitVec mask;                    // d bits
  std::uint64_t projection_seed = 0;
  std::uint16_t key_length = 0;   // in {127, 255, 511}
  std::vector<float> mean;        // retained dimensions only, ascending
  std::vector<float> stddev;
  std::uint64_t config_hash = 0;

  std::vector<std::uint8_t> serialize() const;
  static HelperData deserialize(std::span<const std::uint8_t> bytes);
};

struct EnrollOptions {
  std::size_t key_length = 255;
  double renyi_alpha = 0.0;
  std::uint64_t projection_seed = 0;
};

struct EnrollResult {
  BiometricKey key;
  HelperData helper;
  std::vector<double> bio_info;  // per-dimension D_alpha, for diagnostics
};

// Mobile-side enrollment: per-scan features -> per-dimension P ->
// biometric information -> Otsu mask -> helper data; the enrolled key is
// extract_key over the full enrollment scan set. The gallery behind `stats`
// must exclude the enrolling user. Needs at least 2 scans.
EnrollResult enroll(const std::vector<synth::EcsScan>& enroll_scans, const PopulationStats& stats,
                    const EnrollOptions& opts, const features::FeatureConfig& cfg);

// Feature-level variant used by the enrollment protocol, where the mobile
// receives per-scan features plus the session aggregate rather than raw
// scans.
EnrollResult enroll_from_features(const std::vector<features::CepstrumFeature>& per_scan,
                                  const features::CepstrumFeature& aggregate,
                                  const PopulationStats& stats, const EnrollOptions& opts,
                                  const features::FeatureConfig& cfg);

// Earbud-side key regeneration; uses only helper data, no population set.
// Throws if the helper's config hash does not match cfg.
BiometricKey extract_key(const std::vector<synth::EcsScan>& auth_scans, const HelperData& helper,
                         const features::FeatureConfig& cfg);

// Same, starting from an already extracted feature vector.
BiometricKey key_from_feature(const features::CepstrumFeature& feature, const HelperData& helper);

}  // namespace earid::keygen
