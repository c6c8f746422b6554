#include "earid/keygen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "earid/rng.hpp"

namespace earid::keygen {

namespace {

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void append_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((bits >> (8 * i)) & 0xff));
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t& at) {
  const std::uint16_t v = static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
  at += 2;
  return v;
}

std::uint64_t read_u64(std::span<const std::uint8_t> b, std::size_t& at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[at + i]) << (8 * i);
  at += 8;
  return v;
}

float read_f32(std::span<const std::uint8_t> b, std::size_t& at) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  at += 4;
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

std::vector<double> estimate_distribution(std::span<const double> samples,
                                          const HistogramBins& bins) {
  if (samples.empty()) throw std::invalid_argument("estimate_distribution: no samples");
  if (bins.count < 2) throw std::invalid_argument("estimate_distribution: need >= 2 bins");
  std::vector<double> hist(static_cast<std::size_t>(bins.count), 0.0);
  for (double v : samples) {
    auto idx = static_cast<long>(std::floor((v - bins.lo) / bins.width));
    idx = std::clamp(idx, 0L, static_cast<long>(bins.count - 1));
    hist[static_cast<std::size_t>(idx)] += 1.0;
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (auto& h : hist) h *= inv;
  return hist;
}

std::vector<double> laplace_smooth(std::span<const double> hist, double epsilon) {
  std::vector<double> out(hist.begin(), hist.end());
  const double denom = 1.0 + static_cast<double>(hist.size()) * epsilon;
  for (auto& q : out) q = (q + epsilon) / denom;
  return out;
}

double biometric_information(std::span<const double> p, std::span<const double> q,
                             double alpha) {
  if (p.size() != q.size()) throw std::invalid_argument("biometric_information: support mismatch");
  if (alpha < 0.0) throw std::invalid_argument("biometric_information: alpha must be >= 0");

  if (alpha == 0.0) {
    double mass = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) mass += q[i];
    }
    if (mass <= 0.0) throw std::domain_error("biometric_information: empty support");
    return -std::log2(mass);
  }
  if (alpha == 1.0) {  // KL limit
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0.0) kl += p[i] * std::log2(p[i] / q[i]);
    }
    return kl;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      sum += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
    }
    // p == 0 contributes 0 for alpha in (0,1); for alpha > 1 the term is
    // zero as well since p^alpha = 0 dominates.
  }
  return std::log2(sum) / (alpha - 1.0);
}

BitVec otsu_mask(std::span<const double> bi_values) {
  const std::size_t d = bi_values.size();
  if (d < 2) throw std::invalid_argument("otsu_mask: need at least 2 dimensions");

  const auto [mn_it, mx_it] = std::minmax_element(bi_values.begin(), bi_values.end());
  const double mn = *mn_it, mx = *mx_it;
  if (mx <= mn) {
    std::fprintf(stderr, "earid: otsu_mask on constant input; retaining all dimensions\n");
    return BitVec(d, 1);
  }

  constexpr int kLevels = 256;
  const double width = (mx - mn) / kLevels;
  std::vector<long long> hist(kLevels, 0);
  auto level_of = [&](double v) {
    auto lvl = static_cast<long>(std::floor((v - mn) / width));
    return static_cast<int>(std::clamp(lvl, 0L, static_cast<long>(kLevels - 1)));
  };
  for (double v : bi_values) ++hist[static_cast<std::size_t>(level_of(v))];

  long long total_sum = 0;
  for (int t = 0; t < kLevels; ++t) total_sum += hist[static_cast<std::size_t>(t)] * t;
  const long long total_w = static_cast<long long>(d);

  // Between-class variance w0*w1*(mu0-mu1)^2 = (sum0*w1 - sum1*w0)^2/(w0*w1),
  // compared exactly with integer cross products so ties break to the lowest
  // threshold deterministically.
  using i128 = __int128;
  i128 best_num = -1;
  long long best_den = 1;
  int best_t = 0;
  long long w0 = 0, sum0 = 0;
  for (int t = 0; t < kLevels; ++t) {
    w0 += hist[static_cast<std::size_t>(t)];
    sum0 += hist[static_cast<std::size_t>(t)] * t;
    const long long w1 = total_w - w0;
    if (w0 == 0 || w1 == 0) continue;
    const long long delta = sum0 * w1 - (total_sum - sum0) * w0;
    const i128 num = static_cast<i128>(delta) * delta;
    const long long den = w0 * w1;
    if (num * best_den > best_num * den) {
      best_num = num;
      best_den = den;
      best_t = t;
    }
  }

  BitVec mask(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    mask[i] = level_of(bi_values[i]) > best_t ? 1 : 0;
  }
  return mask;
}

std::vector<double> standardize(std::span<const double> values, std::span<const std::uint8_t> mask,
                                std::span<const double> mean, std::span<const double> stddev) {
  if (values.size() != mask.size() || values.size() != mean.size() ||
      values.size() != stddev.size()) {
    throw std::invalid_argument("standardize: dimension mismatch");
  }
  std::vector<double> x;
  x.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!mask[i]) continue;
    x.push_back((values[i] - mean[i]) / std::max(stddev[i], kStdFloor));
  }
  return x;
}

BiometricKey project_and_binarize(std::span<const double> x, std::uint64_t projection_seed,
                                  std::size_t key_length) {
  if (x.empty()) throw std::invalid_argument("project_and_binarize: empty feature vector");
  const std::size_t d = x.size();
  const std::uint64_t stream = derive_seed(projection_seed, key_length, d, /*label=*/0x52);
  BiometricKey key;
  key.bits.resize(key_length);
  for (std::size_t i = 0; i < key_length; ++i) {
    double y = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      y += inverse_normal_cdf(unit_from_bits(u64_at(stream, i * d + j))) * x[j];
    }
    key.bits[i] = y >= 0.0 ? 1 : 0;
  }
  return key;
}

PopulationStats compute_population_stats(const std::vector<features::CepstrumFeature>& gallery,
                                         const features::FeatureConfig& cfg, int n_bins) {
  if (gallery.empty()) throw std::invalid_argument("compute_population_stats: empty gallery");
  const std::size_t d = gallery.front().coefficients.size();
  for (const auto& f : gallery) {
    if (f.coefficients.size() != d) {
      throw std::invalid_argument("compute_population_stats: inconsistent dimensions");
    }
  }
  PopulationStats stats;
  stats.feature_hash = cfg.hash();
  stats.mean.assign(d, 0.0);
  stats.stddev.assign(d, 0.0);
  const double inv_n = 1.0 / static_cast<double>(gallery.size());
  for (const auto& f : gallery) {
    for (std::size_t i = 0; i < d; ++i) stats.mean[i] += f.coefficients[i];
  }
  for (auto& m : stats.mean) m *= inv_n;
  for (const auto& f : gallery) {
    for (std::size_t i = 0; i < d; ++i) {
      const double delta = f.coefficients[i] - stats.mean[i];
      stats.stddev[i] += delta * delta;
    }
  }
  for (auto& s : stats.stddev) s = std::max(std::sqrt(s * inv_n), kStdFloor);

  stats.bins.resize(d);
  stats.q_hist.resize(d);
  std::vector<double> column(gallery.size());
  for (std::size_t i = 0; i < d; ++i) {
    HistogramBins& b = stats.bins[i];
    b.count = n_bins;
    b.lo = stats.mean[i] - 4.0 * stats.stddev[i];
    b.width = 8.0 * stats.stddev[i] / static_cast<double>(n_bins);
    for (std::size_t g = 0; g < gallery.size(); ++g) column[g] = gallery[g].coefficients[i];
    stats.q_hist[i] = laplace_smooth(estimate_distribution(column, b));
  }
  return stats;
}

std::vector<std::uint8_t> HelperData::serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(32 + mask.size() / 8 + mean.size() * 8);
  out.push_back('E');
  out.push_back('I');
  out.push_back('D');
  out.push_back('H');
  out.push_back(1);  // version
  append_u16(out, key_length);
  append_u16(out, static_cast<std::uint16_t>(mask.size()));
  const auto packed = pack_bits_lsb(mask);
  out.insert(out.end(), packed.begin(), packed.end());
  append_u64(out, projection_seed);
  for (std::size_t i = 0; i < mean.size(); ++i) {
    append_f32(out, mean[i]);
    append_f32(out, stddev[i]);
  }
  append_u64(out, config_hash);
  return out;
}

HelperData HelperData::deserialize(std::span<const std::uint8_t> bytes) {
  auto fail = [](const char* why) -> HelperData {
    throw std::invalid_argument(std::string("HelperData::deserialize: ") + why);
  };
  if (bytes.size() < 9) return fail("truncated header");
  if (!(bytes[0] == 'E' && bytes[1] == 'I' && bytes[2] == 'D' && bytes[3] == 'H')) {
    return fail("bad magic");
  }
  if (bytes[4] != 1) return fail("unsupported version");
  std::size_t at = 5;
  HelperData h;
  h.key_length = read_u16(bytes, at);
  if (h.key_length != 127 && h.key_length != 255 && h.key_length != 511) {
    return fail("key length not in {127, 255, 511}");
  }
  const std::uint16_t d = read_u16(bytes, at);
  const std::size_t mask_bytes = (static_cast<std::size_t>(d) + 7) / 8;
  if (bytes.size() < at + mask_bytes + 8) return fail("truncated mask");
  h.mask = unpack_bits_lsb(bytes.subspan(at, mask_bytes), d);
  at += mask_bytes;
  h.projection_seed = read_u64(bytes, at);
  const std::size_t retained = popcount_bits(h.mask);
  if (retained == 0) return fail("empty mask");
  if (bytes.size() != at + retained * 8 + 8) return fail("unexpected size");
  h.mean.resize(retained);
  h.stddev.resize(retained);
  for (std::size_t i = 0; i < retained; ++i) {
    h.mean[i] = read_f32(bytes, at);
    h.stddev[i] = read_f32(bytes, at);
  }
  h.config_hash = read_u64(bytes, at);
  return h;
}

BiometricKey key_from_feature(const features::CepstrumFeature& feature, const HelperData& helper) {
  if (feature.coefficients.size() != helper.mask.size()) {
    throw std::invalid_argument("key_from_feature: feature dimension mismatch");
  }
  std::vector<double> x;
  x.reserve(helper.mean.size());
  std::size_t r = 0;
  for (std::size_t i = 0; i < helper.mask.size(); ++i) {
    if (!helper.mask[i]) continue;
    const double mean = helper.mean[r];
    const double sd = std::max<double>(helper.stddev[r], kStdFloor);
    x.push_back((feature.coefficients[i] - mean) / sd);
    ++r;
  }
  return project_and_binarize(x, helper.projection_seed, helper.key_length);
}

EnrollResult enroll_from_features(const std::vector<features::CepstrumFeature>& per_scan,
                                  const features::CepstrumFeature& aggregate,
                                  const PopulationStats& stats, const EnrollOptions& opts,
                                  const features::FeatureConfig& cfg) {
  if (per_scan.size() < 2) {
    throw std::invalid_argument("enroll: need at least 2 enrollment scans");
  }
  if (stats.dims() != cfg.dims) throw std::invalid_argument("enroll: stats dimension mismatch");
  if (stats.feature_hash != cfg.hash()) {
    throw std::invalid_argument("enroll: population stats built with a different feature config");
  }
  if (opts.key_length != 127 && opts.key_length != 255 && opts.key_length != 511) {
    throw std::invalid_argument("enroll: key length must be one of 127/255/511");
  }
  const std::size_t d = cfg.dims;
  for (const auto& f : per_scan) {
    if (f.coefficients.size() != d) throw std::invalid_argument("enroll: feature dim mismatch");
  }

  // Per-dimension user distribution P against the gallery's bins, then the
  // divergence from the smoothed population histogram.
  EnrollResult result;
  result.bio_info.resize(d);
  std::vector<double> column(per_scan.size());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t s = 0; s < per_scan.size(); ++s) column[s] = per_scan[s].coefficients[i];
    const auto p = estimate_distribution(column, stats.bins[i]);
    result.bio_info[i] = biometric_information(p, stats.q_hist[i], opts.renyi_alpha);
  }

  HelperData helper;
  helper.mask = otsu_mask(result.bio_info);
  helper.projection_seed = opts.projection_seed;
  helper.key_length = static_cast<std::uint16_t>(opts.key_length);
  helper.config_hash = cfg.hash();
  for (std::size_t i = 0; i < d; ++i) {
    if (!helper.mask[i]) continue;
    helper.mean.push_back(static_cast<float>(stats.mean[i]));
    helper.stddev.push_back(static_cast<float>(stats.stddev[i]));
  }

  result.key = key_from_feature(aggregate, helper);
  result.helper = std::move(helper);
  return result;
}

EnrollResult enroll(const std::vector<synth::EcsScan>& enroll_scans, const PopulationStats& stats,
                    const EnrollOptions& opts, const features::FeatureConfig& cfg) {
  if (enroll_scans.size() < 2) {
    throw std::invalid_argument("enroll: need at least 2 enrollment scans");
  }
  std::vector<features::CepstrumFeature> per_scan;
  per_scan.reserve(enroll_scans.size());
  for (const auto& scan : enroll_scans) {
    per_scan.push_back(features::extract_features({scan}, cfg));
  }
  const auto aggregate = features::extract_features(enroll_scans, cfg);
  return enroll_from_features(per_scan, aggregate, stats, opts, cfg);
}

BiometricKey extract_key(const std::vector<synth::EcsScan>& auth_scans, const HelperData& helper,
                         const features::FeatureConfig& cfg) {
  if (helper.config_hash != cfg.hash()) {
    throw std::invalid_argument("extract_key: helper data built with a different feature config");
  }
  const auto feature = features::extract_features(auth_scans, cfg);
  return key_from_feature(feature, helper);
}

}  // namespace earid::keygen
