#include "earid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "earid/fft.hpp"

namespace earid::synth {

namespace {

constexpr double kPi = std::numbers::pi;

// Degree-16 maximal-length Galois LFSR (x^16 + x^14 + x^13 + x^11 + 1),
// period 65535 >= one second at 48 kHz.
constexpr std::uint16_t kLfsrTaps = 0xB400u;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

// Hann-windowed sinc kernel of half width 8, evaluated at offset x from the
// tap center. Smooth in the fractional delay, which keeps the jitter-to-BER
// mapping continuous.
constexpr int kKernelHalfWidth = 8;

double tap_kernel(double x) {
  if (std::abs(x) >= kKernelHalfWidth) return 0.0;
  const double w = 0.5 * (1.0 + std::cos(kPi * x / kKernelHalfWidth));
  return sinc(x) * w;
}

}  // namespace

const char* to_string(ExcitationKind k) {
  return k == ExcitationKind::Mls ? "mls" : "chirp";
}

const char* to_string(NoiseCondition c) {
  switch (c) {
    case NoiseCondition::None: return "none";
    case NoiseCondition::Quiet: return "quiet";
    case NoiseCondition::Indoor: return "indoor";
    case NoiseCondition::Street: return "street";
  }
  return "?";
}

const char* to_string(AttackKind a) {
  switch (a) {
    case AttackKind::Genuine: return "genuine";
    case AttackKind::Synthetic: return "synthetic";
    case AttackKind::Universal: return "universal";
    case AttackKind::FalseTrigger: return "false_trigger";
  }
  return "?";
}

ExcitationKind excitation_kind_from_string(const std::string& s) {
  if (s == "mls") return ExcitationKind::Mls;
  if (s == "chirp") return ExcitationKind::Chirp;
  throw std::invalid_argument("unknown excitation kind: " + s);
}

NoiseCondition noise_condition_from_string(const std::string& s) {
  if (s == "none") return NoiseCondition::None;
  if (s == "quiet") return NoiseCondition::Quiet;
  if (s == "indoor") return NoiseCondition::Indoor;
  if (s == "street") return NoiseCondition::Street;
  throw std::invalid_argument("unknown noise condition: " + s);
}

AttackKind attack_kind_from_string(const std::string& s) {
  if (s == "genuine") return AttackKind::Genuine;
  if (s == "synthetic") return AttackKind::Synthetic;
  if (s == "universal") return AttackKind::Universal;
  if (s == "false_trigger") return AttackKind::FalseTrigger;
  throw std::invalid_argument("unknown attack kind: " + s);
}

Excitation gen_excitation(ExcitationKind kind, double sample_rate, double duration,
                          double f_start, double f_end, std::uint64_t seed) {
  if (duration <= 0.0) throw std::invalid_argument("gen_excitation: duration must be > 0");
  if (sample_rate <= 0.0) throw std::invalid_argument("gen_excitation: bad sample rate");
  const auto length = static_cast<std::size_t>(std::llround(sample_rate * duration));

  Excitation exc;
  exc.kind = kind;
  exc.sample_rate = sample_rate;
  exc.duration = duration;
  exc.samples.resize(length);

  if (kind == ExcitationKind::Chirp) {
    if (!(f_start > 0.0 && f_start < f_end && f_end <= sample_rate / 2.0)) {
      throw std::invalid_argument("gen_excitation: need 0 < f_start < f_end <= fs/2");
    }
    const double rate = (f_end - f_start) / (2.0 * duration);
    for (std::size_t i = 0; i < length; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      exc.samples[i] = std::sin(2.0 * kPi * (f_start * t + rate * t * t));
    }
  } else {
    std::uint16_t state = static_cast<std::uint16_t>(mix64(seed) % 65535u + 1u);  // nonzero
    for (std::size_t i = 0; i < length; ++i) {
      const std::uint16_t bit = state & 1u;
      state >>= 1;
      if (bit) state ^= kLfsrTaps;
      exc.samples[i] = bit ? 1.0 : -1.0;
    }
  }
  return exc;
}

std::vector<double> device_coloration_curve(std::size_t window, double sample_rate) {
  std::vector<double> g(window / 2 + 1);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(window);
    const double hp = (f * f) / (f * f + 120.0 * 120.0);
    const double lp = 1.0 / (1.0 + std::pow(f / 15000.0, 4.0));
    const double ripple =
        1.0 + 0.15 * std::sin(2.0 * kPi * f / 6000.0) + 0.10 * std::sin(2.0 * kPi * f / 2300.0 + 1.3);
    g[k] = hp * lp * ripple;
  }
  return g;
}

SubjectProfile synth_subject(std::uint64_t population_seed, std::uint32_t subject_index) {
  SubjectProfile p;
  p.seed = derive_seed(population_seed, subject_index, /*label=*/0x53);
  {
    char buf[16];
    std::snprintf(buf, sizeof buf, "s%03u", subject_index);
    p.subject_id = buf;
  }

  // Canonical echo-delay slots shared by the whole cohort (anatomy is
  // similar across people); individuality lives in the per-subject gains,
  // signs, and delay offsets. Fully personal delay sets would give every
  // subject private quefrency peaks, making the population feature
  // distributions heavy-tailed and starving the divergence histograms.
  constexpr int kEchoSlots = 14;
  RandomStream anatomy(derive_seed(population_seed, /*label=*/0x534c));
  std::vector<double> slots(kEchoSlots);
  for (auto& s : slots) s = 8.0e-4 + anatomy.next_unit() * (9.5e-3 - 8.0e-4);
  std::sort(slots.begin(), slots.end());

  RandomStream rng(p.seed);
  const double direct_delay = 1.0e-4 + rng.next_unit() * 4.0e-4;
  p.paths.push_back({direct_delay, 1.0});
  constexpr double kDecayTau = 2.5e-3;
  constexpr double kSlotOffsetSigma = 1.5e-4;

  // Each subject strongly expresses a sparse subset of the shared slots and
  // barely the rest. Every slot is prominent for a fair share of the cohort,
  // so the population histograms keep populated shoulders where an
  // individual is atypical instead of running empty.
  const std::size_t n_strong = 5 + rng.next_below(3);
  std::vector<std::size_t> slot_order(slots.size());
  for (std::size_t i = 0; i < slot_order.size(); ++i) slot_order[i] = i;
  for (std::size_t i = slot_order.size(); i > 1; --i) {
    std::swap(slot_order[i - 1], slot_order[rng.next_below(i)]);
  }
  std::vector<bool> strong(slots.size(), false);
  for (std::size_t i = 0; i < n_strong; ++i) strong[slot_order[i]] = true;

  for (std::size_t k = 0; k < slots.size(); ++k) {
    double delay = slots[k] + kSlotOffsetSigma * rng.next_normal();
    delay = std::clamp(delay, direct_delay + 1.0e-4, kMaxTimeOfFlight * 0.99);
    const double amp =
        strong[k] ? 0.45 + 0.45 * rng.next_unit() : 0.05 + 0.13 * rng.next_unit();
    const double sign = rng.next_unit() < 0.5 ? -1.0 : 1.0;
    p.paths.push_back({delay, sign * amp * std::exp(-(delay - direct_delay) / kDecayTau)});
  }
  // Weak diffuse scatter tail, fully personal.
  constexpr int kDiffusePaths = 16;
  for (int i = 0; i < kDiffusePaths; ++i) {
    const double delay =
        direct_delay + rng.next_unit() * (kMaxTimeOfFlight * 0.99 - direct_delay);
    const double amp = 0.05 + 0.10 * rng.next_unit();
    const double sign = rng.next_unit() < 0.5 ? -1.0 : 1.0;
    p.paths.push_back({delay, sign * amp * std::exp(-(delay - direct_delay) / kDecayTau)});
  }
  // The direct reflection dominates the echo tail in a short occluded canal:
  // budget the total echo magnitude below the direct gain. This bounds |H|
  // away from zero, so log-magnitude features stay light-tailed instead of
  // blowing up on interference nulls.
  const double echo_budget = 0.50 + 0.20 * rng.next_unit();
  double echo_sum = 0.0;
  for (std::size_t i = 1; i < p.paths.size(); ++i) echo_sum += std::abs(p.paths[i].gain);
  if (echo_sum > 0.0) {
    const double rescale = echo_budget / echo_sum;
    for (std::size_t i = 1; i < p.paths.size(); ++i) p.paths[i].gain *= rescale;
  }
  std::sort(p.paths.begin(), p.paths.end(),
            [](const PathTap& a, const PathTap& b) { return a.delay_s < b.delay_s; });
  p.device_coloration = device_coloration_curve();
  return p;
}

std::vector<double> render_response(const SubjectProfile& profile, double wear_jitter,
                                    RandomStream& rng, std::size_t window) {
  if (wear_jitter < 0.0) throw std::invalid_argument("render_response: wear_jitter must be >= 0");
  std::vector<double> ir(window, 0.0);
  const double fs = kDefaultSampleRate;
  for (const PathTap& tap : profile.paths) {
    double delay = tap.delay_s;
    double gain = tap.gain;
    if (wear_jitter > 0.0) {
      delay += wear_jitter * kDelayJitterSigma * rng.next_normal();
      // Lognormal gain wobble: symmetric in the log-magnitude domain the
      // features live in, and never collapses a tap through zero.
      gain *= std::exp(wear_jitter * kGainJitterSigma * rng.next_normal());
    }
    const double pos = std::max(delay, 0.0) * fs;
    const auto lo = static_cast<long>(std::ceil(pos - kKernelHalfWidth));
    const auto hi = static_cast<long>(std::floor(pos + kKernelHalfWidth));
    for (long n = std::max(lo, 0L); n <= hi && n < static_cast<long>(window); ++n) {
      ir[static_cast<std::size_t>(n)] += gain * tap_kernel(static_cast<double>(n) - pos);
    }
  }
  if (!profile.device_coloration.empty()) {
    if (profile.device_coloration.size() != window / 2 + 1) {
      throw std::invalid_argument("render_response: coloration grid mismatch");
    }
    auto spec = rfft(ir, window);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= profile.device_coloration[k];
    ir = irfft(spec, window);
  }
  return ir;
}

double noise_sigma(NoiseCondition c) {
  // Relative in-ear levels: quiet room ~35 dBA-equivalent, indoor ~60,
  // street ~70, mapped against a 90 dBA reference excitation level.
  switch (c) {
    case NoiseCondition::None: return 0.0;
    case NoiseCondition::Quiet: return std::pow(10.0, (35.0 - 90.0) / 20.0);
    case NoiseCondition::Indoor: return std::pow(10.0, (60.0 - 90.0) / 20.0);
    case NoiseCondition::Street: return std::pow(10.0, (70.0 - 90.0) / 20.0);
  }
  return 0.0;
}

std::vector<double> shaped_noise(std::size_t length, double sigma, double sample_rate,
                                 RandomStream& rng) {
  if (sigma <= 0.0 || length == 0) return std::vector<double>(length, 0.0);
  const std::size_t n = next_pow2(length);
  std::vector<double> white(n);
  for (auto& w : white) w = rng.next_normal();
  auto spec = rfft(white, n);
  // Occlusion-effect shape: pink-ish in-body rumble concentrated well below
  // 2 kHz, rolling off steeply before the authentication band starts so the
  // finite-window leakage skirt stays far under the canal response.
  double gain_sq_sum = 0.0;
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = static_cast<double>(k) * sample_rate / static_cast<double>(n);
    double g;
    if (f <= 700.0) {
      g = std::sqrt(2000.0 / std::max(f, 30.0));
    } else if (f <= 2000.0) {
      g = std::sqrt(2000.0 / 700.0) * std::pow(700.0 / f, 4.0);
    } else {
      g = 1.0e-4 * (2000.0 / f) * (2000.0 / f);
    }
    spec[k] *= g;
    const double weight = (k == 0 || k == n / 2) ? 1.0 : 2.0;
    gain_sq_sum += weight * g * g;
  }
  const double rms_gain = std::sqrt(gain_sq_sum / static_cast<double>(n));
  auto shaped = irfft(spec, n);
  shaped.resize(length);
  const double scale = sigma / rms_gain;
  for (auto& v : shaped) v *= scale;
  // Raised-cosine ramps at both ends; a hard cut would leak the strong
  // low-band content across the whole spectrum of the snippet.
  const std::size_t ramp = std::min<std::size_t>(256, length / 8);
  for (std::size_t i = 0; i < ramp; ++i) {
    const double w = 0.5 * (1.0 - std::cos(kPi * static_cast<double>(i) / ramp));
    shaped[i] *= w;
    shaped[length - 1 - i] *= w;
  }
  return shaped;
}

EcsScan simulate_scan(const SubjectProfile& profile, const Excitation& excitation,
                      NoiseCondition condition, double wear_jitter, RandomStream& rng) {
  EcsScan scan;
  scan.subject_id = profile.subject_id;
  scan.excitation_kind = excitation.kind;
  scan.noise_condition = condition;

  const auto response = render_response(profile, wear_jitter, rng);
  scan.recorded = fft_convolve(excitation.samples, response, excitation.samples.size());
  if (condition != NoiseCondition::None) {
    double exc_sq = 0.0;
    for (double s : excitation.samples) exc_sq += s * s;
    const double ref_rms = std::sqrt(exc_sq / static_cast<double>(excitation.samples.size()));
    const auto noise =
        shaped_noise(scan.recorded.size(), noise_sigma(condition) * ref_rms,
                     excitation.sample_rate, rng);
    for (std::size_t i = 0; i < scan.recorded.size(); ++i) scan.recorded[i] += noise[i];
  }
  return scan;
}

EcsScan simulate_scan_from_response(std::span<const double> response, const Excitation& excitation,
                                    NoiseCondition condition, RandomStream& rng,
                                    const std::string& subject_id) {
  EcsScan scan;
  scan.subject_id = subject_id;
  scan.excitation_kind = excitation.kind;
  scan.noise_condition = condition;
  scan.recorded = fft_convolve(excitation.samples, response, excitation.samples.size());
  if (condition != NoiseCondition::None) {
    double exc_sq = 0.0;
    for (double s : excitation.samples) exc_sq += s * s;
    const double ref_rms = std::sqrt(exc_sq / static_cast<double>(excitation.samples.size()));
    const auto noise =
        shaped_noise(scan.recorded.size(), noise_sigma(condition) * ref_rms,
                     excitation.sample_rate, rng);
    for (std::size_t i = 0; i < scan.recorded.size(); ++i) scan.recorded[i] += noise[i];
  }
  return scan;
}

std::vector<double> estimate_channel(std::span<const double> excitation,
                                     std::span<const double> recorded, std::size_t window) {
  if (excitation.size() != recorded.size()) {
    throw std::invalid_argument("estimate_channel: waveform lengths differ");
  }
  bool any = false;
  for (double s : excitation) {
    if (s != 0.0) {
      any = true;
      break;
    }
  }
  if (!any) throw std::invalid_argument("estimate_channel: all-zero excitation");

  auto h = fft_cross_correlate(excitation, recorded, window);
  double peak = 0.0;
  for (double v : h) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (auto& v : h) v /= peak;
  }
  return h;
}

}  // namespace earid::synth
