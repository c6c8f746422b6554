#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "earid/rng.hpp"

namespace earid::synth {

inline constexpr double kDefaultSampleRate = 48000.0;
inline constexpr std::size_t kResponseWindow = 1024;
inline constexpr double kMaxTimeOfFlight = 0.010;  // liftering bound, seconds

// Per-unit wear jitter applied by simulate_scan; the wear_jitter argument
// scales both. Calibrated so that two-scan authentication against an
// eight-scan enrollment lands near a 5% key bit error mode at jitter 1.0.
inline constexpr double kDelayJitterSigma = 2.0e-6;  // seconds per tap
inline constexpr double kGainJitterSigma = 0.20;     // relative per tap

enum class ExcitationKind : std::uint8_t { Mls, Chirp };

enum class NoiseCondition : std::uint8_t { None, Quiet, Indoor, Street };

enum class AttackKind : std::uint8_t { Genuine, Synthetic, Universal, FalseTrigger };

const char* to_string(ExcitationKind k);
const char* to_string(NoiseCondition c);
const char* to_string(AttackKind a);
ExcitationKind excitation_kind_from_string(const std::string& s);
NoiseCondition noise_condition_from_string(const std::string& s);
AttackKind attack_kind_from_string(const std::string& s);

struct Excitation {
  ExcitationKind kind = ExcitationKind::Chirp;
  double sample_rate = kDefaultSampleRate;
  double duration = 1.0;
  std::vector<double> samples;  // values in [-1, 1]
};

// MLS comes from a maximal-length Galois LFSR (degree 16, period 65535),
// truncated to the requested length; chirp is a linear sweep f_start..f_end.
Excitation gen_excitation(ExcitationKind kind, double sample_rate = kDefaultSampleRate,
                          double duration = 1.0, double f_start = 20.0,
                          double f_end = 20000.0, std::uint64_t seed = 1);

struct PathTap {
  double delay_s = 0.0;
  double gain = 0.0;
};

// Parametric multipath model of one synthetic ear canal; the ground truth
// behind every simulated scan.
struct SubjectProfile {
  std::string subject_id;
  std::vector<PathTap> paths;              // sorted by delay, direct path first
  std::vector<double> device_coloration;   // gain per rfft bin of the window
  std::uint64_t seed = 0;
};

// Deterministic in (population_seed, subject_index); distinct indices give
// independent path sets.
SubjectProfile synth_subject(std::uint64_t population_seed, std::uint32_t subject_index);

// Shared earbud hardware response over the window's rfft grid.
std::vector<double> device_coloration_curve(std::size_t window = kResponseWindow,
                                            double sample_rate = kDefaultSampleRate);

struct EcsScan {
  std::string subject_id;
  ExcitationKind excitation_kind = ExcitationKind::Chirp;
  std::vector<double> recorded;          // r(t), same length as the excitation
  std::vector<double> impulse_response;  // h(n), kResponseWindow samples
  NoiseCondition noise_condition = NoiseCondition::None;
  AttackKind attack_kind = AttackKind::Genuine;
  int trial_index = 0;
};

// Ground-truth in-ear response for one insertion: jittered taps rendered as
// windowed-sinc kernels, then shaped by the profile's coloration curve.
std::vector<double> render_response(const SubjectProfile& profile, double wear_jitter,
                                    RandomStream& rng, std::size_t window = kResponseWindow);

// Ambient + in-body noise: pink-shaped below 2 kHz, nothing meaningful
// above. Returns samples with RMS sigma relative to unit signal level.
std::vector<double> shaped_noise(std::size_t length, double sigma, double sample_rate,
                                 RandomStream& rng);

// Relative noise RMS for a condition (input levels per Table-style dBA).
double noise_sigma(NoiseCondition c);

// recorded = excitation * jittered response (+ shaped noise). Only the
// recorded waveform is filled in; estimate_channel produces h.
EcsScan simulate_scan(const SubjectProfile& profile, const Excitation& excitation,
                      NoiseCondition condition, double wear_jitter, RandomStream& rng);

// Same wire-in, but driven by an explicit impulse response instead of a tap
// profile (used for rendered attack corpora such as the universal profile).
EcsScan simulate_scan_from_response(std::span<const double> response, const Excitation& excitation,
                                    NoiseCondition condition, RandomStream& rng,
                                    const std::string& subject_id);

// h(n) = sum_t s(t) r(t+n) over n in [0, window); peak |h| normalized to 1.
// Throws if the excitation is all zero or lengths differ.
std::vector<double> estimate_channel(std::span<const double> excitation,
                                     std::span<const double> recorded,
                                     std::size_t window = kResponseWindow);

}  // namespace earid::synth
