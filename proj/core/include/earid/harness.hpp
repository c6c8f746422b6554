#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "earid/dataset.hpp"
#include "earid/keygen.hpp"

namespace earid::harness {

double bit_error_rate(const keygen::BiometricKey& a, const keygen::BiometricKey& b);

struct RatePoint {
  int threshold = 0;  // accepted bit errors
  double frr = 0.0;
  double far = 0.0;
};

struct SweepResult {
  std::vector<RatePoint> curve;  // thresholds 0..L
  double eer = 0.0;
  double eer_threshold = 0.0;  // fractional crossing point in bits
};

// FRR/FAR against every integer threshold, with the EER at the linear
// interpolation of the crossing between adjacent integer thresholds.
SweepResult sweep_rates(const std::vector<double>& genuine_bers,
                        const std::vector<double>& impostor_bers, std::size_t key_length);

struct ErrorRates {
  double frr = 0.0;
  double far = 0.0;
  double eer = 0.0;
  double bac = 0.0;  // always (2 - far - frr) / 2
  int threshold_bits = 0;
};

struct EvalConfig {
  std::string ecc_name = "bch255";
  int trials = 20;
  std::uint64_t grouping_seed = 7;
  int gallery_size = 30;             // scaled down proportionally when needed
  int scans_per_attempt = 2;
  int passive_attempts_per_pair = 2;
};

struct TrialRates {
  double frr = 0.0;
  double far = 0.0;
  double bac = 0.0;
};

struct EvalReport {
  std::string ecc_name;
  int trials = 0;
  ErrorRates rates;                   // mean operating-point rates
  std::vector<TrialRates> per_trial;
  SweepResult sweep;                  // over the pooled BER distributions
  std::vector<double> genuine_bers;   // pooled across trials
  std::vector<double> impostor_bers;  // pooled passive-attack BERs
  double genuine_ber_mode = 0.0;      // histogram peak of the genuine cloud
  double key_bit_balance = 0.0;       // mean of key bits over enrolled keys
  double mean_inter_user_distance = 0.0;  // fraction of the key length
  std::uint64_t dataset_seed = 0;
  std::uint64_t grouping_seed = 0;
};

// Regroups the population `trials` times (30-gallery / remainder-enrolled at
// the full population size, proportional otherwise), enrolls the non-gallery
// users and drives genuine plus cross-user passive attempts through the full
// message protocol. Decisions are cross-checked against the raw Hamming
// threshold on every attempt.
EvalReport evaluate(const dataset::Dataset& ds, const EvalConfig& cfg,
                    const features::FeatureConfig& fcfg);

struct AttackCell {
  std::size_t successes = 0;
  std::size_t trials = 0;
  double rate() const { return trials == 0 ? 0.0 : static_cast<double>(successes) / trials; }
};

struct AttackReport {
  std::string ecc_name;
  AttackCell passive;        // P-ASR
  AttackCell synthetic;      // S-ASR
  AttackCell universal;      // U-ASR
  AttackCell key_guessing;   // K-ASR
  AttackCell false_trigger;  // FT acceptance rate
  std::uint64_t dataset_seed = 0;
  std::uint64_t grouping_seed = 0;
};

// Requires a dataset generated with attack corpora.
AttackReport attack_suite(const dataset::Dataset& ds, const EvalConfig& cfg,
                          const features::FeatureConfig& fcfg);

struct DriftConfig {
  std::string ecc_name = "bch255";
  int periods = 5;
  bool day_mode = true;     // false = session mode (no growth, noise cycling)
  double growth = 0.05;     // per-period wear-jitter growth in day mode
  int attempts_per_period = 5;
  int scans_per_attempt = 2;
  std::uint64_t seed = 11;
};

struct DriftPeriod {
  int period = 0;
  double genuine_min_bits = 0.0;
  double genuine_max_bits = 0.0;
  double genuine_mean_bits = 0.0;
  double passive_min_bits = 0.0;
  double passive_max_bits = 0.0;
  double frac_under_threshold = 0.0;
  std::vector<double> genuine_bits;
  std::vector<double> passive_bits;
};

struct DriftReport {
  std::string ecc_name;
  int threshold_bits = 0;
  bool day_mode = true;
  std::vector<DriftPeriod> periods;
};

// Resimulates fresh authentication scans per period against a fixed
// enrollment, with per-period jitter growth in day mode.
DriftReport drift_eval(const dataset::Dataset& ds, const DriftConfig& cfg,
                       const features::FeatureConfig& fcfg);

std::string to_json_string(const EvalReport& report, int indent = 2);
std::string to_json_string(const AttackReport& report, int indent = 2);
std::string to_json_string(const DriftReport& report, int indent = 2);

}  // namespace earid::harness
