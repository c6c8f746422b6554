#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "earid/features.hpp"
#include "earid/synth.hpp"

namespace earid::dataset {

struct DatasetConfig {
  int n_subjects = 44;
  int scans_per_subject = 40;
  int enroll_scans = 8;  // remainder is the authentication split
  std::uint64_t seed = 20240101;
  synth::ExcitationKind excitation = synth::ExcitationKind::Chirp;
  double excitation_duration = 1.0;
  double chirp_f_start = 20.0;
  double chirp_f_end = 20000.0;
  double sample_rate = synth::kDefaultSampleRate;
  double wear_jitter = 1.0;
  bool attacks = false;
  int attack_scans = 40;  // per attack family
};

struct ScanRecord {
  std::string subject_id;
  int trial = 0;
  synth::NoiseCondition noise = synth::NoiseCondition::Quiet;
  synth::AttackKind attack = synth::AttackKind::Genuine;
  std::string path;  // relative to the dataset root
};

struct Dataset {
  DatasetConfig config;
  std::vector<synth::SubjectProfile> subjects;         // genuine population
  std::vector<synth::SubjectProfile> attack_profiles;  // silicon + false-trigger
  std::vector<ScanRecord> scans;
  std::filesystem::path root;

  // Indices into `scans` for one subject, ordered by trial.
  std::vector<std::size_t> scans_of(const std::string& subject_id,
                                    synth::AttackKind kind = synth::AttackKind::Genuine) const;
  std::vector<std::size_t> scans_with_attack(synth::AttackKind kind) const;
};

// Noise schedule baked into generated datasets: enrollment trials are quiet,
// authentication trials cycle quiet / indoor / street.
synth::NoiseCondition scheduled_noise(const DatasetConfig& cfg, int trial);

// Generates the synthetic population (plus attack corpora when configured),
// writes manifest.json and one .f32 impulse-response file per scan under
// out_dir, and returns the in-memory index. Byte-identical for a fixed
// config.
Dataset gen_population(const DatasetConfig& cfg, const std::filesystem::path& out_dir);

Dataset load_dataset(const std::filesystem::path& dir);

// Impulse response of one scan (little-endian f32 on disk, widened).
std::vector<double> load_scan(const Dataset& ds, const ScanRecord& record);

// The excitation waveform a dataset was generated with.
synth::Excitation dataset_excitation(const DatasetConfig& cfg);

}  // namespace earid::dataset
