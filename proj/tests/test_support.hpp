#pragma once

// Shared helpers for building small in-memory populations in tests.

#include <vector>

#include "earid/features.hpp"
#include "earid/keygen.hpp"
#include "earid/synth.hpp"

namespace earid::testing {

struct MiniWorld {
  synth::Excitation excitation;
  std::vector<synth::SubjectProfile> profiles;
  std::vector<std::vector<synth::EcsScan>> scans;  // [subject][trial], h filled in
};

inline MiniWorld make_world(int n_subjects, int scans_per_subject, std::uint64_t seed,
                            double duration = 0.25, double wear_jitter = 1.0) {
  MiniWorld w;
  w.excitation = synth::gen_excitation(synth::ExcitationKind::Chirp, 48000.0, duration, 20.0,
                                       20000.0, derive_seed(seed, 0x45));
  for (int s = 0; s < n_subjects; ++s) {
    w.profiles.push_back(synth::synth_subject(seed, static_cast<std::uint32_t>(s)));
    std::vector<synth::EcsScan> scans;
    for (int t = 0; t < scans_per_subject; ++t) {
      RandomStream rng(derive_seed(seed, static_cast<std::uint64_t>(s),
                                   static_cast<std::uint64_t>(t), 0x4a));
      auto scan = synth::simulate_scan(w.profiles.back(), w.excitation,
                                       synth::NoiseCondition::Quiet, wear_jitter, rng);
      scan.trial_index = t;
      scan.impulse_response = synth::estimate_channel(w.excitation.samples, scan.recorded);
      scans.push_back(std::move(scan));
    }
    w.scans.push_back(std::move(scans));
  }
  return w;
}

// Population stats over every scan of the given subjects (single-scan
// features), excluding none unless the caller filters the index list.
inline keygen::PopulationStats stats_from(const MiniWorld& w,
                                          const std::vector<std::size_t>& subjects,
                                          const features::FeatureConfig& cfg) {
  std::vector<features::CepstrumFeature> gallery;
  for (std::size_t s : subjects) {
    for (const auto& scan : w.scans[s]) {
      gallery.push_back(features::extract_features({scan}, cfg));
    }
  }
  return keygen::compute_population_stats(gallery, cfg);
}

}  // namespace earid::testing
