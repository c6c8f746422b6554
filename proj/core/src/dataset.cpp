#include "earid/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "earid/dct.hpp"
#include "earid/fft.hpp"
#include "earid/keygen.hpp"

namespace earid::dataset {

namespace {

using nlohmann::json;

// Stream labels for per-scan randomness.
constexpr std::uint64_t kJitterLabel = 0x4a;
constexpr std::uint64_t kNoiseLabel = 0x4e;
constexpr std::uint64_t kAttackLabel = 0x41;

void write_f32(const std::filesystem::path& path, std::span<const double> h) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  for (double v : h) {
    const float x = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &x, 4);
    const std::uint8_t raw[4] = {
        static_cast<std::uint8_t>(bits & 0xff), static_cast<std::uint8_t>((bits >> 8) & 0xff),
        static_cast<std::uint8_t>((bits >> 16) & 0xff), static_cast<std::uint8_t>(bits >> 24)};
    f.write(reinterpret_cast<const char*>(raw), 4);
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> read_f32(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() % 4 != 0) throw std::runtime_error("truncated scan file: " + path.string());
  std::vector<double> out(bytes.size() / 4);
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    float x;
    std::memcpy(&x, &bits, 4);
    out[i] = static_cast<double>(x);
  }
  return out;
}

json profile_to_json(const synth::SubjectProfile& p) {
  json paths = json::array();
  for (const auto& tap : p.paths) paths.push_back({{"delay_s", tap.delay_s}, {"gain", tap.gain}});
  return json{{"id", p.subject_id}, {"seed", p.seed}, {"paths", paths}};
}

synth::SubjectProfile profile_from_json(const json& j, bool false_trigger_coloration) {
  synth::SubjectProfile p;
  p.subject_id = j.at("id").get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& tap : j.at("paths")) {
    p.paths.push_back({tap.at("delay_s").get<double>(), tap.at("gain").get<double>()});
  }
  p.device_coloration = synth::device_coloration_curve();
  if (false_trigger_coloration) {
    // Not-worn couplings lose the canal's high-frequency structure.
    const double fs = synth::kDefaultSampleRate;
    for (std::size_t k = 0; k < p.device_coloration.size(); ++k) {
      const double f = static_cast<double>(k) * fs / synth::kResponseWindow;
      p.device_coloration[k] /= 1.0 + std::pow(f / 1200.0, 6.0);
    }
  }
  return p;
}

synth::SubjectProfile make_silicon_profile(std::uint64_t seed, int index) {
  synth::SubjectProfile p;
  p.seed = derive_seed(seed, kAttackLabel, 1, static_cast<std::uint64_t>(index));
  {
    char buf[24];
    std::snprintf(buf, sizeof buf, "atk_silicon%02d", index);
    p.subject_id = buf;
  }
  // A silicon cavity: few regular taps, no fine structure, no sign flips.
  RandomStream rng(p.seed);
  const double direct = 2.0e-4 + rng.next_unit() * 1.0e-4;
  const int n_paths = 4;
  for (int i = 0; i < n_paths; ++i) {
    const double delay = direct + static_cast<double>(i) * 1.1e-3;
    const double gain = std::pow(0.55, i);
    p.paths.push_back({delay, gain});
  }
  p.device_coloration = synth::device_coloration_curve();
  return p;
}

synth::SubjectProfile make_false_trigger_profile(std::uint64_t seed, int index) {
  synth::SubjectProfile p;
  p.seed = derive_seed(seed, kAttackLabel, 2, static_cast<std::uint64_t>(index));
  {
    char buf[24];
    std::snprintf(buf, sizeof buf, "atk_ft%02d", index);
    p.subject_id = buf;
  }
  // Earbuds on a table / in a hand / under cloth: a strong direct
  // speaker-to-mic coupling, almost no reflection, and none of the canal's
  // high-frequency structure.
  RandomStream rng(p.seed);
  p.paths.push_back({3.0e-5 + rng.next_unit() * 5.0e-5, 0.3 + 0.1 * rng.next_unit()});
  p.paths.push_back({1.5e-4 + rng.next_unit() * 1.0e-4, 0.02 + 0.01 * rng.next_unit()});
  p.paths.push_back({8.0e-4 + rng.next_unit() * 8.0e-4, 0.005 + 0.005 * rng.next_unit()});
  p.device_coloration = synth::device_coloration_curve();
  const double fs = synth::kDefaultSampleRate;
  for (std::size_t k = 0; k < p.device_coloration.size(); ++k) {
    const double f = static_cast<double>(k) * fs / synth::kResponseWindow;
    p.device_coloration[k] /= 1.0 + std::pow(f / 1200.0, 6.0);
  }
  return p;
}

// The universal attack renders the gallery's per-dimension modal cepstrum
// back into an impulse response: invert the liftered DCT, exponentiate, and
// treat the result as a zero-phase magnitude response.
std::vector<double> render_universal_response(const Dataset& ds) {
  const features::FeatureConfig fcfg;
  // Designated gallery subset: seeded sample of up to 30 subjects.
  std::vector<std::size_t> order(ds.subjects.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  RandomStream shuffle_rng(derive_seed(ds.config.seed, kAttackLabel, 3));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[shuffle_rng.next_below(i)]);
  }
  const std::size_t gallery_size = std::min<std::size_t>(30, order.size());

  std::vector<features::CepstrumFeature> gallery_features;
  for (std::size_t g = 0; g < gallery_size; ++g) {
    const auto& subject_id = ds.subjects[order[g]].subject_id;
    const auto indices = ds.scans_of(subject_id);
    for (int trial = 0; trial < ds.config.enroll_scans; ++trial) {
      synth::EcsScan scan;
      scan.impulse_response = load_scan(ds, ds.scans[indices[static_cast<std::size_t>(trial)]]);
      gallery_features.push_back(features::extract_features({scan}, fcfg));
    }
  }

  const auto stats = keygen::compute_population_stats(gallery_features, fcfg);
  const std::size_t d = fcfg.dims;
  std::vector<double> modal(d);
  std::vector<double> column(gallery_features.size());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t s = 0; s < gallery_features.size(); ++s) {
      column[s] = gallery_features[s].coefficients[i];
    }
    const auto hist = keygen::estimate_distribution(column, stats.bins[i]);
    std::size_t best = 0;
    for (std::size_t b = 1; b < hist.size(); ++b) {
      if (hist[b] > hist[best]) best = b;
    }
    modal[i] = stats.bins[i].lo + (static_cast<double>(best) + 0.5) * stats.bins[i].width;
  }

  const std::size_t full = synth::kResponseWindow / 2 + 1;
  std::vector<double> c_full(full, 0.0);
  std::copy(modal.begin(), modal.end(), c_full.begin());
  const DctPlan plan(full);
  const auto log_mag = plan.inverse(c_full);
  std::vector<std::complex<double>> spec(full);
  for (std::size_t k = 0; k < full; ++k) spec[k] = {std::exp(log_mag[k]), 0.0};
  auto response = irfft(spec, synth::kResponseWindow);
  double peak = 0.0;
  for (double v : response) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (auto& v : response) v /= peak;
  }
  return response;
}

}  // namespace

std::vector<std::size_t> Dataset::scans_of(const std::string& subject_id,
                                           synth::AttackKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    if (scans[i].subject_id == subject_id && scans[i].attack == kind) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> Dataset::scans_with_attack(synth::AttackKind kind) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < scans.size(); ++i) {
    if (scans[i].attack == kind) out.push_back(i);
  }
  return out;
}

synth::NoiseCondition scheduled_noise(const DatasetConfig& cfg, int trial) {
  if (trial < cfg.enroll_scans) return synth::NoiseCondition::Quiet;
  switch ((trial - cfg.enroll_scans) % 3) {
    case 0: return synth::NoiseCondition::Quiet;
    case 1: return synth::NoiseCondition::Indoor;
    default: return synth::NoiseCondition::Street;
  }
}

synth::Excitation dataset_excitation(const DatasetConfig& cfg) {
  return synth::gen_excitation(cfg.excitation, cfg.sample_rate, cfg.excitation_duration,
                               cfg.chirp_f_start, cfg.chirp_f_end, derive_seed(cfg.seed, 0x45));
}

Dataset gen_population(const DatasetConfig& cfg, const std::filesystem::path& out_dir) {
  if (cfg.n_subjects < 1) throw std::invalid_argument("gen_population: need subjects");
  if (cfg.enroll_scans < 2 || cfg.enroll_scans >= cfg.scans_per_subject) {
    throw std::invalid_argument("gen_population: invalid enroll/auth split");
  }

  Dataset ds;
  ds.config = cfg;
  ds.root = out_dir;
  std::filesystem::create_directories(out_dir / "scans");

  const auto excitation = dataset_excitation(cfg);

  for (int s = 0; s < cfg.n_subjects; ++s) {
    ds.subjects.push_back(synth::synth_subject(cfg.seed, static_cast<std::uint32_t>(s)));
  }

  auto make_scan = [&](const synth::SubjectProfile& profile, int trial,
                       synth::NoiseCondition cond, synth::AttackKind kind, double jitter,
                       std::uint64_t stream_subject) -> ScanRecord {
    RandomStream rng(derive_seed(cfg.seed, stream_subject, static_cast<std::uint64_t>(trial),
                                 kJitterLabel));
    auto scan = synth::simulate_scan(profile, excitation, cond, jitter, rng);
    scan.trial_index = trial;
    scan.attack_kind = kind;
    scan.impulse_response = synth::estimate_channel(excitation.samples, scan.recorded);

    char name[32];
    std::snprintf(name, sizeof name, "t%02d.f32", trial);
    const auto rel = std::filesystem::path("scans") / profile.subject_id / name;
    write_f32(out_dir / rel, scan.impulse_response);
    return {profile.subject_id, trial, cond, kind, rel.generic_string()};
  };

  // Per-(subject, trial) streams make the scans independent of scheduling,
  // so subjects can be synthesized in parallel without touching the output.
  {
    const int workers =
        std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
    std::vector<std::vector<ScanRecord>> per_subject(
        static_cast<std::size_t>(cfg.n_subjects));
    for (int s = 0; s < cfg.n_subjects; ++s) {
      std::filesystem::create_directories(out_dir / "scans" /
                                          ds.subjects[static_cast<std::size_t>(s)].subject_id);
    }
    for (int base = 0; base < cfg.n_subjects; base += workers) {
      const int end = std::min(base + workers, cfg.n_subjects);
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(end - base));
      for (int s = base; s < end; ++s) {
        pool.emplace_back([&, s] {
          try {
            std::vector<ScanRecord> records;
            for (int t = 0; t < cfg.scans_per_subject; ++t) {
              records.push_back(make_scan(ds.subjects[static_cast<std::size_t>(s)], t,
                                          scheduled_noise(cfg, t), synth::AttackKind::Genuine,
                                          cfg.wear_jitter, static_cast<std::uint64_t>(s)));
            }
            per_subject[static_cast<std::size_t>(s)] = std::move(records);
          } catch (...) {
            errors[static_cast<std::size_t>(s - base)] = std::current_exception();
          }
        });
      }
      for (auto& t : pool) t.join();
      for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
      }
    }
    for (auto& records : per_subject) {
      ds.scans.insert(ds.scans.end(), records.begin(), records.end());
    }
  }

  if (cfg.attacks) {
    // Silicon ear model: one reference model, modeled re-seatings.
    const auto silicon = make_silicon_profile(cfg.seed, 0);
    ds.attack_profiles.push_back(silicon);
    std::filesystem::create_directories(out_dir / "scans" / silicon.subject_id);
    for (int t = 0; t < cfg.attack_scans; ++t) {
      ds.scans.push_back(make_scan(silicon, t, synth::NoiseCondition::Quiet,
                                   synth::AttackKind::Synthetic, cfg.wear_jitter * 0.5, 1000));
    }

    // False triggers: table / hand / cloth variants.
    for (int v = 0; v < 3; ++v) {
      ds.attack_profiles.push_back(make_false_trigger_profile(cfg.seed, v));
      std::filesystem::create_directories(out_dir / "scans" /
                                          ds.attack_profiles.back().subject_id);
    }
    for (int t = 0; t < cfg.attack_scans; ++t) {
      const auto& profile = ds.attack_profiles[1 + static_cast<std::size_t>(t % 3)];
      ds.scans.push_back(make_scan(profile, t, synth::NoiseCondition::Indoor,
                                   synth::AttackKind::FalseTrigger, cfg.wear_jitter * 2.0,
                                   2000 + static_cast<std::uint64_t>(t % 3)));
    }

    // Universal ECS pattern rendered from gallery modal features of the
    // genuine scans written above.
    const auto universal = render_universal_response(ds);
    std::filesystem::create_directories(out_dir / "scans" / "atk_universal");
    for (int t = 0; t < cfg.attack_scans; ++t) {
      RandomStream rng(derive_seed(cfg.seed, 3000, static_cast<std::uint64_t>(t), kNoiseLabel));
      auto scan = synth::simulate_scan_from_response(universal, excitation,
                                                     synth::NoiseCondition::Quiet, rng,
                                                     "atk_universal");
      scan.trial_index = t;
      scan.attack_kind = synth::AttackKind::Universal;
      scan.impulse_response = synth::estimate_channel(excitation.samples, scan.recorded);
      char name[32];
      std::snprintf(name, sizeof name, "t%02d.f32", t);
      const auto rel = std::filesystem::path("scans") / "atk_universal" / name;
      write_f32(out_dir / rel, scan.impulse_response);
      ds.scans.push_back({"atk_universal", t, synth::NoiseCondition::Quiet,
                          synth::AttackKind::Universal, rel.generic_string()});
    }
  }

  // Manifest: config echo, subject list (with ground-truth profiles so the
  // drift harness can resimulate), scan index.
  json manifest;
  manifest["format"] = "earid-dataset-v1";
  manifest["config"] = {
      {"n_subjects", cfg.n_subjects},
      {"scans_per_subject", cfg.scans_per_subject},
      {"enroll_scans", cfg.enroll_scans},
      {"seed", cfg.seed},
      {"excitation", synth::to_string(cfg.excitation)},
      {"excitation_duration", cfg.excitation_duration},
      {"chirp_f_start", cfg.chirp_f_start},
      {"chirp_f_end", cfg.chirp_f_end},
      {"sample_rate", cfg.sample_rate},
      {"wear_jitter", cfg.wear_jitter},
      {"attacks", cfg.attacks},
      {"attack_scans", cfg.attack_scans},
  };
  json subjects = json::array();
  for (const auto& p : ds.subjects) subjects.push_back(profile_to_json(p));
  manifest["subjects"] = subjects;
  json attack_profiles = json::array();
  for (const auto& p : ds.attack_profiles) attack_profiles.push_back(profile_to_json(p));
  manifest["attack_profiles"] = attack_profiles;
  json scans = json::array();
  for (const auto& rec : ds.scans) {
    scans.push_back({{"subject_id", rec.subject_id},
                     {"trial", rec.trial},
                     {"noise_condition", synth::to_string(rec.noise)},
                     {"attack_kind", synth::to_string(rec.attack)},
                     {"path", rec.path}});
  }
  manifest["scans"] = scans;

  std::ofstream mf(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!mf) throw std::runtime_error("cannot write manifest.json");
  mf << manifest.dump(2) << "\n";
  if (!mf) throw std::runtime_error("manifest write failed");
  return ds;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream mf(dir / "manifest.json", std::ios::binary);
  if (!mf) throw std::runtime_error("cannot open manifest.json under " + dir.string());
  json manifest = json::parse(mf);
  if (manifest.at("format").get<std::string>() != "earid-dataset-v1") {
    throw std::runtime_error("unsupported dataset format");
  }

  Dataset ds;
  ds.root = dir;
  const auto& c = manifest.at("config");
  ds.config.n_subjects = c.at("n_subjects").get<int>();
  ds.config.scans_per_subject = c.at("scans_per_subject").get<int>();
  ds.config.enroll_scans = c.at("enroll_scans").get<int>();
  ds.config.seed = c.at("seed").get<std::uint64_t>();
  ds.config.excitation = synth::excitation_kind_from_string(c.at("excitation").get<std::string>());
  ds.config.excitation_duration = c.at("excitation_duration").get<double>();
  ds.config.chirp_f_start = c.at("chirp_f_start").get<double>();
  ds.config.chirp_f_end = c.at("chirp_f_end").get<double>();
  ds.config.sample_rate = c.at("sample_rate").get<double>();
  ds.config.wear_jitter = c.at("wear_jitter").get<double>();
  ds.config.attacks = c.at("attacks").get<bool>();
  ds.config.attack_scans = c.at("attack_scans").get<int>();

  for (const auto& j : manifest.at("subjects")) {
    ds.subjects.push_back(profile_from_json(j, false));
  }
  for (const auto& j : manifest.at("attack_profiles")) {
    const auto id = j.at("id").get<std::string>();
    ds.attack_profiles.push_back(profile_from_json(j, id.rfind("atk_ft", 0) == 0));
  }
  for (const auto& j : manifest.at("scans")) {
    ds.scans.push_back(
        {j.at("subject_id").get<std::string>(), j.at("trial").get<int>(),
         synth::noise_condition_from_string(j.at("noise_condition").get<std::string>()),
         synth::attack_kind_from_string(j.at("attack_kind").get<std::string>()),
         j.at("path").get<std::string>()});
  }
  return ds;
}

std::vector<double> load_scan(const Dataset& ds, const ScanRecord& record) {
  return read_f32(ds.root / record.path);
}

}  // namespace earid::dataset
