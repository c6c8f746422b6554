#include "earid/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include <json.hpp>

#include "earid/protocol.hpp"

namespace earid::harness {

namespace {

using nlohmann::json;

constexpr std::uint64_t kGroupingLabel = 0x47;
constexpr std::uint64_t kProjectionLabel = 0x50;
constexpr std::uint64_t kCommitLabel = 0x43;
constexpr std::uint64_t kDriftLabel = 0x44;

// Per-scan feature material computed once per dataset and shared by every
// trial: band magnitudes for aggregation plus the single-scan cepstra.
class FeatureCache {
 public:
  FeatureCache(const dataset::Dataset& ds, const features::FeatureConfig& cfg)
      : cfg_(cfg), mags_(ds.scans.size()), single_(ds.scans.size()) {
    for (std::size_t i = 0; i < ds.scans.size(); ++i) {
      const auto h = dataset::load_scan(ds, ds.scans[i]);
      mags_[i] = features::band_magnitudes(h, cfg_);
      single_[i] = finish({std::span<const double>(mags_[i])});
    }
  }

  const features::CepstrumFeature& single(std::size_t scan) const { return single_[scan]; }

  features::CepstrumFeature aggregate(std::span<const std::size_t> scans) const {
    std::vector<std::span<const double>> views;
    views.reserve(scans.size());
    for (std::size_t idx : scans) views.emplace_back(mags_[idx]);
    return finish(views);
  }

 private:
  features::CepstrumFeature finish(const std::vector<std::span<const double>>& views) const {
    const auto spec = features::aggregate_band_magnitudes(views, cfg_);
    return features::lifter(features::cepstrum(spec), cfg_);
  }

  features::FeatureConfig cfg_;
  std::vector<std::vector<double>> mags_;
  std::vector<features::CepstrumFeature> single_;
};

struct EnrolledUser {
  std::size_t subject = 0;  // index into ds.subjects
  std::string id;
  keygen::HelperData helper;
  keygen::BiometricKey key;
  protocol::EnrolledCredential credential;
  std::vector<std::vector<std::size_t>> attempts;  // auth scan index groups
};

struct TrialContext {
  std::vector<std::size_t> gallery;
  std::vector<std::size_t> enrolled;
  keygen::PopulationStats stats;
  std::vector<EnrolledUser> users;
};

std::size_t scaled_gallery_size(const dataset::Dataset& ds, const EvalConfig& cfg) {
  const auto n = static_cast<std::size_t>(ds.subjects.size());
  if (n >= static_cast<std::size_t>(cfg.gallery_size) + 2) {
    if (n >= 44) return static_cast<std::size_t>(cfg.gallery_size);
    const auto g = static_cast<std::size_t>(std::lround(
        static_cast<double>(cfg.gallery_size) * static_cast<double>(n) / 44.0));
    const auto clamped = std::clamp<std::size_t>(g, 2, n - 2);
    std::fprintf(stderr, "earid: population of %zu; scaling gallery to %zu subjects\n", n,
                 clamped);
    return clamped;
  }
  if (n < 4) throw std::invalid_argument("evaluate: need at least 4 subjects");
  std::fprintf(stderr, "earid: population of %zu; scaling gallery to %zu subjects\n", n, n / 2);
  return n / 2;
}

TrialContext build_trial(const dataset::Dataset& ds, const FeatureCache& cache,
                         const EvalConfig& cfg, const features::FeatureConfig& fcfg, int trial) {
  TrialContext ctx;
  const std::size_t n = ds.subjects.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  RandomStream rng(derive_seed(cfg.grouping_seed, static_cast<std::uint64_t>(trial),
                               kGroupingLabel));
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.next_below(i)]);

  const std::size_t g = scaled_gallery_size(ds, cfg);
  ctx.gallery.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(g));
  ctx.enrolled.assign(order.begin() + static_cast<std::ptrdiff_t>(g), order.end());

  // Population statistics from every genuine scan of the gallery subjects,
  // each featurized individually.
  std::vector<features::CepstrumFeature> gallery_features;
  for (std::size_t subject : ctx.gallery) {
    for (std::size_t scan : ds.scans_of(ds.subjects[subject].subject_id)) {
      gallery_features.push_back(cache.single(scan));
    }
  }
  ctx.stats = keygen::compute_population_stats(gallery_features, fcfg);

  const auto& code = ecc::BchCode::by_name(cfg.ecc_name);
  for (std::size_t subject : ctx.enrolled) {
    const auto& profile = ds.subjects[subject];
    const auto scan_idx = ds.scans_of(profile.subject_id);
    const auto enroll_count = static_cast<std::size_t>(ds.config.enroll_scans);
    if (scan_idx.size() < enroll_count + static_cast<std::size_t>(cfg.scans_per_attempt)) {
      throw std::invalid_argument("evaluate: subject has too few scans for the split");
    }

    std::vector<features::CepstrumFeature> per_scan;
    per_scan.reserve(enroll_count);
    for (std::size_t i = 0; i < enroll_count; ++i) per_scan.push_back(cache.single(scan_idx[i]));
    const auto aggregate = cache.aggregate(
        std::span<const std::size_t>(scan_idx.data(), enroll_count));

    keygen::EnrollOptions opts;
    opts.key_length = code.n();
    opts.renyi_alpha = 0.0;
    opts.projection_seed =
        derive_seed(cfg.grouping_seed, static_cast<std::uint64_t>(trial), subject,
                    kProjectionLabel);
    auto enrolled = keygen::enroll_from_features(per_scan, aggregate, ctx.stats, opts, fcfg);

    EnrolledUser user;
    user.subject = subject;
    user.id = profile.subject_id;
    user.helper = std::move(enrolled.helper);
    user.key = std::move(enrolled.key);
    user.credential = {user.id, user.key, cfg.ecc_name, 0};
    for (std::size_t at = enroll_count;
         at + static_cast<std::size_t>(cfg.scans_per_attempt) <= scan_idx.size();
         at += static_cast<std::size_t>(cfg.scans_per_attempt)) {
      user.attempts.emplace_back(scan_idx.begin() + static_cast<std::ptrdiff_t>(at),
                                 scan_idx.begin() +
                                     static_cast<std::ptrdiff_t>(
                                         at + static_cast<std::size_t>(cfg.scans_per_attempt)));
    }
    ctx.users.push_back(std::move(user));
  }
  return ctx;
}

// One protocol round-trip; asserts the protocol decision matches the raw
// Hamming decision so the two paths can never drift apart silently.
bool run_attempt(const keygen::BiometricKey& auth_key, const EnrolledUser& victim,
                 const ecc::BchCode& code, RandomStream& rng, std::size_t* bits_out = nullptr) {
  const std::size_t bits = hamming_distance(auth_key.bits, victim.key.bits);
  if (bits_out) *bits_out = bits;
  const auto msg = protocol::auth_commit_message(auth_key, code, rng, victim.id);
  const auto wire = protocol::serialize(msg);
  const auto outcome = protocol::verifier_session(wire, victim.credential);
  const bool accepted = outcome.decision == protocol::AuthDecision::Accept;
  if (accepted != (bits <= code.t())) {
    throw std::logic_error("harness: protocol decision diverged from the Hamming threshold");
  }
  return accepted;
}

json sweep_to_json(const SweepResult& sweep) {
  json curve = json::array();
  for (const auto& pt : sweep.curve) {
    curve.push_back({{"threshold", pt.threshold}, {"frr", pt.frr}, {"far", pt.far}});
  }
  return json{{"curve", curve}, {"eer", sweep.eer}, {"eer_threshold", sweep.eer_threshold}};
}

}  // namespace

double bit_error_rate(const keygen::BiometricKey& a, const keygen::BiometricKey& b) {
  if (a.length() != b.length()) throw std::invalid_argument("bit_error_rate: length mismatch");
  return static_cast<double>(hamming_distance(a.bits, b.bits)) / static_cast<double>(a.length());
}

SweepResult sweep_rates(const std::vector<double>& genuine_bers,
                        const std::vector<double>& impostor_bers, std::size_t key_length) {
  if (genuine_bers.empty() || impostor_bers.empty()) {
    throw std::invalid_argument("sweep_rates: need nonempty BER samples");
  }
  const auto L = static_cast<long>(key_length);
  std::vector<std::size_t> genuine_hist(key_length + 1, 0), impostor_hist(key_length + 1, 0);
  for (double b : genuine_bers) {
    const auto bits = std::clamp(std::lround(b * static_cast<double>(L)), 0L, L);
    ++genuine_hist[static_cast<std::size_t>(bits)];
  }
  for (double b : impostor_bers) {
    const auto bits = std::clamp(std::lround(b * static_cast<double>(L)), 0L, L);
    ++impostor_hist[static_cast<std::size_t>(bits)];
  }

  SweepResult out;
  out.curve.resize(key_length + 1);
  std::size_t genuine_le = 0, impostor_le = 0;
  const double ng = static_cast<double>(genuine_bers.size());
  const double ni = static_cast<double>(impostor_bers.size());
  for (std::size_t tau = 0; tau <= key_length; ++tau) {
    genuine_le += genuine_hist[tau];
    impostor_le += impostor_hist[tau];
    out.curve[tau].threshold = static_cast<int>(tau);
    out.curve[tau].frr = static_cast<double>(genuine_bers.size() - genuine_le) / ng;
    out.curve[tau].far = static_cast<double>(impostor_le) / ni;
  }

  // Crossing point: the first threshold where FAR >= FRR.
  std::size_t cross = key_length;
  for (std::size_t tau = 0; tau <= key_length; ++tau) {
    if (out.curve[tau].far >= out.curve[tau].frr) {
      cross = tau;
      break;
    }
  }
  if (cross == 0) {
    out.eer = (out.curve[0].far + out.curve[0].frr) / 2.0;
    out.eer_threshold = 0.0;
  } else {
    const double frr0 = out.curve[cross - 1].frr, frr1 = out.curve[cross].frr;
    const double far0 = out.curve[cross - 1].far, far1 = out.curve[cross].far;
    const double gap0 = frr0 - far0;           // > 0 before the crossing
    const double gap1 = far1 - frr1;           // >= 0 at the crossing
    const double x = gap0 + gap1 > 0.0 ? gap0 / (gap0 + gap1) : 0.0;
    out.eer = frr0 + x * (frr1 - frr0);
    out.eer_threshold = static_cast<double>(cross - 1) + x;
  }
  return out;
}

EvalReport evaluate(const dataset::Dataset& ds, const EvalConfig& cfg,
                    const features::FeatureConfig& fcfg) {
  if (cfg.trials < 1) throw std::invalid_argument("evaluate: need at least one trial");
  const auto& code = ecc::BchCode::by_name(cfg.ecc_name);
  const FeatureCache cache(ds, fcfg);

  EvalReport report;
  report.ecc_name = cfg.ecc_name;
  report.trials = cfg.trials;
  report.dataset_seed = ds.config.seed;
  report.grouping_seed = cfg.grouping_seed;

  double frr_sum = 0.0, far_sum = 0.0;
  double balance_sum = 0.0;
  double inter_user_sum = 0.0;
  std::size_t inter_user_pairs = 0;
  std::size_t balance_keys = 0;

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const auto ctx = build_trial(ds, cache, cfg, fcfg, trial);
    RandomStream commit_rng(derive_seed(cfg.grouping_seed, static_cast<std::uint64_t>(trial),
                                        kCommitLabel));

    std::size_t genuine_total = 0, genuine_rejects = 0;
    std::size_t impostor_total = 0, impostor_accepts = 0;

    for (const auto& user : ctx.users) {
      for (const auto& attempt : user.attempts) {
        const auto key = keygen::key_from_feature(cache.aggregate(attempt), user.helper);
        std::size_t bits = 0;
        const bool accepted = run_attempt(key, user, code, commit_rng, &bits);
        report.genuine_bers.push_back(static_cast<double>(bits) /
                                      static_cast<double>(code.n()));
        ++genuine_total;
        if (!accepted) ++genuine_rejects;
      }
    }

    for (const auto& attacker : ctx.users) {
      for (const auto& victim : ctx.users) {
        if (&attacker == &victim) continue;
        const auto limit = std::min<std::size_t>(
            attacker.attempts.size(), static_cast<std::size_t>(cfg.passive_attempts_per_pair));
        for (std::size_t a = 0; a < limit; ++a) {
          const auto key =
              keygen::key_from_feature(cache.aggregate(attacker.attempts[a]), victim.helper);
          std::size_t bits = 0;
          const bool accepted = run_attempt(key, victim, code, commit_rng, &bits);
          report.impostor_bers.push_back(static_cast<double>(bits) /
                                         static_cast<double>(code.n()));
          ++impostor_total;
          if (accepted) ++impostor_accepts;
        }
      }
    }

    const double frr = static_cast<double>(genuine_rejects) / static_cast<double>(genuine_total);
    const double far =
        static_cast<double>(impostor_accepts) / static_cast<double>(impostor_total);
    report.per_trial.push_back({frr, far, (2.0 - far - frr) / 2.0});
    frr_sum += frr;
    far_sum += far;

    for (std::size_t i = 0; i < ctx.users.size(); ++i) {
      balance_sum += static_cast<double>(popcount_bits(ctx.users[i].key.bits)) /
                     static_cast<double>(code.n());
      ++balance_keys;
      for (std::size_t j = i + 1; j < ctx.users.size(); ++j) {
        inter_user_sum +=
            static_cast<double>(hamming_distance(ctx.users[i].key.bits, ctx.users[j].key.bits)) /
            static_cast<double>(code.n());
        ++inter_user_pairs;
      }
    }
  }

  report.rates.frr = frr_sum / cfg.trials;
  report.rates.far = far_sum / cfg.trials;
  report.rates.bac = (2.0 - report.rates.far - report.rates.frr) / 2.0;
  report.rates.threshold_bits = static_cast<int>(code.t());
  report.sweep = sweep_rates(report.genuine_bers, report.impostor_bers, code.n());
  report.rates.eer = report.sweep.eer;
  report.key_bit_balance = balance_sum / static_cast<double>(balance_keys);
  report.mean_inter_user_distance = inter_user_sum / static_cast<double>(inter_user_pairs);

  // Mode of the genuine cloud in bits (ties to the lowest count).
  std::vector<std::size_t> hist(code.n() + 1, 0);
  for (double b : report.genuine_bers) {
    ++hist[static_cast<std::size_t>(
        std::clamp(std::lround(b * static_cast<double>(code.n())), 0L,
                   static_cast<long>(code.n())))];
  }
  std::size_t mode = 0;
  for (std::size_t i = 1; i < hist.size(); ++i) {
    if (hist[i] > hist[mode]) mode = i;
  }
  report.genuine_ber_mode = static_cast<double>(mode) / static_cast<double>(code.n());
  return report;
}

AttackReport attack_suite(const dataset::Dataset& ds, const EvalConfig& cfg,
                          const features::FeatureConfig& fcfg) {
  const auto& code = ecc::BchCode::by_name(cfg.ecc_name);
  const auto silicon = ds.scans_with_attack(synth::AttackKind::Synthetic);
  const auto universal = ds.scans_with_attack(synth::AttackKind::Universal);
  const auto false_triggers = ds.scans_with_attack(synth::AttackKind::FalseTrigger);
  if (silicon.empty() || universal.empty() || false_triggers.empty()) {
    throw std::invalid_argument(
        "attack_suite: dataset lacks attack corpora (generate with --attacks)");
  }

  const FeatureCache cache(ds, fcfg);
  AttackReport report;
  report.ecc_name = cfg.ecc_name;
  report.dataset_seed = ds.config.seed;
  report.grouping_seed = cfg.grouping_seed;

  auto grouped_attempts = [&](const std::vector<std::size_t>& scans) {
    std::vector<std::vector<std::size_t>> out;
    const auto step = static_cast<std::size_t>(cfg.scans_per_attempt);
    for (std::size_t at = 0; at + step <= scans.size(); at += step) {
      out.emplace_back(scans.begin() + static_cast<std::ptrdiff_t>(at),
                       scans.begin() + static_cast<std::ptrdiff_t>(at + step));
    }
    return out;
  };
  const auto silicon_attempts = grouped_attempts(silicon);
  const auto universal_attempts = grouped_attempts(universal);
  const auto ft_attempts = grouped_attempts(false_triggers);

  for (int trial = 0; trial < cfg.trials; ++trial) {
    const auto ctx = build_trial(ds, cache, cfg, fcfg, trial);
    RandomStream commit_rng(derive_seed(cfg.grouping_seed, static_cast<std::uint64_t>(trial),
                                        kCommitLabel, kDriftLabel));

    for (const auto& victim : ctx.users) {
      for (const auto& attacker : ctx.users) {
        if (&attacker == &victim) continue;
        const auto limit = std::min<std::size_t>(
            attacker.attempts.size(), static_cast<std::size_t>(cfg.passive_attempts_per_pair));
        for (std::size_t a = 0; a < limit; ++a) {
          const auto key =
              keygen::key_from_feature(cache.aggregate(attacker.attempts[a]), victim.helper);
          ++report.passive.trials;
          if (run_attempt(key, victim, code, commit_rng)) ++report.passive.successes;
        }
        // Key guessing: the attacker replays a commitment built from their
        // own enrolled key.
        ++report.key_guessing.trials;
        if (run_attempt(attacker.key, victim, code, commit_rng)) {
          ++report.key_guessing.successes;
        }
      }

      // Rendered corpora target the victim with the victim's own helper.
      auto corpus_pass = [&](const std::vector<std::vector<std::size_t>>& attempts,
                             AttackCell& cell) {
        for (const auto& attempt : attempts) {
          const auto key = keygen::key_from_feature(cache.aggregate(attempt), victim.helper);
          ++cell.trials;
          if (run_attempt(key, victim, code, commit_rng)) ++cell.successes;
        }
      };
      corpus_pass(silicon_attempts, report.synthetic);
      corpus_pass(universal_attempts, report.universal);
      corpus_pass(ft_attempts, report.false_trigger);
    }
  }
  return report;
}

DriftReport drift_eval(const dataset::Dataset& ds, const DriftConfig& cfg,
                       const features::FeatureConfig& fcfg) {
  if (cfg.periods < 1) throw std::invalid_argument("drift_eval: need at least one period");
  const auto& code = ecc::BchCode::by_name(cfg.ecc_name);
  const FeatureCache cache(ds, fcfg);

  EvalConfig ecfg;
  ecfg.ecc_name = cfg.ecc_name;
  ecfg.grouping_seed = cfg.seed;
  ecfg.scans_per_attempt = cfg.scans_per_attempt;
  const auto ctx = build_trial(ds, cache, ecfg, fcfg, /*trial=*/0);

  const auto excitation = dataset::dataset_excitation(ds.config);
  std::map<std::string, const synth::SubjectProfile*> profiles;
  for (const auto& p : ds.subjects) profiles[p.subject_id] = &p;

  DriftReport report;
  report.ecc_name = cfg.ecc_name;
  report.threshold_bits = static_cast<int>(code.t());
  report.day_mode = cfg.day_mode;

  const synth::NoiseCondition session_cycle[3] = {synth::NoiseCondition::Quiet,
                                                  synth::NoiseCondition::Indoor,
                                                  synth::NoiseCondition::Street};

  for (int period = 1; period <= cfg.periods; ++period) {
    const double jitter = cfg.day_mode
                              ? ds.config.wear_jitter * (1.0 + cfg.growth * period)
                              : ds.config.wear_jitter;
    DriftPeriod row;
    row.period = period;

    // Fresh scans per user per attempt; attempts double as passive material
    // against every other enrolled user.
    std::vector<std::vector<features::CepstrumFeature>> fresh(ctx.users.size());
    for (std::size_t u = 0; u < ctx.users.size(); ++u) {
      const auto* profile = profiles.at(ctx.users[u].id);
      for (int attempt = 0; attempt < cfg.attempts_per_period; ++attempt) {
        std::vector<std::vector<double>> responses;
        for (int s = 0; s < cfg.scans_per_attempt; ++s) {
          RandomStream rng(derive_seed(
              cfg.seed, static_cast<std::uint64_t>(period),
              (u << 16) | static_cast<std::uint64_t>(attempt * cfg.scans_per_attempt + s),
              kDriftLabel));
          const auto cond = cfg.day_mode ? synth::NoiseCondition::Quiet
                                         : session_cycle[attempt % 3];
          auto scan = synth::simulate_scan(*profile, excitation, cond, jitter, rng);
          responses.push_back(synth::estimate_channel(excitation.samples, scan.recorded));
        }
        fresh[u].push_back(features::extract_features_from_responses(responses, fcfg));
      }
    }

    for (std::size_t u = 0; u < ctx.users.size(); ++u) {
      for (const auto& feature : fresh[u]) {
        const auto key = keygen::key_from_feature(feature, ctx.users[u].helper);
        row.genuine_bits.push_back(static_cast<double>(
            hamming_distance(key.bits, ctx.users[u].key.bits)));
      }
      for (std::size_t v = 0; v < ctx.users.size(); ++v) {
        if (v == u) continue;
        const auto key = keygen::key_from_feature(fresh[u].front(), ctx.users[v].helper);
        row.passive_bits.push_back(static_cast<double>(
            hamming_distance(key.bits, ctx.users[v].key.bits)));
      }
    }

    auto minmax_mean = [](const std::vector<double>& v, double& mn, double& mx, double* mean) {
      mn = *std::min_element(v.begin(), v.end());
      mx = *std::max_element(v.begin(), v.end());
      if (mean) {
        double s = 0.0;
        for (double x : v) s += x;
        *mean = s / static_cast<double>(v.size());
      }
    };
    minmax_mean(row.genuine_bits, row.genuine_min_bits, row.genuine_max_bits,
                &row.genuine_mean_bits);
    minmax_mean(row.passive_bits, row.passive_min_bits, row.passive_max_bits, nullptr);
    std::size_t under = 0;
    for (double b : row.genuine_bits) {
      if (b <= static_cast<double>(code.t())) ++under;
    }
    row.frac_under_threshold =
        static_cast<double>(under) / static_cast<double>(row.genuine_bits.size());
    report.periods.push_back(std::move(row));
  }
  return report;
}

std::string to_json_string(const EvalReport& report, int indent) {
  json per_trial = json::array();
  for (const auto& t : report.per_trial) {
    per_trial.push_back({{"frr", t.frr}, {"far", t.far}, {"bac", t.bac}});
  }
  json j{{"ecc", report.ecc_name},
         {"trials", report.trials},
         {"dataset_seed", report.dataset_seed},
         {"grouping_seed", report.grouping_seed},
         {"operating_point",
          {{"threshold_bits", report.rates.threshold_bits},
           {"frr", report.rates.frr},
           {"far", report.rates.far},
           {"eer", report.rates.eer},
           {"bac", report.rates.bac}}},
         {"per_trial", per_trial},
         {"genuine_ber_mode", report.genuine_ber_mode},
         {"key_stats",
          {{"bit_balance", report.key_bit_balance},
           {"mean_inter_user_distance", report.mean_inter_user_distance}}},
         {"sweep", sweep_to_json(report.sweep)},
         {"genuine_bers", report.genuine_bers},
         {"impostor_bers", report.impostor_bers}};
  return j.dump(indent);
}

std::string to_json_string(const AttackReport& report, int indent) {
  auto cell = [](const AttackCell& c) {
    return json{{"successes", c.successes}, {"trials", c.trials}, {"rate", c.rate()}};
  };
  json j{{"ecc", report.ecc_name},
         {"dataset_seed", report.dataset_seed},
         {"grouping_seed", report.grouping_seed},
         {"p_asr", cell(report.passive)},
         {"s_asr", cell(report.synthetic)},
         {"u_asr", cell(report.universal)},
         {"k_asr", cell(report.key_guessing)},
         {"ft_rate", cell(report.false_trigger)}};
  return j.dump(indent);
}

std::string to_json_string(const DriftReport& report, int indent) {
  json periods = json::array();
  for (const auto& p : report.periods) {
    periods.push_back({{"period", p.period},
                       {"genuine_min_bits", p.genuine_min_bits},
                       {"genuine_max_bits", p.genuine_max_bits},
                       {"genuine_mean_bits", p.genuine_mean_bits},
                       {"passive_min_bits", p.passive_min_bits},
                       {"passive_max_bits", p.passive_max_bits},
                       {"frac_under_threshold", p.frac_under_threshold},
                       {"genuine_bits", p.genuine_bits},
                       {"passive_bits", p.passive_bits}});
  }
  json j{{"ecc", report.ecc_name},
         {"threshold_bits", report.threshold_bits},
         {"mode", report.day_mode ? "day" : "session"},
         {"periods", periods}};
  return j.dump(indent);
}

}  // namespace earid::harness
