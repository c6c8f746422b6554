// earid: dataset generation, key extraction and protocol evaluation driver.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "earid/dataset.hpp"
#include "earid/harness.hpp"
#include "earid/protocol.hpp"

using namespace earid;

namespace {

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> split_int_list(const std::string& list) {
  std::vector<int> out;
  for (const auto& item : split_list(list)) out.push_back(std::stoi(item));
  return out;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
}

// Scans of one subject by trial index, loaded as EcsScan shells (h only).
std::vector<synth::EcsScan> load_subject_scans(const dataset::Dataset& ds,
                                               const std::string& subject_id,
                                               const std::vector<int>& trials) {
  const auto indices = ds.scans_of(subject_id);
  if (indices.empty()) throw std::runtime_error("no scans for subject " + subject_id);
  std::vector<synth::EcsScan> out;
  for (int trial : trials) {
    bool found = false;
    for (std::size_t idx : indices) {
      if (ds.scans[idx].trial == trial) {
        synth::EcsScan scan;
        scan.subject_id = subject_id;
        scan.trial_index = trial;
        scan.noise_condition = ds.scans[idx].noise;
        scan.impulse_response = dataset::load_scan(ds, ds.scans[idx]);
        out.push_back(std::move(scan));
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::runtime_error("subject " + subject_id + " has no trial " +
                               std::to_string(trial));
    }
  }
  return out;
}

keygen::PopulationStats gallery_stats(const dataset::Dataset& ds,
                                      const std::vector<std::string>& gallery_ids,
                                      const features::FeatureConfig& fcfg) {
  std::vector<features::CepstrumFeature> gallery;
  for (const auto& id : gallery_ids) {
    const auto indices = ds.scans_of(id);
    if (indices.empty()) throw std::runtime_error("gallery subject has no scans: " + id);
    for (std::size_t idx : indices) {
      synth::EcsScan scan;
      scan.impulse_response = dataset::load_scan(ds, ds.scans[idx]);
      gallery.push_back(features::extract_features({scan}, fcfg));
    }
  }
  return keygen::compute_population_stats(gallery, fcfg);
}

int cmd_gen(const dataset::DatasetConfig& cfg, const std::string& out_dir) {
  const auto ds = dataset::gen_population(cfg, out_dir);
  std::printf("wrote %zu scans for %d subjects to %s\n", ds.scans.size(), cfg.n_subjects,
              out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EarID ear-canal biometric key extraction and fuzzy-commitment tooling"};
  app.require_subcommand(1);

  features::FeatureConfig fcfg;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic ECS dataset");
  dataset::DatasetConfig gen_cfg;
  std::string gen_out;
  std::string gen_excitation = "chirp";
  gen->add_option("--subjects", gen_cfg.n_subjects, "Number of subjects")->capture_default_str();
  gen->add_option("--scans", gen_cfg.scans_per_subject, "Scans per subject")
      ->capture_default_str();
  gen->add_option("--enroll", gen_cfg.enroll_scans, "Enrollment scans per subject")
      ->capture_default_str();
  gen->add_option("--seed", gen_cfg.seed, "Master seed")->capture_default_str();
  gen->add_option("--jitter", gen_cfg.wear_jitter, "Wear jitter scale")->capture_default_str();
  gen->add_option("--duration", gen_cfg.excitation_duration, "Excitation duration in seconds")
      ->capture_default_str();
  gen->add_option("--excitation", gen_excitation, "Excitation kind: chirp or mls")
      ->capture_default_str();
  gen->add_option("--attack-scans", gen_cfg.attack_scans, "Scans per attack corpus")
      ->capture_default_str();
  gen->add_flag("--attacks", gen_cfg.attacks, "Generate attack corpora");
  gen->add_option("--out", gen_out, "Output directory")->required();

  // features
  auto* feat = app.add_subcommand("features", "Extract a cepstral feature vector");
  std::string feat_in, feat_subject, feat_scans, feat_out;
  feat->add_option("--in", feat_in, "Dataset directory")->required();
  feat->add_option("--subject", feat_subject, "Subject id")->required();
  feat->add_option("--scans", feat_scans, "Comma-separated trial indices")->required();
  feat->add_option("--out", feat_out, "Output JSON path")->required();

  // enroll
  auto* enroll = app.add_subcommand("enroll", "Enroll a subject against a gallery");
  std::string en_in, en_subject, en_gallery, en_ecc = "bch255", en_key_out, en_helper_out;
  std::string en_store;
  std::uint64_t en_seed = 0;
  bool en_seed_set = false;
  double en_alpha = 0.0;
  enroll->add_option("--in", en_in, "Dataset directory")->required();
  enroll->add_option("--subject", en_subject, "Subject id")->required();
  enroll->add_option("--gallery", en_gallery, "Comma-separated gallery subject ids")->required();
  enroll->add_option("--ecc", en_ecc, "ECC config: bch127/bch255/bch511")
      ->capture_default_str();
  enroll->add_option("--out-key", en_key_out, "Enrolled key output (packed bits)")->required();
  enroll->add_option("--out-helper", en_helper_out, "Helper data output")->required();
  enroll->add_option("--store", en_store, "Also store the credential in this directory");
  enroll->add_option("--alpha", en_alpha, "Renyi divergence order")->capture_default_str();
  enroll
      ->add_option_function<std::uint64_t>(
          "--seed",
          [&](std::uint64_t v) {
            en_seed = v;
            en_seed_set = true;
          },
          "Projection seed (default derived from the dataset seed)")
      ->expected(1);

  // auth
  auto* auth = app.add_subcommand("auth", "Run one authentication attempt");
  std::string au_in, au_subject, au_helper, au_store, au_ecc = "bch255", au_scans;
  std::uint64_t au_seed = 0;
  bool au_seed_set = false;
  auth->add_option("--in", au_in, "Dataset directory")->required();
  auth->add_option("--subject", au_subject, "Subject id")->required();
  auth->add_option("--helper", au_helper, "Helper data file")->required();
  auth->add_option("--store", au_store, "Credential store directory")->required();
  auth->add_option("--ecc", au_ecc, "ECC config")->capture_default_str();
  auth->add_option("--scans", au_scans, "Comma-separated trial indices (default: auth split)");
  auth->add_option_function<std::uint64_t>(
          "--seed",
          [&](std::uint64_t v) {
            au_seed = v;
            au_seed_set = true;
          },
          "Commitment RNG seed (default: nondeterministic)")
      ->expected(1);

  // eval
  auto* eval = app.add_subcommand("eval", "Grouped accuracy evaluation");
  std::string ev_in, ev_ecc = "bch255", ev_json;
  harness::EvalConfig ev_cfg;
  bool ev_strict = false;
  eval->add_option("--in", ev_in, "Dataset directory")->required();
  eval->add_option("--ecc", ev_ecc, "ECC config")->capture_default_str();
  eval->add_option("--trials", ev_cfg.trials, "Independent groupings")->capture_default_str();
  eval->add_option("--seed", ev_cfg.grouping_seed, "Grouping seed")->capture_default_str();
  eval->add_option("--json", ev_json, "Write the JSON report here");
  eval->add_flag("--strict", ev_strict, "Exit 2 when accuracy targets are missed");

  // attack
  auto* attack = app.add_subcommand("attack", "Attack suites (P/S/U/K-ASR, false triggering)");
  std::string at_in, at_ecc = "bch255", at_json;
  harness::EvalConfig at_cfg;
  bool at_strict = false;
  attack->add_option("--in", at_in, "Dataset directory")->required();
  attack->add_option("--ecc", at_ecc, "ECC config")->capture_default_str();
  attack->add_option("--trials", at_cfg.trials, "Independent groupings")->capture_default_str();
  attack->add_option("--seed", at_cfg.grouping_seed, "Grouping seed")->capture_default_str();
  attack->add_option("--json", at_json, "Write the JSON report here");
  attack->add_flag("--strict", at_strict, "Exit 2 when attack targets are missed");

  // drift
  auto* drift = app.add_subcommand("drift", "Cross-day / cross-session drift simulation");
  std::string dr_in, dr_ecc = "bch255", dr_json, dr_mode = "day";
  harness::DriftConfig dr_cfg;
  drift->add_option("--in", dr_in, "Dataset directory")->required();
  drift->add_option("--periods", dr_cfg.periods, "Number of periods")->capture_default_str();
  drift->add_option("--mode", dr_mode, "day or session")->capture_default_str();
  drift->add_option("--ecc", dr_ecc, "ECC config")->capture_default_str();
  drift->add_option("--seed", dr_cfg.seed, "Simulation seed")->capture_default_str();
  drift->add_option("--json", dr_json, "Write the JSON report here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      gen_cfg.excitation = synth::excitation_kind_from_string(gen_excitation);
      return cmd_gen(gen_cfg, gen_out);
    }

    if (*feat) {
      const auto ds = dataset::load_dataset(feat_in);
      const auto scans = load_subject_scans(ds, feat_subject, split_int_list(feat_scans));
      const auto feature = features::extract_features(scans, fcfg);
      std::string json = "[";
      char buf[32];
      for (std::size_t i = 0; i < feature.coefficients.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", feature.coefficients[i]);
        json += buf;
        if (i + 1 < feature.coefficients.size()) json += ", ";
      }
      json += "]\n";
      write_text(feat_out, json);
      std::printf("wrote %zu coefficients to %s\n", feature.coefficients.size(),
                  feat_out.c_str());
      return 0;
    }

    if (*enroll) {
      const auto ds = dataset::load_dataset(en_in);
      const auto gallery_ids = split_list(en_gallery);
      for (const auto& id : gallery_ids) {
        if (id == en_subject) {
          throw std::runtime_error("gallery must exclude the enrolling subject");
        }
      }
      const auto stats = gallery_stats(ds, gallery_ids, fcfg);

      std::vector<int> trials;
      for (int t = 0; t < ds.config.enroll_scans; ++t) trials.push_back(t);
      const auto scans = load_subject_scans(ds, en_subject, trials);

      const auto& code = ecc::BchCode::by_name(en_ecc);
      keygen::EnrollOptions opts;
      opts.key_length = code.n();
      opts.renyi_alpha = en_alpha;
      opts.projection_seed =
          en_seed_set ? en_seed : derive_seed(ds.config.seed, std::hash<std::string>{}(en_subject));
      const auto result = keygen::enroll(scans, stats, opts, fcfg);

      write_file(en_key_out, pack_bits_lsb(result.key.bits));
      write_file(en_helper_out, result.helper.serialize());
      if (!en_store.empty()) {
        protocol::CredentialStore store(en_store);
        const auto now = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::seconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
        store.put({en_subject, result.key, en_ecc, now});
      }
      std::printf("enrolled %s: key %zu bits, %zu retained dimensions\n", en_subject.c_str(),
                  result.key.length(), popcount_bits(result.helper.mask));
      return 0;
    }

    if (*auth) {
      const auto ds = dataset::load_dataset(au_in);
      const auto helper_bytes = read_file(au_helper);
      const auto helper = keygen::HelperData::deserialize(helper_bytes);

      std::vector<int> trials;
      if (au_scans.empty()) {
        trials = {ds.config.enroll_scans, ds.config.enroll_scans + 1};
      } else {
        trials = split_int_list(au_scans);
      }
      const auto scans = load_subject_scans(ds, au_subject, trials);

      const auto& code = ecc::BchCode::by_name(au_ecc);
      RandomStream rng(au_seed_set ? au_seed : std::random_device{}());
      const auto msg = protocol::earbud_auth_session(scans, helper, fcfg, code, rng, au_subject);
      const auto wire = protocol::serialize(msg);
      protocol::CredentialStore store(au_store);
      const auto outcome = protocol::verifier_session(wire, store);
      if (outcome.decision == protocol::AuthDecision::Accept) {
        std::printf("ACCEPT %s\n", au_subject.c_str());
        return 0;
      }
      std::printf("REJECT %s (%s)\n", au_subject.c_str(), outcome.diagnostic.c_str());
      return 1;
    }

    if (*eval) {
      const auto ds = dataset::load_dataset(ev_in);
      ev_cfg.ecc_name = ev_ecc;
      const auto report = harness::evaluate(ds, ev_cfg, fcfg);
      const auto json = harness::to_json_string(report);
      if (!ev_json.empty()) write_text(ev_json, json);
      std::printf("ecc=%s trials=%d  FRR=%.4f FAR=%.4f EER=%.4f BAC=%.4f  (threshold %d bits)\n",
                  report.ecc_name.c_str(), report.trials, report.rates.frr, report.rates.far,
                  report.rates.eer, report.rates.bac, report.rates.threshold_bits);
      std::printf("genuine BER mode=%.4f  bit balance=%.4f  inter-user distance=%.4f\n",
                  report.genuine_ber_mode, report.key_bit_balance,
                  report.mean_inter_user_distance);
      if (ev_strict && (report.rates.bac < 0.97 || report.rates.far > 0.02)) {
        std::fprintf(stderr, "strict: accuracy targets missed\n");
        return 2;
      }
      return 0;
    }

    if (*attack) {
      const auto ds = dataset::load_dataset(at_in);
      at_cfg.ecc_name = at_ecc;
      const auto report = harness::attack_suite(ds, at_cfg, fcfg);
      const auto json = harness::to_json_string(report);
      if (!at_json.empty()) write_text(at_json, json);
      std::printf("P-ASR=%.4f S-ASR=%.4f U-ASR=%.4f K-ASR=%.4f FT=%.4f\n",
                  report.passive.rate(), report.synthetic.rate(), report.universal.rate(),
                  report.key_guessing.rate(), report.false_trigger.rate());
      const double worst =
          std::max({report.passive.rate(), report.synthetic.rate(), report.universal.rate(),
                    report.key_guessing.rate()});
      if (at_strict && (worst > 0.02 || report.false_trigger.rate() > 0.005)) {
        std::fprintf(stderr, "strict: attack targets missed\n");
        return 2;
      }
      return 0;
    }

    if (*drift) {
      const auto ds = dataset::load_dataset(dr_in);
      dr_cfg.ecc_name = dr_ecc;
      if (dr_mode == "day") {
        dr_cfg.day_mode = true;
      } else if (dr_mode == "session") {
        dr_cfg.day_mode = false;
      } else {
        throw std::runtime_error("--mode must be day or session");
      }
      const auto report = harness::drift_eval(ds, dr_cfg, fcfg);
      if (!dr_json.empty()) write_text(dr_json, harness::to_json_string(report));
      std::printf("%-8s %10s %10s %10s %10s %8s\n", "period", "gen-min", "gen-mean", "gen-max",
                  "pas-min", "under-t");
      for (const auto& p : report.periods) {
        std::printf("%-8d %10.1f %10.1f %10.1f %10.1f %7.1f%%\n", p.period, p.genuine_min_bits,
                    p.genuine_mean_bits, p.genuine_max_bits, p.passive_min_bits,
                    100.0 * p.frac_under_threshold);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "earid: %s\n", e.what());
    return 1;
  }
  return 0;
}
