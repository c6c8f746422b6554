#include <benchmark/benchmark.h>

#include <vector>

#include "earid/bch.hpp"
#include "earid/features.hpp"
#include "earid/keygen.hpp"
#include "earid/protocol.hpp"
#include "earid/synth.hpp"

using namespace earid;

namespace {

std::vector<std::vector<double>> sample_responses(int count) {
  const auto exc = synth::gen_excitation(synth::ExcitationKind::Chirp, 48000, 0.25, 20, 20000);
  const auto profile = synth::synth_subject(1, 0);
  std::vector<std::vector<double>> out;
  for (int i = 0; i < count; ++i) {
    RandomStream rng(derive_seed(1, static_cast<std::uint64_t>(i)));
    const auto scan =
        synth::simulate_scan(profile, exc, synth::NoiseCondition::Quiet, 1.0, rng);
    out.push_back(synth::estimate_channel(exc.samples, scan.recorded));
  }
  return out;
}

void BM_ExtractFeatures(benchmark::State& state) {
  const auto responses = sample_responses(2);
  const features::FeatureConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(features::extract_features_from_responses(responses, cfg));
  }
}
BENCHMARK(BM_ExtractFeatures);

void BM_ProjectAndBinarize(benchmark::State& state) {
  RandomStream rng(7);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = rng.next_normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(keygen::project_and_binarize(x, 42, 255));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProjectAndBinarize)->Arg(32)->Arg(64)->Arg(128)->Complexity();

void BM_BchEncode(benchmark::State& state) {
  const auto& code = ecc::BchCode::bch255();
  RandomStream rng(8);
  BitVec message(code.k());
  for (auto& b : message) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(code.encode(message));
  }
}
BENCHMARK(BM_BchEncode);

void BM_BchDecodeAtT(benchmark::State& state) {
  const auto& code = ecc::BchCode::bch255();
  RandomStream rng(9);
  BitVec message(code.k());
  for (auto& b : message) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
  auto received = code.encode(message);
  for (std::size_t i = 0; i < code.t(); ++i) received[i * 13] ^= 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(code.decode(received));
  }
}
BENCHMARK(BM_BchDecodeAtT);

void BM_CommitVerify(benchmark::State& state) {
  const auto& code = ecc::BchCode::bch255();
  RandomStream rng(10);
  keygen::BiometricKey key;
  key.bits.resize(code.n());
  for (auto& b : key.bits) b = static_cast<std::uint8_t>(rng.next_u64() & 1);
  for (auto _ : state) {
    const auto result = protocol::commit(key, code, rng);
    benchmark::DoNotOptimize(protocol::verify(result.commitment, key, code));
  }
}
BENCHMARK(BM_CommitVerify);

}  // namespace

BENCHMARK_MAIN();
