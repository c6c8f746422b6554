#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "earid/bch.hpp"
#include "earid/keygen.hpp"
#include "earid/sha256.hpp"

namespace earid::protocol {

// C = Enc(R) xor K_auth plus SHA-256 of R; the only authentication-phase
// payload besides type tags. R itself never goes on the wire.
struct Commitment {
  BitVec c_bits;
  Digest32 secret_hash{};
};

struct CommitResult {
  Commitment commitment;
  BitVec secret;  // R, exposed for test introspection only
};

// Fresh k-bit secret from rng, encoded and xored with the key. The hash
// covers R packed LSB-first into ceil(k/8) bytes.
CommitResult commit(const keygen::BiometricKey& key, const ecc::BchCode& code,
                    RandomStream& rng);

enum class AuthDecision : std::uint8_t { Reject = 0, Accept = 1 };

// Accept iff decoding succeeds and SHA-256(R') matches; equivalently the
// two keys are within t bits (miscorrections are caught by the hash).
AuthDecision verify(const Commitment& commitment, const keygen::BiometricKey& enrolled_key,
                    const ecc::BchCode& code);

enum class MessageType : std::uint8_t {
  EnrollFeatures = 1,
  HelperData = 2,
  AuthCommit = 3,
  AuthResult = 4,
};

struct ProtocolMessage {
  MessageType type = MessageType::AuthResult;
  std::vector<std::uint8_t> payload;
};

// Wire format: magic "EID1", type u8, payload_len u32 LE, payload.
std::vector<std::uint8_t> serialize(const ProtocolMessage& msg);
std::optional<ProtocolMessage> parse_message(std::span<const std::uint8_t> wire);

// Typed payloads.
struct EnrollFeaturesPayload {
  std::string user_id;
  std::vector<float> coefficients;
};
std::vector<std::uint8_t> encode_enroll_features(const EnrollFeaturesPayload& p);
std::optional<EnrollFeaturesPayload> decode_enroll_features(std::span<const std::uint8_t> payload);

struct AuthCommitPayload {
  std::string user_id;
  std::string ecc_name;
  Commitment commitment;
};
std::vector<std::uint8_t> encode_auth_commit(const AuthCommitPayload& p);
std::optional<AuthCommitPayload> decode_auth_commit(std::span<const std::uint8_t> payload);

std::vector<std::uint8_t> encode_auth_result(AuthDecision d);
std::optional<AuthDecision> decode_auth_result(std::span<const std::uint8_t> payload);

struct EnrolledCredential {
  std::string user_id;
  keygen::BiometricKey key;
  std::string ecc_name;
  std::uint64_t created_unix = 0;
};

// One binary file per user under a directory; writes are atomic
// (temp file + rename), last writer wins.
class CredentialStore {
 public:
  explicit CredentialStore(std::filesystem::path dir);
  void put(const EnrolledCredential& credential);
  std::optional<EnrolledCredential> get(const std::string& user_id) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& user_id) const;
  std::filesystem::path dir_;
};

// Earbud side of an authentication: regenerate the key from fresh scans and
// wrap the commitment into an AUTH_COMMIT message. No raw scan or feature
// data appears in the output.
ProtocolMessage earbud_auth_session(const std::vector<synth::EcsScan>& scans,
                                    const keygen::HelperData& helper,
                                    const features::FeatureConfig& cfg, const ecc::BchCode& code,
                                    RandomStream& rng, const std::string& user_id);

// Same, from an already extracted key (used by the evaluation harness,
// which computes keys once for both the protocol and the BER bookkeeping).
ProtocolMessage auth_commit_message(const keygen::BiometricKey& key, const ecc::BchCode& code,
                                    RandomStream& rng, const std::string& user_id);

struct AuthOutcome {
  AuthDecision decision = AuthDecision::Reject;
  std::string diagnostic;  // empty on Accept; reason string on Reject
  ProtocolMessage response;
};

// Verifier side: parse an AUTH_COMMIT wire blob, look up the credential and
// run the decommitment. Every failure mode maps to Reject; the outcome
// carries no distance information beyond the single decision bit.
AuthOutcome verifier_session(std::span<const std::uint8_t> wire, const CredentialStore& store);
AuthOutcome verifier_session(std::span<const std::uint8_t> wire,
                             const EnrolledCredential& credential);

// Earbud side of enrollment over a trusted channel: one ENROLL_FEATURES
// message per scan (the mobile needs per-scan features to estimate the
// user's distribution) followed by one carrying the session aggregate.
std::vector<ProtocolMessage> earbud_enroll_session(const std::vector<synth::EcsScan>& scans,
                                                   const features::FeatureConfig& cfg,
                                                   const std::string& user_id);

struct EnrollSessionResult {
  EnrolledCredential credential;
  ProtocolMessage helper_message;  // HELPER_DATA, returned to the earbud
};

// Verifier side of enrollment: consumes the message sequence above, runs
// key extraction against the gallery statistics, stores the credential and
// returns the serialized helper data. Refuses to run unless the caller
// asserts the trusted-channel assumption.
EnrollSessionResult verifier_enroll_session(const std::vector<ProtocolMessage>& messages,
                                            const keygen::PopulationStats& stats,
                                            const keygen::EnrollOptions& opts,
                                            const features::FeatureConfig& cfg,
                                            const ecc::BchCode& code, CredentialStore& store,
                                            bool trusted_channel);

}  // namespace earid::protocol
