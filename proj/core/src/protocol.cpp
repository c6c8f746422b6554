#include "earid/protocol.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace earid::protocol {

namespace {

constexpr std::uint8_t kMagic[4] = {'E', 'I', 'D', '1'};
constexpr std::uint8_t kCredentialMagic[4] = {'E', 'I', 'D', 'C'};

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void append_f32(std::vector<std::uint8_t>& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  append_u32(out, bits);
}

bool append_id_block(std::vector<std::uint8_t>& out, const std::string& id) {
  if (id.empty() || id.size() > 255) return false;
  out.push_back(static_cast<std::uint8_t>(id.size()));
  out.insert(out.end(), id.begin(), id.end());
  return true;
}

struct Reader {
  std::span<const std::uint8_t> data;
  std::size_t at = 0;

  bool need(std::size_t n) const { return at + n <= data.size(); }
  std::uint8_t u8() { return data[at++]; }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data[at + i]) << (8 * i);
    at += 4;
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data[at + i]) << (8 * i);
    at += 8;
    return v;
  }
  float f32() {
    const std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  std::string str(std::size_t n) {
    std::string s(reinterpret_cast<const char*>(data.data() + at), n);
    at += n;
    return s;
  }
};

}  // namespace

CommitResult commit(const keygen::BiometricKey& key, const ecc::BchCode& code,
                    RandomStream& rng) {
  if (key.length() != code.n()) {
    throw std::invalid_argument("commit: key length does not match the code length");
  }
  CommitResult out;
  out.secret.resize(code.k());
  for (std::size_t i = 0; i < code.k(); ++i) {
    out.secret[i] = static_cast<std::uint8_t>(rng.next_u64() & 1u);
  }
  const auto codeword = code.encode(out.secret);
  out.commitment.c_bits = xor_bits(codeword, key.bits);
  const auto packed = pack_bits_lsb(out.secret);
  out.commitment.secret_hash = sha256(packed);
  return out;
}

AuthDecision verify(const Commitment& commitment, const keygen::BiometricKey& enrolled_key,
                    const ecc::BchCode& code) {
  if (commitment.c_bits.size() != code.n() || enrolled_key.length() != code.n()) {
    return AuthDecision::Reject;
  }
  const auto noisy = xor_bits(commitment.c_bits, enrolled_key.bits);
  const auto secret = code.decode(noisy);
  if (!secret) return AuthDecision::Reject;
  const auto packed = pack_bits_lsb(*secret);
  return sha256(packed) == commitment.secret_hash ? AuthDecision::Accept : AuthDecision::Reject;
}

std::vector<std::uint8_t> serialize(const ProtocolMessage& msg) {
  std::vector<std::uint8_t> out;
  out.reserve(9 + msg.payload.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(static_cast<std::uint8_t>(msg.type));
  append_u32(out, static_cast<std::uint32_t>(msg.payload.size()));
  out.insert(out.end(), msg.payload.begin(), msg.payload.end());
  return out;
}

std::optional<ProtocolMessage> parse_message(std::span<const std::uint8_t> wire) {
  if (wire.size() < 9) return std::nullopt;
  if (std::memcmp(wire.data(), kMagic, 4) != 0) return std::nullopt;
  const std::uint8_t type = wire[4];
  if (type < 1 || type > 4) return std::nullopt;
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(wire[5 + i]) << (8 * i);
  if (wire.size() != 9 + static_cast<std::size_t>(len)) return std::nullopt;
  ProtocolMessage msg;
  msg.type = static_cast<MessageType>(type);
  msg.payload.assign(wire.begin() + 9, wire.end());
  return msg;
}

std::vector<std::uint8_t> encode_enroll_features(const EnrollFeaturesPayload& p) {
  std::vector<std::uint8_t> out;
  if (!append_id_block(out, p.user_id)) {
    throw std::invalid_argument("encode_enroll_features: bad user id");
  }
  if (p.coefficients.size() > 0xffff) {
    throw std::invalid_argument("encode_enroll_features: too many coefficients");
  }
  out.push_back(static_cast<std::uint8_t>(p.coefficients.size() & 0xff));
  out.push_back(static_cast<std::uint8_t>(p.coefficients.size() >> 8));
  for (float c : p.coefficients) append_f32(out, c);
  return out;
}

std::optional<EnrollFeaturesPayload> decode_enroll_features(
    std::span<const std::uint8_t> payload) {
  Reader r{payload};
  if (!r.need(1)) return std::nullopt;
  const std::size_t id_len = r.u8();
  if (id_len == 0 || !r.need(id_len + 2)) return std::nullopt;
  EnrollFeaturesPayload p;
  p.user_id = r.str(id_len);
  const std::size_t d_lo = r.u8();
  const std::size_t d_hi = r.u8();
  const std::size_t d = d_lo | (d_hi << 8);
  if (!r.need(d * 4) || r.at + d * 4 != payload.size()) return std::nullopt;
  p.coefficients.resize(d);
  for (auto& c : p.coefficients) c = r.f32();
  return p;
}

std::vector<std::uint8_t> encode_auth_commit(const AuthCommitPayload& p) {
  std::vector<std::uint8_t> out;
  if (!append_id_block(out, p.user_id)) {
    throw std::invalid_argument("encode_auth_commit: bad user id");
  }
  if (p.ecc_name.empty() || p.ecc_name.size() > 255) {
    throw std::invalid_argument("encode_auth_commit: bad ecc name");
  }
  out.push_back(static_cast<std::uint8_t>(p.ecc_name.size()));
  out.insert(out.end(), p.ecc_name.begin(), p.ecc_name.end());
  const auto packed = pack_bits_lsb(p.commitment.c_bits);
  out.insert(out.end(), packed.begin(), packed.end());
  out.insert(out.end(), p.commitment.secret_hash.begin(), p.commitment.secret_hash.end());
  return out;
}

std::optional<AuthCommitPayload> decode_auth_commit(std::span<const std::uint8_t> payload) {
  Reader r{payload};
  if (!r.need(1)) return std::nullopt;
  const std::size_t id_len = r.u8();
  if (id_len == 0 || !r.need(id_len + 1)) return std::nullopt;
  AuthCommitPayload p;
  p.user_id = r.str(id_len);
  const std::size_t name_len = r.u8();
  if (name_len == 0 || !r.need(name_len)) return std::nullopt;
  p.ecc_name = r.str(name_len);

  std::size_t n = 0;
  try {
    n = ecc::BchCode::by_name(p.ecc_name).n();
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
  const std::size_t c_bytes = (n + 7) / 8;
  if (!r.need(c_bytes + 32) || r.at + c_bytes + 32 != payload.size()) return std::nullopt;
  p.commitment.c_bits = unpack_bits_lsb(payload.subspan(r.at, c_bytes), n);
  r.at += c_bytes;
  std::memcpy(p.commitment.secret_hash.data(), payload.data() + r.at, 32);
  return p;
}

std::vector<std::uint8_t> encode_auth_result(AuthDecision d) {
  return {static_cast<std::uint8_t>(d)};
}

std::optional<AuthDecision> decode_auth_result(std::span<const std::uint8_t> payload) {
  if (payload.size() != 1 || payload[0] > 1) return std::nullopt;
  return static_cast<AuthDecision>(payload[0]);
}

CredentialStore::CredentialStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path CredentialStore::path_for(const std::string& user_id) const {
  std::string safe;
  for (char c : user_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '-' || c == '_';
    safe.push_back(ok ? c : '_');
  }
  return dir_ / (safe + ".cred");
}

void CredentialStore::put(const EnrolledCredential& credential) {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), std::begin(kCredentialMagic), std::end(kCredentialMagic));
  out.push_back(1);  // version
  if (!append_id_block(out, credential.user_id)) {
    throw std::invalid_argument("CredentialStore::put: bad user id");
  }
  out.push_back(static_cast<std::uint8_t>(credential.ecc_name.size()));
  out.insert(out.end(), credential.ecc_name.begin(), credential.ecc_name.end());
  const std::uint16_t n = static_cast<std::uint16_t>(credential.key.length());
  out.push_back(static_cast<std::uint8_t>(n & 0xff));
  out.push_back(static_cast<std::uint8_t>(n >> 8));
  const auto packed = pack_bits_lsb(credential.key.bits);
  out.insert(out.end(), packed.begin(), packed.end());
  append_u64(out, credential.created_unix);

  const auto path = path_for(credential.user_id);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("CredentialStore::put: cannot open " + tmp);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw std::runtime_error("CredentialStore::put: write failed");
  }
  std::filesystem::rename(tmp, path);
}

std::optional<EnrolledCredential> CredentialStore::get(const std::string& user_id) const {
  const auto path = path_for(user_id);
  std::ifstream f(path, std::ios::binary);
  if (!f) return std::nullopt;
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  Reader r{bytes};
  if (!r.need(5) || std::memcmp(bytes.data(), kCredentialMagic, 4) != 0) return std::nullopt;
  r.at = 4;
  if (r.u8() != 1) return std::nullopt;
  if (!r.need(1)) return std::nullopt;
  const std::size_t id_len = r.u8();
  if (!r.need(id_len + 1)) return std::nullopt;
  EnrolledCredential cred;
  cred.user_id = r.str(id_len);
  const std::size_t name_len = r.u8();
  if (!r.need(name_len + 2)) return std::nullopt;
  cred.ecc_name = r.str(name_len);
  const std::size_t n_lo = r.u8();
  const std::size_t n_hi = r.u8();
  const std::size_t n = n_lo | (n_hi << 8);
  const std::size_t key_bytes = (n + 7) / 8;
  if (!r.need(key_bytes + 8)) return std::nullopt;
  cred.key.bits = unpack_bits_lsb(std::span(bytes).subspan(r.at, key_bytes), n);
  r.at += key_bytes;
  cred.created_unix = r.u64();
  return cred;
}

ProtocolMessage auth_commit_message(const keygen::BiometricKey& key, const ecc::BchCode& code,
                                    RandomStream& rng, const std::string& user_id) {
  AuthCommitPayload payload;
  payload.user_id = user_id;
  payload.ecc_name = code.name();
  payload.commitment = commit(key, code, rng).commitment;
  return ProtocolMessage{MessageType::AuthCommit, encode_auth_commit(payload)};
}

ProtocolMessage earbud_auth_session(const std::vector<synth::EcsScan>& scans,
                                    const keygen::HelperData& helper,
                                    const features::FeatureConfig& cfg, const ecc::BchCode& code,
                                    RandomStream& rng, const std::string& user_id) {
  const auto key = keygen::extract_key(scans, helper, cfg);
  return auth_commit_message(key, code, rng, user_id);
}

namespace {

AuthOutcome reject(std::string why) {
  AuthOutcome out;
  out.decision = AuthDecision::Reject;
  out.diagnostic = std::move(why);
  out.response = ProtocolMessage{MessageType::AuthResult, encode_auth_result(AuthDecision::Reject)};
  return out;
}

}  // namespace

AuthOutcome verifier_session(std::span<const std::uint8_t> wire,
                             const EnrolledCredential& credential) {
  const auto msg = parse_message(wire);
  if (!msg || msg->type != MessageType::AuthCommit) return reject("malformed message");
  const auto payload = decode_auth_commit(msg->payload);
  if (!payload) return reject("malformed AUTH_COMMIT payload");
  if (payload->user_id != credential.user_id) return reject("unknown user");
  if (payload->ecc_name != credential.ecc_name) return reject("ecc config mismatch");

  const auto& code = ecc::BchCode::by_name(payload->ecc_name);
  const AuthDecision d = verify(payload->commitment, credential.key, code);
  AuthOutcome out;
  out.decision = d;
  if (d == AuthDecision::Reject) out.diagnostic = "decommitment failed";
  out.response = ProtocolMessage{MessageType::AuthResult, encode_auth_result(d)};
  return out;
}

AuthOutcome verifier_session(std::span<const std::uint8_t> wire, const CredentialStore& store) {
  const auto msg = parse_message(wire);
  if (!msg || msg->type != MessageType::AuthCommit) return reject("malformed message");
  const auto payload = decode_auth_commit(msg->payload);
  if (!payload) return reject("malformed AUTH_COMMIT payload");
  const auto credential = store.get(payload->user_id);
  if (!credential) return reject("no credential for user");
  return verifier_session(wire, *credential);
}

std::vector<ProtocolMessage> earbud_enroll_session(const std::vector<synth::EcsScan>& scans,
                                                   const features::FeatureConfig& cfg,
                                                   const std::string& user_id) {
  if (scans.size() < 2) {
    throw std::invalid_argument("earbud_enroll_session: need at least 2 scans");
  }
  std::vector<ProtocolMessage> out;
  out.reserve(scans.size() + 1);
  auto push_feature = [&](const features::CepstrumFeature& f) {
    EnrollFeaturesPayload p;
    p.user_id = user_id;
    p.coefficients.assign(f.coefficients.begin(), f.coefficients.end());
    out.push_back(ProtocolMessage{MessageType::EnrollFeatures, encode_enroll_features(p)});
  };
  for (const auto& scan : scans) push_feature(features::extract_features({scan}, cfg));
  push_feature(features::extract_features(scans, cfg));
  return out;
}

EnrollSessionResult verifier_enroll_session(const std::vector<ProtocolMessage>& messages,
                                            const keygen::PopulationStats& stats,
                                            const keygen::EnrollOptions& opts,
                                            const features::FeatureConfig& cfg,
                                            const ecc::BchCode& code, CredentialStore& store,
                                            bool trusted_channel) {
  if (!trusted_channel) {
    throw std::logic_error(
        "verifier_enroll_session: enrollment transmits raw features and requires the "
        "trusted-channel assumption");
  }
  if (messages.size() < 3) {
    throw std::invalid_argument("verifier_enroll_session: insufficient enrollment messages");
  }
  std::vector<features::CepstrumFeature> per_scan;
  std::string user_id;
  for (const auto& msg : messages) {
    if (msg.type != MessageType::EnrollFeatures) {
      throw std::invalid_argument("verifier_enroll_session: unexpected message type");
    }
    const auto p = decode_enroll_features(msg.payload);
    if (!p) throw std::invalid_argument("verifier_enroll_session: malformed ENROLL_FEATURES");
    if (user_id.empty()) {
      user_id = p->user_id;
    } else if (user_id != p->user_id) {
      throw std::invalid_argument("verifier_enroll_session: mixed user ids");
    }
    features::CepstrumFeature f;
    f.max_tof = cfg.max_tof;
    f.coefficients.assign(p->coefficients.begin(), p->coefficients.end());
    per_scan.push_back(std::move(f));
  }
  // Last message carries the session aggregate.
  const features::CepstrumFeature aggregate = per_scan.back();
  per_scan.pop_back();

  auto enrolled = keygen::enroll_from_features(per_scan, aggregate, stats, opts, cfg);
  if (enrolled.key.length() != code.n()) {
    throw std::invalid_argument("verifier_enroll_session: key length does not match the code");
  }

  EnrollSessionResult result;
  result.credential.user_id = user_id;
  result.credential.key = enrolled.key;
  result.credential.ecc_name = code.name();
  result.credential.created_unix = 0;
  store.put(result.credential);
  result.helper_message =
      ProtocolMessage{MessageType::HelperData, enrolled.helper.serialize()};
  return result;
}

}  // namespace earid::protocol
