#include "zkeval/challenge.hpp"

#include <cmath>
#include <random>

#include "zkeval/errors.hpp"
#include "zkeval/quantized.hpp"
#include "zkeval/witness.hpp"

namespace zkeval {

using nlohmann::json;

namespace {

constexpr uint32_t kResponseMagic = 0x52434b5a;  // "ZKCR"
constexpr uint32_t kResponseVersion = 1;

std::vector<double> decode_all(std::span<const Fe> y, int scale) {
  std::vector<double> out;
  for (auto v : y) out.push_back(decode(v, FixedPointCodec{scale}));
  return out;
}

std::vector<Fe> encode_inputs(const std::vector<Tensor>& x, int scale) {
  std::vector<Fe> out;
  for (const auto& t : x)
    for (double v : t.data) out.push_back(Fe::from_signed(encode_raw(v, scale)));
  return out;
}

}  // namespace

json ChallengeRequest::to_json() const {
  json xs = json::array();
  for (const auto& t : x_star) xs.push_back(tensor_to_json(t));
  return {{"format", "zkeval-challenge/1"}, {"x_star", xs},           {"y_star", y_star},
          {"tolerance", tolerance},         {"nonce", nonce},         {"vk_digest", to_hex(vk_digest)},
          {"weight_hash", to_hex(weight_hash)}};
}

ChallengeRequest ChallengeRequest::from_json(const json& j) {
  try {
    if (j.at("format") != "zkeval-challenge/1") throw SchemaError("unsupported challenge format");
    ChallengeRequest r;
    for (const auto& t : j.at("x_star")) r.x_star.push_back(tensor_from_json(t));
    r.y_star = j.at("y_star").get<std::vector<double>>();
    r.tolerance = j.at("tolerance").get<double>();
    r.nonce = j.at("nonce").get<std::string>();
    r.vk_digest = digest_from_hex(j.at("vk_digest").get<std::string>());
    r.weight_hash = digest_from_hex(j.at("weight_hash").get<std::string>());
    if (!(r.tolerance >= 0.0)) throw SchemaError("tolerance must be non-negative");
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad challenge request: ") + e.what());
  }
}

ChallengeRequest make_challenge(const VerificationKey& vk, std::vector<Tensor> x_star, std::vector<double> y_star,
                                double tolerance, std::string nonce) {
  if (!(tolerance >= 0.0)) throw InvalidArgument("tolerance must be non-negative");
  ChallengeRequest r;
  r.x_star = std::move(x_star);
  r.y_star = std::move(y_star);
  r.tolerance = tolerance;
  if (nonce.empty()) {
    std::random_device rd;
    Bytes b(16);
    for (auto& x : b) x = static_cast<uint8_t>(rd());
    nonce = to_hex(b);
  }
  r.nonce = std::move(nonce);
  r.vk_digest = vk.digest();
  r.weight_hash = vk.weight_hash;
  return r;
}

Bytes ChallengeResponse::serialize() const {
  ByteWriter w;
  w.u32(kResponseMagic);
  w.u32(kResponseVersion);
  w.str(nonce);
  w.raw(weight_hash);
  w.u64(y_tilde.size());
  for (auto v : y_tilde) w.fe(v);
  w.blob(proof);
  return w.take();
}

ChallengeResponse ChallengeResponse::deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u32() != kResponseMagic) throw FormatError("not a challenge response");
  if (r.u32() != kResponseVersion) throw FormatError("unsupported challenge response version");
  ChallengeResponse c;
  c.nonce = r.str();
  auto h = r.raw(32);
  std::copy(h.begin(), h.end(), c.weight_hash.begin());
  c.y_tilde.resize(r.count(8));
  for (auto& v : c.y_tilde) v = r.fe();
  auto p = r.blob();
  c.proof.assign(p.begin(), p.end());
  r.expect_end();
  return c;
}

ChallengeResponse respond(const ProvingKey& pk, const ChallengeRequest& req, const ProveOptions& opts) {
  const ConstraintSystem& cs = pk.cs;
  Witness w = make_witness(cs, pk.vk.circuit_digest, pk.weights, pk.vk.weight_hash,
                           instance_for(cs, req.x_star, pk.vk.weight_hash));
  auto y = w.y_tilde(cs);
  std::vector<double> decoded = decode_all(y, cs.scale);
  if (decoded.size() != req.y_star.size())
    throw ChallengeFailure("claimed output has " + std::to_string(req.y_star.size()) + " values, model produces " +
                           std::to_string(decoded.size()));
  double err = relative_error(decoded, req.y_star);
  if (err > req.tolerance)
    throw ChallengeFailure("cannot reproduce y* within tolerance (relative error " + std::to_string(err) + ")");
  ChallengeResponse r;
  r.nonce = req.nonce;
  r.weight_hash = pk.vk.weight_hash;
  r.y_tilde.assign(y.begin(), y.end());
  r.proof = prove(pk, w, opts).serialize();
  return r;
}

json Verdict::to_json() const {
  return {{"verdict", pass ? "pass" : "fail"}, {"reason", reason}, {"detail", detail}, {"observed_error", observed_error}};
}

Verdict adjudicate(const VerificationKey& vk, const ChallengeRequest& req, const ChallengeResponse& resp) {
  Verdict v;
  auto fail = [&](const char* reason, std::string detail) {
    v.pass = false;
    v.reason = reason;
    v.detail = std::move(detail);
    return v;
  };
  if (resp.weight_hash != vk.weight_hash || req.weight_hash != vk.weight_hash)
    return fail("hash_mismatch", "response H(W) " + to_hex(resp.weight_hash) + " is not the attested model's");
  if (req.vk_digest != vk.digest()) return fail("reference_mismatch", "request names a different verification key");

  std::vector<Fe> x;
  try {
    x = encode_inputs(req.x_star, vk.scale);
  } catch (const Error& e) {
    return fail("invalid_proof", e.what());
  }
  auto r = verify(vk, resp.proof, x, resp.y_tilde);
  if (!r) return fail("invalid_proof", r.reason + ": " + r.detail);

  std::vector<double> decoded = decode_all(resp.y_tilde, vk.scale);
  if (decoded.size() != req.y_star.size()) return fail("tolerance", "output width differs from y*");
  v.observed_error = relative_error(decoded, req.y_star);
  if (!(v.observed_error <= req.tolerance))
    return fail("tolerance", "relative error " + std::to_string(v.observed_error) + " exceeds " +
                                 std::to_string(req.tolerance));
  if (resp.nonce != req.nonce) return fail("nonce_mismatch", "response answers another challenge");
  v.pass = true;
  return v;
}

// ---- audits ----

void AuditPolicy::validate() const {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("audit probability must be in (0, 1]");
  if (!(cost >= 0.0)) throw InvalidArgument("proof cost must be non-negative");
}

std::vector<bool> schedule_audits(uint64_t n, const AuditPolicy& policy, uint64_t seed) {
  policy.validate();
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution audit(policy.p);
  std::vector<bool> out(n);
  for (uint64_t i = 0; i < n; ++i) out[i] = audit(rng);
  return out;
}

json CostBalance::to_json() const {
  return {{"user_cost", user_cost},
          {"reward", reward},
          {"expected_audits", expected_audits},
          {"audits_repaid_per_catch", audits_repaid_per_catch}};
}

CostBalance expected_cost_balance(const AuditPolicy& policy, uint64_t n) {
  policy.validate();
  CostBalance b;
  b.expected_audits = policy.p * static_cast<double>(n);
  b.user_cost = b.expected_audits * policy.cost;
  b.reward = policy.reward();
  b.audits_repaid_per_catch = 1.0 / policy.p;
  return b;
}

double detection_probability(double p, double f, uint64_t n) {
  if (!(p >= 0 && p <= 1 && f >= 0 && f <= 1)) throw InvalidArgument("probabilities must be in [0, 1]");
  return 1.0 - std::pow(1.0 - p * f, static_cast<double>(n));
}

double simulate_detection(double p, double f, uint64_t n, uint64_t trials, uint64_t seed) {
  if (trials == 0) throw InvalidArgument("need at least one trial");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution audited(p), cheated(f);
  uint64_t caught = 0;
  for (uint64_t t = 0; t < trials; ++t) {
    for (uint64_t i = 0; i < n; ++i) {
      bool c = cheated(rng);
      bool a = audited(rng);
      if (c && a) {
        ++caught;
        break;
      }
    }
  }
  return static_cast<double>(caught) / static_cast<double>(trials);
}

}  // namespace zkeval
