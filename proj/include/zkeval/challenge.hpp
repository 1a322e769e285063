#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "zkeval/graph.hpp"
#include "zkeval/prover.hpp"

namespace zkeval {

struct ChallengeRequest {
  std::vector<Tensor> x_star;
  std::vector<double> y_star;  // claimed output, flattened
  double tolerance = 0.0;      // relative, on the infinity norm
  std::string nonce;
  Digest vk_digest{};          // reference vk
  Digest weight_hash{};        // H(W) the challenger expects

  nlohmann::json to_json() const;
  static ChallengeRequest from_json(const nlohmann::json& j);
};

// Fresh request for an observed (x*, y*) pair. The nonce is random unless given.
ChallengeRequest make_challenge(const VerificationKey& vk, std::vector<Tensor> x_star, std::vector<double> y_star,
                                double tolerance, std::string nonce = {});

struct ChallengeResponse {
  std::string nonce;
  Digest weight_hash{};
  std::vector<Fe> y_tilde;
  Bytes proof;

  Bytes serialize() const;
  static ChallengeResponse deserialize(std::span<const uint8_t> bytes);
};

// Throws ChallengeFailure when the provider's own output is not within the
// tolerance of y*.
ChallengeResponse respond(const ProvingKey& pk, const ChallengeRequest& req, const ProveOptions& opts = {});

struct Verdict {
  bool pass = false;
  std::string reason;  // hash_mismatch, reference_mismatch, invalid_proof, tolerance, nonce_mismatch
  std::string detail;
  double observed_error = 0.0;

  nlohmann::json to_json() const;
};

// Deterministic and pure.
Verdict adjudicate(const VerificationKey& vk, const ChallengeRequest& req, const ChallengeResponse& resp);

// ---- random audits ----

struct AuditPolicy {
  double p = 0.1;     // audit probability per inference
  double cost = 1.0;  // cost of one proof, abstract units
  double reward() const { return cost / p; }
  void validate() const;
};

// Bernoulli(p) decisions from a seeded generator.
std::vector<bool> schedule_audits(uint64_t n, const AuditPolicy& policy, uint64_t seed);

struct CostBalance {
  double user_cost = 0.0;        // p * n * c
  double reward = 0.0;           // c / p per caught failure
  double expected_audits = 0.0;  // p * n
  double audits_repaid_per_catch = 0.0;  // 1 / p
  nlohmann::json to_json() const;
};

CostBalance expected_cost_balance(const AuditPolicy& policy, uint64_t n);

// 1 - (1 - p f)^n: a provider cheating on fraction f of n inferences.
double detection_probability(double p, double f, uint64_t n);
// Monte Carlo estimate of the same quantity.
double simulate_detection(double p, double f, uint64_t n, uint64_t trials, uint64_t seed);

}  // namespace zkeval
