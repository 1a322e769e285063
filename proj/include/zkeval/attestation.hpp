#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zkeval/circuit.hpp"
#include "zkeval/prover.hpp"

namespace zkeval {

enum class TaskKind { kClassification, kRegression };
enum class MetricKind { kAccuracy, kMeanAbsError, kConfusionMatrix };

const char* task_name(TaskKind t);
TaskKind task_from_name(const std::string& s);
const char* metric_name(MetricKind m);
MetricKind metric_from_name(const std::string& s);

// Raw integer tolerance used for regression matches: |y~ - y| <= floor(tau * 2^s).
int64_t tolerance_raw(double tau, int scale);

// ---- naive bundle ----

struct BundleEntry {
  Bytes proof;  // kept as bytes so a damaged proof still loads
  std::vector<Fe> x_tilde;
  std::vector<Fe> y_tilde;
  std::vector<double> ground_truth;  // class index, or regression target(s)

  static BundleEntry from_proof(const VerificationKey& vk, const Proof& p, std::vector<double> ground_truth);
};

struct BundleManifest {
  std::string dataset_id;
  Digest dataset_digest{};
  Digest weight_hash{};
  TaskKind task = TaskKind::kClassification;
  int scale = 0;
  double tolerance = 0.0;  // regression only
  int64_t created_unix = 0;
  uint64_t count = 0;

  nlohmann::json to_json() const;
  static BundleManifest from_json(const nlohmann::json& j);
};

struct NaiveBundle {
  BundleManifest manifest;
  VerificationKey vk;
  std::vector<BundleEntry> entries;

  // Zip archive: manifest.json, vk.bin, proofs/NNNN.bin, publics/NNNN.json.
  Bytes serialize() const;
  static NaiveBundle deserialize(std::span<const uint8_t> archive);
};

// Throws InvalidArgument for an empty list, HashMismatch for a proof under a
// different H(W), InvalidProof for one that does not verify.
NaiveBundle build_bundle(const VerificationKey& vk, std::vector<BundleEntry> entries, BundleManifest manifest);

struct AggregateMetrics {
  uint64_t n = 0;
  uint64_t correct = 0;
  double accuracy = 0.0;
  double mean_abs_error = 0.0;  // regression only
  std::vector<std::vector<uint64_t>> confusion;  // [truth][predicted], classification only
};

// Classification: argmax of the exposed logits against the label.
// Regression: raw |y~ - y| against the tolerance; MAE over every element.
AggregateMetrics aggregate(TaskKind task, int scale, double tolerance, std::span<const std::vector<Fe>> y_tilde,
                           std::span<const std::vector<double>> ground_truth);

struct EntryStatus {
  uint64_t index = 0;
  bool ok = false;
  std::string reason;
  std::string detail;
};

struct BundleReport {
  std::vector<EntryStatus> entries;
  bool hash_constant = true;
  uint64_t n_valid = 0;
  bool invalid = false;  // any entry failed; metrics cover the valid subset only
  AggregateMetrics metrics;

  bool ok() const { return !invalid && hash_constant; }
  nlohmann::json to_json() const;
};

BundleReport verify_bundle(const NaiveBundle& b);

// ---- metric attestation ----

struct MetricSpec {
  MetricKind kind = MetricKind::kAccuracy;
  TaskKind task = TaskKind::kClassification;
  uint64_t n = 0;
  uint64_t classes = 0;      // classification
  int scale = 0;
  int64_t tolerance = 0;     // raw, regression
  int64_t bound = 0;         // raw bound on |y~ - y|, regression
  uint32_t lambda = 128;     // spot-check draws for the metric proof

  nlohmann::json to_json() const;
  static MetricSpec from_json(const nlohmann::json& j);
  void validate() const;
};

// Public inputs: labels | inner proof digest limbs | inner H(W) limbs |
// dataset digest limbs. Private: predicted classes (or raw outputs).
// Outputs: metric counts.
ConstraintSystem metric_circuit(const MetricSpec& spec);

struct MetricAttestation {
  MetricSpec spec;
  VerificationKey inner_vk;
  std::vector<Digest> inner_digests;
  Digest dataset_digest{};
  std::vector<double> labels;
  std::vector<uint64_t> counts;
  double value = 0.0;
  std::vector<std::vector<uint64_t>> confusion;
  Bytes proof;

  Bytes serialize() const;
  static MetricAttestation deserialize(std::span<const uint8_t> bytes);
  nlohmann::json sidecar() const;
};

struct MetricOptions {
  std::optional<TaskKind> task;  // inferred from the output width when absent
  double tolerance = 0.0;        // regression match tolerance (real units)
  Digest dataset_digest{};
  uint32_t lambda = 128;
  std::optional<Digest> seed;
};

// Verifies every inner proof natively before building the metric proof.
// `witnesses` may be empty; when given, their outputs must equal the proofs'.
MetricAttestation build_metric_attestation(const VerificationKey& vk, std::span<const Witness> witnesses,
                                           std::span<const Proof> proofs,
                                           std::span<const std::vector<double>> ground_truths, MetricKind metric,
                                           const MetricOptions& opts = {});

// Metric value implied by public counts.
double metric_value(const MetricSpec& spec, std::span<const uint64_t> counts);

VerifyResult verify_metric_attestation(const MetricAttestation& a, std::span<const Digest> expected_inner_digests);

}  // namespace zkeval
