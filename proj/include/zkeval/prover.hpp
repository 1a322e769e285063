#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zkeval/circuit.hpp"
#include "zkeval/hash.hpp"
#include "zkeval/merkle.hpp"
#include "zkeval/witness.hpp"

// Reference backend: the trace is committed with salted Merkle trees and the
// verifier opens rows chosen by a Fiat-Shamir transcript. Audit mode opens
// every row; spot-check mode opens the rows hit by q uniform draws.
namespace zkeval {

enum class ProofMode : uint8_t { kAudit = 0, kSpotCheck = 1 };

const char* proof_mode_name(ProofMode m);
ProofMode proof_mode_from_name(const std::string& s);

struct TableCommitment {
  uint32_t id = 0;
  LookupFn fn = LookupFn::kReLU;
  int param = 0;
  int64_t lo = 0, hi = -1;
  Digest root{};

  uint64_t size() const { return hi < lo ? 0 : static_cast<uint64_t>(hi - lo) + 1; }
};

struct VerificationKey {
  Digest circuit_digest{};
  Digest gate_root{};
  uint64_t n_con = 0;
  uint64_t padded_rows = 1;
  uint64_t n_advice = 0;
  uint64_t n_instance = 0;
  uint64_t n_public_inputs = 0;
  uint64_t n_weights = 0;
  bool binds_weights = false;
  int scale = 0;
  std::vector<Operand> outputs;
  std::vector<TableCommitment> tables;
  Digest weight_root{};
  Digest weight_hash{};  // H(W)
  uint32_t lambda = 128;
  uint32_t spot_ppm = 20000;  // spot-check fraction of padded rows, parts per million

  Bytes serialize() const;
  static VerificationKey deserialize(std::span<const uint8_t> bytes);
  Digest digest() const { return sha256(serialize()); }

  // Number of transcript draws in spot-check mode.
  uint64_t spot_draws() const;
};

struct ProvingKey {
  VerificationKey vk;
  ConstraintSystem cs;
  std::vector<Fe> weights;
  Digest weight_seed{};
  MerkleTree gate_tree;
  MerkleTree weight_tree;
  std::vector<MerkleTree> table_trees;

  Bytes serialize() const;
  static ProvingKey deserialize(std::span<const uint8_t> bytes);
};

struct SetupOptions {
  uint32_t lambda = 128;
  double spot_fraction = 0.02;
};

// Deterministic: the same circuit and weights give byte-identical keys.
std::pair<ProvingKey, VerificationKey> setup(const ConstraintSystem& cs, std::span<const Fe> weights,
                                             const SetupOptions& opts = {});

struct CellOpening {
  Fe value;
  std::array<uint8_t, 16> salt{};
};

struct Proof {
  ProofMode mode = ProofMode::kSpotCheck;
  Digest circuit_digest{};
  Digest weight_hash{};
  std::vector<Fe> instance;  // x~ | y~ | H(W) limbs
  Digest cell_root{};
  std::vector<Gate> gates;  // opened rows, ascending
  std::vector<Digest> gate_siblings;
  std::vector<CellOpening> cells;  // referenced advice cells, ascending index
  std::vector<Digest> cell_siblings;
  std::vector<CellOpening> weights;  // referenced weights, ascending index
  std::vector<Digest> weight_siblings;
  std::vector<std::vector<Digest>> table_siblings;  // one multiproof per table

  Bytes serialize() const;
  static Proof deserialize(std::span<const uint8_t> bytes);
  Digest digest() const { return sha256(serialize()); }
};

struct ProveOptions {
  ProofMode mode = ProofMode::kSpotCheck;
  std::optional<Digest> seed;  // salt seed; random when absent
  bool check_witness = true;   // tests switch this off to prove lying traces
};

struct ProveStats {
  double seconds = 0.0;
  uint64_t working_set_bytes = 0;
  uint64_t opened_rows = 0;
};

// Throws WitnessMismatch for a witness of another circuit or weight set and
// UnsatisfiedWitness for a trace that violates a constraint.
Proof prove(const ProvingKey& pk, const Witness& w, const ProveOptions& opts = {}, ProveStats* stats = nullptr);

struct VerifyResult {
  bool ok = false;
  std::string reason;  // stable code, empty on success
  std::string detail;
  explicit operator bool() const { return ok; }
};

// Total: never throws on malformed input.
VerifyResult verify(const VerificationKey& vk, std::span<const uint8_t> proof_bytes,
                    std::span<const Fe> x_public, std::span<const Fe> y_public);
VerifyResult verify(const VerificationKey& vk, const Proof& proof, std::span<const Fe> x_public,
                    std::span<const Fe> y_public);
// Checks the proof against its own embedded public values.
VerifyResult verify(const VerificationKey& vk, const Proof& proof);

// Row indices the verifier will open, derived from the transcript state.
std::vector<uint64_t> opened_rows(const VerificationKey& vk, ProofMode mode, const Digest& transcript_state);
Digest transcript_state(const Digest& circuit_digest, std::span<const Fe> instance, const Digest& weight_hash,
                        const Digest& cell_root, const VerificationKey& vk);

}  // namespace zkeval
