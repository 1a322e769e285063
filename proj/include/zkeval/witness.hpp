#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "zkeval/circuit.hpp"
#include "zkeval/graph.hpp"
#include "zkeval/hash.hpp"

namespace zkeval {

// Weight column in canonical order (names sorted, row-major), each tensor
// encoded at its own scale.
std::vector<Fe> weight_column(const ConstraintSystem& cs, const std::map<std::string, Tensor>& weights);

// H(W): Merkle root over 64-element chunks of the canonical weight encoding
// (8-byte little-endian field values). The empty set hashes to the empty leaf.
Digest hash_weight_column(std::span<const Fe> column);
Digest hash_weights(const std::map<std::string, Tensor>& weights, const std::map<std::string, int>& scales);

inline constexpr size_t kWeightChunk = 64;

struct Witness {
  Digest circuit_digest{};
  Digest weight_hash{};
  int scale = 0;
  std::vector<Fe> instance;
  std::vector<Fe> advice;

  std::span<const Fe> x_tilde(const ConstraintSystem& cs) const {
    return std::span<const Fe>(instance).subspan(0, cs.n_public_inputs);
  }
  std::span<const Fe> y_tilde(const ConstraintSystem& cs) const {
    return std::span<const Fe>(instance).subspan(cs.n_public_inputs, cs.outputs.size());
  }

  Bytes serialize() const;
  static Witness deserialize(std::span<const uint8_t> bytes);
  Digest digest() const { return sha256(serialize()); }
};

// Quantizes the inputs at the circuit scale and lays out the instance column
// (inputs, placeholder outputs, H(W) limbs).
std::vector<Fe> instance_for(const ConstraintSystem& cs, const std::vector<Tensor>& inputs, const Digest& weight_hash);

// Executes the circuit on quantized inputs; `weights` is the weight column.
Witness make_witness(const ConstraintSystem& cs, std::span<const Fe> weights, const std::vector<Tensor>& inputs,
                     std::span<const Fe> external = {});
// Lower-level form for callers that already hold the circuit digest and H(W).
Witness make_witness(const ConstraintSystem& cs, const Digest& circuit_digest, std::span<const Fe> weights,
                     const Digest& weight_hash, std::vector<Fe> instance, std::span<const Fe> external = {});

Assignment assignment_of(const Witness& w, std::span<const Fe> weights);

// Decoded circuit outputs (one tensor per graph output, logits for ArgMax).
std::vector<Tensor> decode_outputs(const ConstraintSystem& cs, std::span<const Fe> y_tilde);
// Class index per output for ArgMax outputs, computed on the quantized logits
// (first maximum wins).
int64_t argmax_class(std::span<const Fe> logits);

// Plain quantized inference through the compiled circuit.
std::vector<Tensor> run_quantized(const ConstraintSystem& cs, std::span<const Fe> weights,
                                  const std::vector<Tensor>& inputs);

}  // namespace zkeval
