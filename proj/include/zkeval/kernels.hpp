#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "zkeval/field.hpp"
#include "zkeval/hash.hpp"

// Data-parallel inner loops. Every kernel has an OpenMP implementation and a
// plain serial reference; tests pin the two against each other and the bench
// target times them side by side.
namespace zkeval::kernels {

enum class Policy { kSerial, kParallel };

// Flattened two-level offset tables for an einsum-style contraction:
//   out[o] = sum_k A[a_out[o] + a_sum[k]] * B[b_out[o] + b_sum[k]]
// Single-operand plans leave the B tables empty.
struct ContractionPlan {
  std::vector<int64_t> a_out, a_sum;
  std::vector<int64_t> b_out, b_sum;
  bool binary() const { return !b_out.empty(); }
  size_t out_count() const { return a_out.size(); }
  size_t sum_count() const { return a_sum.size(); }
};

void contract_f64(const ContractionPlan& plan, std::span<const double> a, std::span<const double> b,
                  std::span<double> out, Policy policy = Policy::kParallel);

// Integer contraction on fixed-point raws: out[o] = floor((acc + bias[o]) / 2^shift).
// `bias` may be empty. Throws OverflowError if an accumulator leaves the
// field's signed range.
void contract_i64(const ContractionPlan& plan, std::span<const int64_t> a, std::span<const int64_t> b,
                  std::span<const int64_t> bias, int shift, std::span<int64_t> out,
                  Policy policy = Policy::kParallel);

// One Merkle level: out[i] = H(in[2i], in[2i+1]).
std::vector<Digest> hash_level(std::span<const Digest> in, Policy policy = Policy::kParallel);

// Salted leaf hashes H(tag || salt_i || value_i) with salt_i derived from seed.
std::vector<Digest> hash_salted_leaves(uint8_t tag, const Digest& seed, std::span<const Fe> values,
                                       Policy policy = Policy::kParallel);

// 16-byte per-leaf salt: first half of H(0x06 || seed || index).
std::array<uint8_t, 16> leaf_salt(const Digest& seed, uint64_t index);
Digest salted_leaf(uint8_t tag, const std::array<uint8_t, 16>& salt, Fe value);

// Runs body(i) for i in [0, n); iterations must be independent.
void for_each_index(int64_t n, const std::function<void(int64_t)>& body, Policy policy = Policy::kParallel);

}  // namespace zkeval::kernels
