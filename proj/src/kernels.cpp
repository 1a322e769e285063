#include "zkeval/kernels.hpp"

#include <omp.h>

#include <algorithm>

#include "zkeval/errors.hpp"
#include "zkeval/merkle.hpp"

namespace zkeval::kernels {

namespace {

// Parallel loops only pay off past a few thousand iterations.
constexpr size_t kParallelThreshold = 256;

bool fits(__int128 v) {
  __int128 lim = static_cast<__int128>(Fe::kHalfRange);
  return v < lim && v > -lim;
}

}  // namespace

void contract_f64(const ContractionPlan& plan, std::span<const double> a, std::span<const double> b,
                  std::span<double> out, Policy policy) {
  const int64_t n_out = static_cast<int64_t>(plan.out_count());
  const int64_t n_sum = static_cast<int64_t>(plan.sum_count());
  const bool binary = plan.binary();
  auto body = [&](int64_t o) {
    double acc = 0.0;
    const double* pa = a.data() + plan.a_out[o];
    if (binary) {
      const double* pb = b.data() + plan.b_out[o];
      for (int64_t k = 0; k < n_sum; ++k) acc += pa[plan.a_sum[k]] * pb[plan.b_sum[k]];
    } else {
      for (int64_t k = 0; k < n_sum; ++k) acc += pa[plan.a_sum[k]];
    }
    out[o] = acc;
  };
  if (policy == Policy::kParallel && static_cast<size_t>(n_out * n_sum) >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
    for (int64_t o = 0; o < n_out; ++o) body(o);
  } else {
    for (int64_t o = 0; o < n_out; ++o) body(o);
  }
}

void contract_i64(const ContractionPlan& plan, std::span<const int64_t> a, std::span<const int64_t> b,
                  std::span<const int64_t> bias, int shift, std::span<int64_t> out, Policy policy) {
  const int64_t n_out = static_cast<int64_t>(plan.out_count());
  const int64_t n_sum = static_cast<int64_t>(plan.sum_count());
  const bool binary = plan.binary();
  bool overflow = false;
  auto body = [&](int64_t o) -> bool {
    __int128 acc = bias.empty() ? 0 : bias[o];
    const int64_t* pa = a.data() + plan.a_out[o];
    if (binary) {
      const int64_t* pb = b.data() + plan.b_out[o];
      for (int64_t k = 0; k < n_sum; ++k) {
        acc += static_cast<__int128>(pa[plan.a_sum[k]]) * pb[plan.b_sum[k]];
        if (!fits(acc)) return false;
      }
    } else {
      for (int64_t k = 0; k < n_sum; ++k) acc += pa[plan.a_sum[k]];
      if (!fits(acc)) return false;
    }
    out[o] = floor_shift(static_cast<int64_t>(acc), shift);
    return true;
  };
  if (policy == Policy::kParallel && static_cast<size_t>(n_out * n_sum) >= kParallelThreshold) {
#pragma omp parallel for schedule(static) reduction(|| : overflow)
    for (int64_t o = 0; o < n_out; ++o) overflow = !body(o) || overflow;
  } else {
    for (int64_t o = 0; o < n_out; ++o) overflow = !body(o) || overflow;
  }
  if (overflow) throw OverflowError("accumulator exceeds the field's signed range");
}

std::vector<Digest> hash_level(std::span<const Digest> in, Policy policy) {
  const int64_t n = static_cast<int64_t>(in.size() / 2);
  std::vector<Digest> out(static_cast<size_t>(n));
  if (policy == Policy::kParallel && static_cast<size_t>(n) >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) out[i] = hash_node(in[2 * i], in[2 * i + 1]);
  } else {
    for (int64_t i = 0; i < n; ++i) out[i] = hash_node(in[2 * i], in[2 * i + 1]);
  }
  return out;
}

std::array<uint8_t, 16> leaf_salt(const Digest& seed, uint64_t index) {
  uint8_t buf[1 + 32 + 8];
  buf[0] = 0x06;
  std::copy(seed.begin(), seed.end(), buf + 1);
  for (int i = 0; i < 8; ++i) buf[33 + i] = static_cast<uint8_t>(index >> (8 * i));
  Digest d = sha256(std::span<const uint8_t>(buf, sizeof buf));
  std::array<uint8_t, 16> salt;
  std::copy(d.begin(), d.begin() + 16, salt.begin());
  return salt;
}

Digest salted_leaf(uint8_t tag, const std::array<uint8_t, 16>& salt, Fe value) {
  uint8_t buf[1 + 16 + 8];
  buf[0] = tag;
  std::copy(salt.begin(), salt.end(), buf + 1);
  uint64_t v = value.value();
  for (int i = 0; i < 8; ++i) buf[17 + i] = static_cast<uint8_t>(v >> (8 * i));
  return sha256(std::span<const uint8_t>(buf, sizeof buf));
}

std::vector<Digest> hash_salted_leaves(uint8_t tag, const Digest& seed, std::span<const Fe> values,
                                       Policy policy) {
  const int64_t n = static_cast<int64_t>(values.size());
  std::vector<Digest> out(values.size());
  auto body = [&](int64_t i) { out[i] = salted_leaf(tag, leaf_salt(seed, static_cast<uint64_t>(i)), values[i]); };
  if (policy == Policy::kParallel && values.size() >= kParallelThreshold) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) body(i);
  } else {
    for (int64_t i = 0; i < n; ++i) body(i);
  }
  return out;
}

void for_each_index(int64_t n, const std::function<void(int64_t)>& body, Policy policy) {
  if (policy == Policy::kParallel && n >= static_cast<int64_t>(kParallelThreshold)) {
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < n; ++i) body(i);
  } else {
    for (int64_t i = 0; i < n; ++i) body(i);
  }
}

}  // namespace zkeval::kernels
