// Serial reference vs OpenMP kernels.
#include <benchmark/benchmark.h>

#include <random>

#include "zkeval/kernels.hpp"

using namespace zkeval;
using kernels::Policy;

namespace {

// out[i, j] = sum_k A[i, k] B[k, j]
kernels::ContractionPlan matmul_plan(int64_t m, int64_t k, int64_t n) {
  kernels::ContractionPlan p;
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j) {
      p.a_out.push_back(i * k);
      p.b_out.push_back(j);
    }
  for (int64_t t = 0; t < k; ++t) {
    p.a_sum.push_back(t);
    p.b_sum.push_back(t * n);
  }
  return p;
}

Policy policy_of(const benchmark::State& s) { return s.range(1) ? Policy::kParallel : Policy::kSerial; }

void BM_ContractF64(benchmark::State& state) {
  const int64_t n = state.range(0);
  auto plan = matmul_plan(n, n, n);
  std::vector<double> a(n * n), b(n * n), out(n * n);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1, 1);
  for (auto& v : a) v = d(rng);
  for (auto& v : b) v = d(rng);
  for (auto _ : state) {
    kernels::contract_f64(plan, a, b, out, policy_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

void BM_ContractI64(benchmark::State& state) {
  const int64_t n = state.range(0);
  auto plan = matmul_plan(n, n, n);
  std::vector<int64_t> a(n * n), b(n * n), out(n * n);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int64_t> d(-256, 256);
  for (auto& v : a) v = d(rng);
  for (auto& v : b) v = d(rng);
  for (auto _ : state) {
    kernels::contract_i64(plan, a, b, {}, 7, out, policy_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n * n);
}

void BM_HashLevel(benchmark::State& state) {
  std::vector<Digest> in(static_cast<size_t>(state.range(0)));
  for (size_t i = 0; i < in.size(); ++i) in[i][0] = static_cast<uint8_t>(i);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::hash_level(in, policy_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0) / 2);
}

void BM_SaltedLeaves(benchmark::State& state) {
  std::vector<Fe> values(static_cast<size_t>(state.range(0)));
  for (size_t i = 0; i < values.size(); ++i) values[i] = Fe(i);
  Digest seed{};
  for (auto _ : state) benchmark::DoNotOptimize(kernels::hash_salted_leaves(0x02, seed, values, policy_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ContractF64)->ArgsProduct({{64, 128}, {0, 1}})->ArgNames({"n", "omp"});
BENCHMARK(BM_ContractI64)->ArgsProduct({{64, 128}, {0, 1}})->ArgNames({"n", "omp"});
BENCHMARK(BM_HashLevel)->ArgsProduct({{1 << 12, 1 << 16}, {0, 1}})->ArgNames({"leaves", "omp"});
BENCHMARK(BM_SaltedLeaves)->ArgsProduct({{1 << 12, 1 << 16}, {0, 1}})->ArgNames({"leaves", "omp"});

BENCHMARK_MAIN();
