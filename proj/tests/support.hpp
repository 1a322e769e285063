#pragma once

#include <string>

#include "zkeval/calibrate.hpp"
#include "zkeval/fixtures.hpp"
#include "zkeval/graph.hpp"
#include "zkeval/hash.hpp"
#include "zkeval/pipeline.hpp"
#include "zkeval/prover.hpp"

namespace zkeval::testing {

inline std::string fixture(const std::string& name) { return std::string(ZKEVAL_FIXTURE_DIR) + "/" + name; }

inline Digest seed(uint64_t i) {
  Bytes b(8);
  for (int k = 0; k < 8; ++k) b[k] = static_cast<uint8_t>(i >> (8 * k));
  return sha256(b);
}

// A compiled fixture with keys, built once per process.
struct Keys {
  Graph g;
  fixtures::Dataset ds;
  CompiledModel m;
  ProvingKey pk;
  VerificationKey vk;

  Proof prove_sample(size_t i, ProofMode mode = ProofMode::kSpotCheck) const {
    ProveOptions po;
    po.mode = mode;
    po.seed = seed(i);
    return prove(pk, m.witness(ds.inputs[i]), po);
  }
};

inline Keys make_keys(const std::string& name) {
  Keys k;
  k.g = load_graph_file(fixture(name + ".json"));
  k.ds = fixtures::Dataset::load(fixture(name + "_data.json"));
  k.m = compile_model(k.g, calibrate(k.g, k.ds.inputs, CalibrationMode::kResources));
  auto [pk, vk] = setup(k.m.cs, k.m.weights);
  k.pk = std::move(pk);
  k.vk = std::move(vk);
  return k;
}

inline const Keys& svm_keys() {
  static const Keys k = make_keys("svm");
  return k;
}

inline const Keys& regression_keys() {
  static const Keys k = make_keys("regression");
  return k;
}

}  // namespace zkeval::testing
