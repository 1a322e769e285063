#include <doctest.h>

#include "support.hpp"
#include "zkeval/circuit.hpp"
#include "zkeval/errors.hpp"
#include "zkeval/prover.hpp"
#include "zkeval/witness.hpp"

using namespace zkeval;
using zkeval::testing::seed;
using zkeval::testing::svm_keys;

TEST_SUITE("prover") {
  TEST_CASE("setup and proving are deterministic") {
    const auto& k = svm_keys();
    auto [pk2, vk2] = setup(k.m.cs, k.m.weights);
    CHECK(vk2.serialize() == k.vk.serialize());
    CHECK(pk2.serialize() == k.pk.serialize());
    CHECK(k.prove_sample(3).serialize() == k.prove_sample(3).serialize());
  }

  TEST_CASE("honest proofs verify in both modes and round trip") {
    const auto& k = svm_keys();
    for (auto mode : {ProofMode::kSpotCheck, ProofMode::kAudit}) {
      Proof p = k.prove_sample(1, mode);
      Bytes b = p.serialize();
      CHECK(Proof::deserialize(b).serialize() == b);
      std::span<const Fe> inst(p.instance);
      auto r = verify(k.vk, b, inst.first(k.vk.n_public_inputs),
                      inst.subspan(k.vk.n_public_inputs, k.vk.outputs.size()));
      CHECK(r.ok);
    }
    CHECK(VerificationKey::deserialize(k.vk.serialize()).digest() == k.vk.digest());
  }

  TEST_CASE("row sampling") {
    const auto& k = svm_keys();
    Digest st = seed(5);
    auto all = opened_rows(k.vk, ProofMode::kAudit, st);
    CHECK(all.size() == k.vk.padded_rows);
    CHECK(k.vk.spot_draws() == std::max<uint64_t>(128, (k.vk.padded_rows * 2 + 99) / 100));
    auto some = opened_rows(k.vk, ProofMode::kSpotCheck, st);
    CHECK(std::is_sorted(some.begin(), some.end()));
    CHECK(std::adjacent_find(some.begin(), some.end()) == some.end());
    CHECK(some.back() < k.vk.padded_rows);
    CHECK(some == opened_rows(k.vk, ProofMode::kSpotCheck, st));
  }

  TEST_CASE("reason codes") {
    const auto& k = svm_keys();
    Proof p = k.prove_sample(2);
    Bytes b = p.serialize();
    auto x = std::span<const Fe>(p.instance).first(k.vk.n_public_inputs);
    auto y = std::span<const Fe>(p.instance).subspan(k.vk.n_public_inputs, k.vk.outputs.size());

    CHECK(verify(k.vk, Bytes(b.begin(), b.begin() + 40), x, y).reason == "malformed_proof");

    const auto& other = zkeval::testing::regression_keys();
    CHECK(verify(other.vk, p).reason == "circuit_mismatch");

    Proof h = p;
    h.weight_hash[0] ^= 1;
    CHECK(verify(k.vk, h).reason == "hash_mismatch");

    std::vector<Fe> x2(x.begin(), x.end());
    x2[0] = x2[0] + Fe(1);
    CHECK(verify(k.vk, b, x2, y).reason == "public_input_mismatch");

    Proof s = p;
    s.gate_siblings.at(0)[3] ^= 1;
    CHECK(verify(k.vk, s).reason == "opening_authentication_failed");

    Proof c = p;
    c.cells.at(0).value = c.cells.at(0).value + Fe(1);
    CHECK(verify(k.vk, c).reason == "opening_authentication_failed");
  }

  TEST_CASE("lying witnesses") {
    const auto& k = svm_keys();
    Witness w = k.m.witness(k.ds.inputs[0]);
    w.advice[0] = w.advice[0] + Fe(1);
    CHECK_THROWS_AS(prove(k.pk, w), UnsatisfiedWitness);
    ProveOptions po;
    po.mode = ProofMode::kAudit;
    po.check_witness = false;
    auto r = verify(k.vk, prove(k.pk, w, po));
    CHECK_FALSE(r.ok);
    CHECK(r.reason == "constraint_violated");

    Witness foreign = zkeval::testing::regression_keys().m.witness(zkeval::testing::regression_keys().ds.inputs[0]);
    CHECK_THROWS_AS(prove(k.pk, foreign), WitnessMismatch);
  }

  TEST_CASE("a wrong lookup output fails membership") {
    CircuitBuilder b;
    Operand x = b.new_instance();
    uint32_t t = b.table(LookupFn::kReLU, 0, -8, 8);
    b.lookup_one(x, t);
    b.expose_outputs({}, false);
    auto cs = b.finish();
    auto [pk, vk] = setup(cs, {});
    std::vector<Fe> inst{Fe::from_signed(5)};
    Witness w = make_witness(cs, cs.digest(), {}, hash_weight_column({}), inst);
    w.advice[0] = Fe(4);
    ProveOptions po;
    po.mode = ProofMode::kAudit;
    po.check_witness = false;
    CHECK(verify(vk, prove(pk, w, po)).reason == "lookup_membership_failed");
  }
}
