#include <doctest.h>

#include "support.hpp"
#include "zkeval/attestation.hpp"
#include "zkeval/errors.hpp"

using namespace zkeval;
using zkeval::testing::regression_keys;
using zkeval::testing::svm_keys;

namespace {

std::vector<Fe> logits(std::initializer_list<int64_t> v) {
  std::vector<Fe> out;
  for (auto x : v) out.push_back(Fe::from_signed(x));
  return out;
}

struct Run {
  std::vector<Witness> wits;
  std::vector<Proof> proofs;
  std::vector<std::vector<double>> truths;
};

Run run(const zkeval::testing::Keys& k, size_t n) {
  Run r;
  for (size_t i = 0; i < n; ++i) {
    r.wits.push_back(k.m.witness(k.ds.inputs[i]));
    r.proofs.push_back(k.prove_sample(i));
    r.truths.push_back(k.ds.labels[i]);
  }
  return r;
}

}  // namespace

TEST_SUITE("attestation") {
  TEST_CASE("aggregate: three of four correct") {
    std::vector<std::vector<Fe>> y{logits({5, 1, 0}), logits({0, 9, 2}), logits({1, 1, 0}), logits({0, 0, 4})};
    std::vector<std::vector<double>> t{{0}, {1}, {0}, {0}};  // the last one predicts class 2
    auto m = aggregate(TaskKind::kClassification, 7, 0.0, y, t);
    CHECK(m.n == 4);
    CHECK(m.correct == 3);
    CHECK(m.accuracy == 0.75);
    uint64_t total = 0;
    for (const auto& row : m.confusion)
      for (auto c : row) total += c;
    CHECK(total == 4);
    CHECK(m.confusion[0][2] == 1);
    CHECK(m.confusion[0][0] == 2);  // ties go to the first maximum
  }

  TEST_CASE("aggregate: regression MAE and tolerance") {
    // scale 4: raw 16 = 1.0
    std::vector<std::vector<Fe>> y{logits({16}), logits({40}), logits({-8})};
    std::vector<std::vector<double>> t{{1.0}, {2.0}, {0.0}};
    auto m = aggregate(TaskKind::kRegression, 4, 0.5, y, t);
    CHECK(m.mean_abs_error == doctest::Approx((0.0 + 0.5 + 0.5) / 3));
    CHECK(m.correct == 3);
    CHECK(tolerance_raw(0.5, 4) == 8);
  }

  TEST_CASE("bundle accuracy equals metric accuracy") {
    const auto& k = svm_keys();
    Run r = run(k, 12);
    std::vector<BundleEntry> entries;
    for (size_t i = 0; i < r.proofs.size(); ++i)
      entries.push_back(BundleEntry::from_proof(k.vk, r.proofs[i], r.truths[i]));
    auto bundle = build_bundle(k.vk, entries, {});
    auto rep = verify_bundle(NaiveBundle::deserialize(bundle.serialize()));
    CHECK(rep.ok());
    MetricOptions mo;
    mo.seed = zkeval::testing::seed(1);
    auto att = build_metric_attestation(k.vk, r.wits, r.proofs, r.truths, MetricKind::kAccuracy, mo);
    CHECK(att.value == rep.metrics.accuracy);
    std::vector<Digest> d;
    for (const auto& p : r.proofs) d.push_back(p.digest());
    auto back = MetricAttestation::deserialize(att.serialize());
    CHECK(verify_metric_attestation(back, d).ok);

    SUBCASE("swapped digest") {
      std::swap(d[0], d[1]);
      CHECK_FALSE(verify_metric_attestation(back, d).ok);
    }
    SUBCASE("altered value") {
      back.value += 1.0 / 12;
      auto v = verify_metric_attestation(back, d);
      CHECK_FALSE(v.ok);
      CHECK(v.reason == "metric_mismatch");
    }
    SUBCASE("altered count") {
      back.counts[0] += 1;
      CHECK_FALSE(verify_metric_attestation(back, d).ok);
    }
    SUBCASE("tampered bundle proof") {
      bundle.entries[3].proof[bundle.entries[3].proof.size() / 2] ^= 1;
      auto bad = verify_bundle(bundle);
      CHECK_FALSE(bad.ok());
      CHECK_FALSE(bad.entries[3].ok);
      CHECK(bad.n_valid == 11);
    }
  }

  TEST_CASE("confusion matrix attestation sums to N") {
    const auto& k = svm_keys();
    Run r = run(k, 9);
    MetricOptions mo;
    mo.seed = zkeval::testing::seed(2);
    auto att = build_metric_attestation(k.vk, r.wits, r.proofs, r.truths, MetricKind::kConfusionMatrix, mo);
    uint64_t total = 0;
    for (auto c : att.counts) total += c;
    CHECK(total == 9);
    std::vector<Digest> d;
    for (const auto& p : r.proofs) d.push_back(p.digest());
    CHECK(verify_metric_attestation(att, d).ok);
  }

  TEST_CASE("regression MAE attestation matches the bundle") {
    const auto& k = regression_keys();
    Run r = run(k, 10);
    MetricOptions mo;
    mo.tolerance = 0.05;
    mo.seed = zkeval::testing::seed(3);
    auto att = build_metric_attestation(k.vk, r.wits, r.proofs, r.truths, MetricKind::kMeanAbsError, mo);
    std::vector<std::vector<Fe>> y;
    for (const auto& w : r.wits) {
      auto s = w.y_tilde(k.m.cs);
      y.emplace_back(s.begin(), s.end());
    }
    auto m = aggregate(TaskKind::kRegression, k.m.cs.scale, 0.05, y, r.truths);
    // MAE on the raw grid: both sides use the same integer sum.
    CHECK(att.value == doctest::Approx(m.mean_abs_error).epsilon(1e-12));
    std::vector<Digest> d;
    for (const auto& p : r.proofs) d.push_back(p.digest());
    CHECK(verify_metric_attestation(att, d).ok);
  }

  TEST_CASE("bad inputs") {
    const auto& k = svm_keys();
    CHECK_THROWS_AS(build_bundle(k.vk, {}, {}), InvalidArgument);
    std::vector<Witness> none;
    std::vector<Proof> no_proofs;
    std::vector<std::vector<double>> no_truths;
    CHECK_THROWS_AS(build_metric_attestation(k.vk, none, no_proofs, no_truths, MetricKind::kAccuracy),
                    InvalidArgument);

    // A proof under another model's weights.
    Graph g2 = fixtures::svm(16, 3, 99);
    auto m2 = compile_model(g2, k.m.cal);
    auto [pk2, vk2] = setup(m2.cs, m2.weights);
    Proof foreign = prove(pk2, m2.witness(k.ds.inputs[0]));
    std::vector<BundleEntry> e{BundleEntry::from_proof(k.vk, foreign, k.ds.labels[0])};
    CHECK_THROWS_AS(build_bundle(k.vk, e, {}), HashMismatch);

    Proof p = k.prove_sample(0);
    p.cells.at(0).salt[0] ^= 1;
    std::vector<BundleEntry> e2{BundleEntry::from_proof(k.vk, p, k.ds.labels[0])};
    CHECK_THROWS_AS(build_bundle(k.vk, e2, {}), InvalidProof);

    CHECK_THROWS_AS(MetricAttestation::deserialize(Bytes{1, 2, 3}), FormatError);
  }
}
