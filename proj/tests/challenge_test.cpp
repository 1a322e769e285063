#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "zkeval/challenge.hpp"
#include "zkeval/errors.hpp"
#include "zkeval/witness.hpp"

using namespace zkeval;
using zkeval::testing::svm_keys;

namespace {

std::vector<double> float_logits(const zkeval::testing::Keys& k, size_t i) {
  auto vals = infer_float_all(k.g, k.ds.inputs[i]);
  return vals.at(circuit_output_ref(k.g, k.g.outputs[0])).data;
}

}  // namespace

TEST_SUITE("challenge") {
  TEST_CASE("honest provider passes, bad responses fail in order") {
    const auto& k = svm_keys();
    auto req = make_challenge(k.vk, k.ds.inputs[4], float_logits(k, 4), 0.05);
    CHECK(req.nonce.size() >= 16);
    auto req2 = ChallengeRequest::from_json(req.to_json());
    CHECK(req2.to_json() == req.to_json());
    auto resp = ChallengeResponse::deserialize(respond(k.pk, req).serialize());
    auto v = adjudicate(k.vk, req, resp);
    CHECK(v.pass);
    CHECK(v.observed_error <= 0.05);

    SUBCASE("nonce") {
      resp.nonce = "stale";
      CHECK(adjudicate(k.vk, req, resp).reason == "nonce_mismatch");
    }
    SUBCASE("hash") {
      resp.weight_hash[0] ^= 1;
      CHECK(adjudicate(k.vk, req, resp).reason == "hash_mismatch");
    }
    SUBCASE("reference") {
      req.vk_digest[0] ^= 1;
      CHECK(adjudicate(k.vk, req, resp).reason == "reference_mismatch");
    }
    SUBCASE("proof") {
      resp.proof[resp.proof.size() / 2] ^= 1;
      CHECK(adjudicate(k.vk, req, resp).reason == "invalid_proof");
    }
    SUBCASE("claimed output") {
      resp.y_tilde[0] = resp.y_tilde[0] + Fe(1);
      CHECK(adjudicate(k.vk, req, resp).reason == "invalid_proof");
    }
    SUBCASE("tolerance") {
      for (auto& y : req.y_star) y += 10.0;
      CHECK_THROWS_AS(respond(k.pk, req), ChallengeFailure);
      CHECK(adjudicate(k.vk, req, resp).reason == "tolerance");
    }
  }

  TEST_CASE("adjudication is pure") {
    const auto& k = svm_keys();
    auto req = make_challenge(k.vk, k.ds.inputs[0], float_logits(k, 0), 0.05, "fixed-nonce");
    ProveOptions po;
    po.seed = zkeval::testing::seed(1);
    auto resp = respond(k.pk, req, po);
    CHECK(adjudicate(k.vk, req, resp).to_json() == adjudicate(k.vk, req, resp).to_json());
  }
}

TEST_SUITE("audit") {
  TEST_CASE("audit count within three standard deviations") {
    AuditPolicy pol{0.1, 1.0};
    const uint64_t n = 10000;
    auto a = schedule_audits(n, pol, 42);
    double count = 0;
    for (bool b : a) count += b;
    CHECK(std::abs(count - 1000.0) <= 3 * std::sqrt(n * 0.1 * 0.9));
    CHECK(schedule_audits(n, pol, 42) == a);
  }

  TEST_CASE("cost balance") {
    AuditPolicy pol{0.25, 4.0};
    CHECK(pol.reward() == 16.0);
    auto c = expected_cost_balance(pol, 100);
    CHECK(c.user_cost == 100.0);
    CHECK(c.expected_audits == 25.0);
    CHECK(c.reward * pol.p == pol.cost);
    CHECK(c.audits_repaid_per_catch == 4.0);
    CHECK_THROWS_AS((AuditPolicy{0.0, 1.0}.validate()), InvalidArgument);
  }

  TEST_CASE("detection closed form") {
    CHECK(detection_probability(1.0, 1.0, 1) == 1.0);
    CHECK(detection_probability(0.1, 0.0, 100) == 0.0);
    CHECK(detection_probability(0.5, 0.5, 2) == doctest::Approx(1 - 0.75 * 0.75));
    CHECK(std::abs(simulate_detection(0.1, 0.5, 20, 20000, 3) - detection_probability(0.1, 0.5, 20)) < 0.02);
  }
}
