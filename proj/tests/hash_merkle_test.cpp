#include <doctest.h>

#include "zkeval/hash.hpp"
#include "zkeval/kernels.hpp"
#include "zkeval/merkle.hpp"

using namespace zkeval;

namespace {

Digest node_oracle(const Digest& l, const Digest& r) {
  Bytes b{0x10};
  b.insert(b.end(), l.begin(), l.end());
  b.insert(b.end(), r.begin(), r.end());
  return sha256(b);
}

Digest leaf(uint8_t v) { return sha256(std::string(1, static_cast<char>(v))); }

}  // namespace

TEST_SUITE("hash") {
  TEST_CASE("SHA-256 known answers") {
    CHECK(to_hex(sha256(std::string_view("abc"))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(to_hex(sha256(std::string_view(""))) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    Sha256 h;
    h.update(std::string_view("a")).update(std::string_view("bc"));
    CHECK(h.finish() == sha256(std::string_view("abc")));
  }

  TEST_CASE("hex and base64 round trip") {
    Digest d = sha256(std::string_view("x"));
    CHECK(digest_from_hex(to_hex(d)) == d);
    Bytes b{0, 1, 2, 250, 251};
    CHECK(base64_decode(base64_encode(b)) == b);
    CHECK(base64_encode(Bytes{'M', 'a', 'n'}) == "TWFu");
  }
}

TEST_SUITE("merkle") {
  TEST_CASE("root of three leaves pads with the empty leaf") {
    MerkleTree t({leaf(0), leaf(1), leaf(2)});
    CHECK(t.leaf_count() == 4);
    CHECK(t.depth() == 2);
    CHECK(t.root() == node_oracle(node_oracle(leaf(0), leaf(1)), node_oracle(leaf(2), empty_leaf())));
  }

  TEST_CASE("multiproof authenticates and rejects tampering") {
    std::vector<Digest> leaves;
    for (int i = 0; i < 13; ++i) leaves.push_back(leaf(static_cast<uint8_t>(i)));
    MerkleTree t(leaves);
    std::vector<uint64_t> idx{1, 2, 9, 12};
    auto sib = t.multiproof(idx);
    std::vector<std::pair<uint64_t, Digest>> opened;
    for (auto i : idx) opened.emplace_back(i, leaves[i]);
    CHECK(verify_multiproof(t.root(), t.depth(), opened, sib));

    auto bad_sib = sib;
    bad_sib[0][0] ^= 1;
    CHECK_FALSE(verify_multiproof(t.root(), t.depth(), opened, bad_sib));

    auto bad_leaf = opened;
    bad_leaf[2].second = leaf(99);
    CHECK_FALSE(verify_multiproof(t.root(), t.depth(), bad_leaf, sib));

    auto moved = opened;
    moved[3].first = 13;
    CHECK_FALSE(verify_multiproof(t.root(), t.depth(), moved, sib));

    auto short_sib = sib;
    short_sib.pop_back();
    CHECK_FALSE(verify_multiproof(t.root(), t.depth(), opened, short_sib));
  }

  TEST_CASE("serialization round trip") {
    MerkleTree t({leaf(1), leaf(2), leaf(3), leaf(4), leaf(5)});
    ByteWriter w;
    t.serialize(w);
    ByteReader r(w.bytes());
    CHECK(MerkleTree::deserialize(r).root() == t.root());
  }
}

TEST_SUITE("kernels") {
  TEST_CASE("parallel hashing equals the serial reference") {
    std::vector<Fe> values;
    for (uint64_t i = 0; i < 5000; ++i) values.push_back(Fe(i * 7919));
    Digest s = sha256(std::string_view("seed"));
    auto a = kernels::hash_salted_leaves(2, s, values, kernels::Policy::kSerial);
    auto b = kernels::hash_salted_leaves(2, s, values, kernels::Policy::kParallel);
    CHECK(a == b);
    CHECK(a[17] == kernels::salted_leaf(2, kernels::leaf_salt(s, 17), values[17]));
    std::vector<Digest> level(a.begin(), a.begin() + 4096);
    auto la = kernels::hash_level(level, kernels::Policy::kSerial);
    CHECK(la == kernels::hash_level(level, kernels::Policy::kParallel));
    CHECK(la[5] == node_oracle(level[10], level[11]));
  }

  TEST_CASE("contractions: parallel equals serial, and both equal a hand matmul") {
    // A[m x k] * B[k x n] as a contraction plan
    const int m = 40, k = 30, n = 50;
    kernels::ContractionPlan plan;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) plan.a_out.push_back(i * k), plan.b_out.push_back(j);
    for (int t = 0; t < k; ++t) plan.a_sum.push_back(t), plan.b_sum.push_back(t * n);
    std::vector<double> a(m * k), b(k * n);
    std::vector<int64_t> ai(m * k), bi(k * n);
    for (int i = 0; i < m * k; ++i) a[i] = (i % 7) - 3, ai[i] = (i % 7) - 3;
    for (int i = 0; i < k * n; ++i) b[i] = (i % 5) - 2, bi[i] = (i % 5) - 2;
    std::vector<double> fs(m * n), fp(m * n);
    kernels::contract_f64(plan, a, b, fs, kernels::Policy::kSerial);
    kernels::contract_f64(plan, a, b, fp, kernels::Policy::kParallel);
    CHECK(fs == fp);
    std::vector<int64_t> is(m * n), ip(m * n);
    kernels::contract_i64(plan, ai, bi, {}, 1, is, kernels::Policy::kSerial);
    kernels::contract_i64(plan, ai, bi, {}, 1, ip, kernels::Policy::kParallel);
    CHECK(is == ip);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        int64_t acc = 0;
        for (int t = 0; t < k; ++t) acc += ai[i * k + t] * bi[t * n + j];
        CHECK(fs[i * n + j] == static_cast<double>(acc));
        int64_t fl = acc >= 0 ? acc / 2 : -((-acc + 1) / 2);
        CHECK(is[i * n + j] == fl);
      }
  }
}
