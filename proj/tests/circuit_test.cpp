#include <doctest.h>

#include "support.hpp"
#include "zkeval/circuit.hpp"
#include "zkeval/errors.hpp"
#include "zkeval/witness.hpp"

using namespace zkeval;

namespace {

std::vector<Fe> fes(std::initializer_list<int64_t> v) {
  std::vector<Fe> out;
  for (auto x : v) out.push_back(Fe::from_signed(x));
  return out;
}

}  // namespace

TEST_SUITE("circuit") {
  TEST_CASE("cumulative sum, product and dot product") {
    CircuitBuilder b;
    std::vector<Operand> x, y;
    for (int i = 0; i < 4; ++i) x.push_back(b.new_instance());
    for (int i = 0; i < 4; ++i) y.push_back(b.new_instance());
    auto s = b.cumulative_sum(x);
    auto p = b.cumulative_product(x);
    auto d = b.cumulative_dot_product(x, y);
    b.expose_outputs({s.back(), p.back(), d.back()}, false);
    auto cs = b.finish();
    CHECK(cs.n_con() == 12);
    auto inst = fes({2, -3, 4, 5, 1, 2, 3, 4});
    inst.resize(cs.n_instance);
    auto a = execute(cs, inst, {});
    CHECK(check_satisfied(cs, a).ok);
    CHECK(a.value(s.back()).to_signed() == 8);
    CHECK(a.value(p.back()).to_signed() == -120);  // starts from 1
    CHECK(a.value(d.back()).to_signed() == 2 - 6 + 12 + 20);
  }

  TEST_CASE("elementwise, booleanity and lookups") {
    CircuitBuilder b;
    std::vector<Operand> x{b.new_instance(), b.new_instance()}, y{b.new_instance(), b.new_instance()};
    auto sum = b.elementwise(x, y, CircuitBuilder::ElementwiseOp::kAdd);
    auto diff = b.elementwise(x, y, CircuitBuilder::ElementwiseOp::kSub);
    auto prod = b.elementwise(x, y, CircuitBuilder::ElementwiseOp::kMul);
    uint32_t relu = b.table(LookupFn::kReLU, 0, -10, 10);
    auto r = b.lookup(diff, relu);
    b.booleanity(y);
    b.expose_outputs({sum[0], diff[1], prod[0], r[0], r[1]}, false);
    auto cs = b.finish();
    CHECK(cs.n_con() == 2 + 2 + 2 + 2 + 2);
    auto inst = fes({3, -4, 1, 0});
    inst.resize(cs.n_instance);
    auto a = execute(cs, inst, {});
    CHECK(check_satisfied(cs, a).ok);
    CHECK(a.value(sum[0]).to_signed() == 4);
    CHECK(a.value(diff[1]).to_signed() == -4);
    CHECK(a.value(prod[0]).to_signed() == 3);
    CHECK(a.value(r[0]).to_signed() == 2);
    CHECK(a.value(r[1]).to_signed() == 0);

    // y = 2 is not boolean
    auto bad = fes({3, -4, 2, 0});
    bad.resize(cs.n_instance);
    auto rep = check_satisfied(cs, execute(cs, bad, {}));
    CHECK_FALSE(rep.ok);
    CHECK(cs.argument_at(rep.row)->kind == ArgumentKind::kBooleanity);

    // lookup input outside the table
    auto off = fes({30, -4, 1, 0});
    off.resize(cs.n_instance);
    CHECK_THROWS_AS(execute(cs, off, {}), DomainError);
  }

  TEST_CASE("max argument rows and hint") {
    CircuitBuilder b;
    std::vector<Operand> x;
    for (int i = 0; i < 5; ++i) x.push_back(b.new_instance());
    Operand m = b.max_of(x, 10);
    b.expose_outputs({m}, false);
    auto cs = b.finish();
    CHECK(cs.n_con() == 4 * 5 + 2);
    auto inst = fes({-2, 7, 3, 7, -9});
    inst.resize(cs.n_instance);
    auto a = execute(cs, inst, {});
    CHECK(check_satisfied(cs, a).ok);
    CHECK(a.value(m).to_signed() == 7);
  }

  TEST_CASE("padded rows") {
    CHECK(padded_rows_for(0) == 1);
    CHECK(padded_rows_for(1) == 1);
    CHECK(padded_rows_for(2) == 2);
    CHECK(padded_rows_for(3) == 4);
    CHECK(padded_rows_for(1025) == 2048);
  }

  TEST_CASE("MLP fixture constraint count") {
    Graph g = load_graph_file(zkeval::testing::fixture("mlp.json"));
    auto ds = fixtures::Dataset::load(zkeval::testing::fixture("mlp_data.json"));
    auto cs = lower_graph(g, calibrate_at(g, ds.inputs, 7));
    // Dot-product rows per output, then one rescale per layer output and one
    // ReLU per hidden unit; biases seed the accumulators.
    CHECK(cs.n_con() == 32 * 784 + 32 + 32 + 10 * 32 + 10);
    CHECK(cs.padded_rows() == 32768);
  }

  TEST_CASE("strict serialization") {
    const auto& keys = zkeval::testing::svm_keys();
    Bytes b = keys.m.cs.serialize();
    auto back = ConstraintSystem::deserialize(b);
    CHECK(back.digest() == keys.m.cs.digest());
    Bytes truncated(b.begin(), b.end() - 1);
    CHECK_THROWS_AS(ConstraintSystem::deserialize(truncated), FormatError);
    Bytes trailing = b;
    trailing.push_back(0);
    CHECK_THROWS_AS(ConstraintSystem::deserialize(trailing), FormatError);
    Bytes magic = b;
    magic[0] ^= 0xFF;
    CHECK_THROWS_AS(ConstraintSystem::deserialize(magic), FormatError);
  }

  TEST_CASE("witness matches plain quantized inference") {
    const auto& keys = zkeval::testing::svm_keys();
    for (size_t i = 0; i < 5; ++i) {
      Witness w = keys.m.witness(keys.ds.inputs[i]);
      auto q = run_quantized(keys.m.cs, keys.m.weights, keys.ds.inputs[i]);
      auto d = decode_outputs(keys.m.cs, w.y_tilde(keys.m.cs));
      CHECK(q[0].data == d[0].data);
      CHECK(check_satisfied(keys.m.cs, assignment_of(w, keys.m.weights)).ok);
      auto back = Witness::deserialize(w.serialize());
      CHECK(back.digest() == w.digest());
    }
  }

  TEST_CASE("H(W) changes with any weight") {
    const auto& keys = zkeval::testing::svm_keys();
    auto w = keys.m.weights;
    Digest h = hash_weight_column(w);
    CHECK(h == keys.m.weight_hash);
    w.back() = w.back() + Fe(1);
    CHECK(hash_weight_column(w) != h);
  }
}
