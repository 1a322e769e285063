#include <doctest.h>

#include "support.hpp"
#include "zkeval/calibrate.hpp"
#include "zkeval/errors.hpp"
#include "zkeval/graph.hpp"

using namespace zkeval;
using zkeval::testing::fixture;

namespace {

const char* kTiny = R"({"ir_version": 1,
  "inputs": [{"name": "x", "shape": [1, 2]}],
  "weights": {"w": {"shape": [2, 1], "data": [0.5, -1.0]}},
  "nodes": [{"id": "y", "op": "MatMul", "inputs": ["x", "w"]}],
  "outputs": ["y"]})";

Tensor input(const Shape& shape, std::vector<double> data) { return {"x", shape, std::move(data)}; }

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("tiny matmul: MACs, parameters and value") {
    Graph g = load_graph_text(kTiny);
    CHECK(count_macs(g) == 2);
    CHECK(g.param_count() == 2);
    Tensor y = infer_float(g, input({1, 2}, {2.0, 3.0}));
    CHECK(y.data.at(0) == doctest::Approx(2.0 * 0.5 - 3.0));
  }

  TEST_CASE("MLP fixture counts") {
    Graph g = load_graph_file(fixture("mlp.json"));
    CHECK(count_macs(g) == 784 * 32 + 32 * 10);
    int64_t params = 0;
    for (const auto& [name, t] : g.weights) params += t.size();
    CHECK(g.param_count() == params);
    CHECK(params == 784 * 32 + 32 + 32 * 10 + 10);
  }

  TEST_CASE("cycles, unknown ops and bad shapes are rejected") {
    const char* cyc = R"({"ir_version": 1, "inputs": [{"name": "x", "shape": [1, 2]}], "weights": {},
      "nodes": [{"id": "a", "op": "Add", "inputs": ["x", "b"]}, {"id": "b", "op": "Add", "inputs": ["a", "x"]}],
      "outputs": ["b"]})";
    CHECK_THROWS_AS(load_graph_text(cyc), CycleError);
    const char* unk = R"({"ir_version": 1, "inputs": [{"name": "x", "shape": [1, 2]}], "weights": {},
      "nodes": [{"id": "a", "op": "Softmax", "inputs": ["x"]}], "outputs": ["a"]})";
    CHECK_THROWS_AS(load_graph_text(unk), UnsupportedOpError);
    const char* shp = R"({"ir_version": 1, "inputs": [{"name": "x", "shape": [1, 3]}],
      "weights": {"w": {"shape": [2, 1], "data": [1, 2]}},
      "nodes": [{"id": "y", "op": "MatMul", "inputs": ["x", "w"]}], "outputs": ["y"]})";
    CHECK_THROWS_AS(load_graph_text(shp), ShapeError);
    CHECK_THROWS_AS(load_graph_text("{\"ir_version\": 9}"), SchemaError);
  }

  TEST_CASE("regression fixture equals a hand dot product") {
    Graph g = load_graph_file(fixture("regression.json"));
    auto ds = fixtures::Dataset::load(fixture("regression_data.json"));
    const auto& x = ds.inputs[0][0].data;
    const auto& w = g.weights.at("w").data;
    double acc = g.weights.at("b").data[0];
    for (size_t i = 0; i < x.size(); ++i) acc += x[i] * w[i];
    CHECK(infer_float(g, ds.inputs[0][0]).data[0] == doctest::Approx(acc).epsilon(1e-12));
  }

  TEST_CASE("CNN convolution equals direct loops") {
    Graph g = load_graph_file(fixture("cnn.json"));
    auto ds = fixtures::Dataset::load(fixture("cnn_data.json"));
    auto vals = infer_float_all(g, ds.inputs[0]);
    const auto& x = ds.inputs[0][0].data;  // [1,16,16]
    const auto& k = g.weights.at("k").data;  // [8,1,3,3]
    const auto& conv = vals.at("conv").data;  // [8,14,14]
    REQUIRE(conv.size() == 8 * 14 * 14);
    for (int o = 0; o < 8; ++o)
      for (int i = 0; i < 14; ++i)
        for (int j = 0; j < 14; ++j) {
          double acc = 0;
          for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v) acc += x[(i + u) * 16 + (j + v)] * k[o * 9 + u * 3 + v];
          CHECK(conv[(o * 14 + i) * 14 + j] == doctest::Approx(acc).epsilon(1e-12));
        }
  }

  TEST_CASE("JSON round trip preserves the function") {
    Graph g = load_graph_file(fixture("cnn.json"));
    Graph h = load_graph(graph_to_json(g));
    auto ds = fixtures::Dataset::load(fixture("cnn_data.json"));
    CHECK(infer_float(g, ds.inputs[1][0]).data == infer_float(h, ds.inputs[1][0]).data);
  }

  TEST_CASE("serial and parallel float inference agree") {
    Graph g = load_graph_file(fixture("mlp.json"));
    auto ds = fixtures::Dataset::load(fixture("mlp_data.json"));
    CHECK(infer_float(g, ds.inputs[0][0], kernels::Policy::kSerial).data ==
          infer_float(g, ds.inputs[0][0], kernels::Policy::kParallel).data);
  }
}

TEST_SUITE("calibrate") {
  TEST_CASE("an exactly representable model calibrates at the smallest scale") {
    const char* id = R"({"ir_version": 1, "inputs": [{"name": "x", "shape": [1, 2]}],
      "weights": {"w": {"shape": [2, 2], "data": [1, 0, 0, 1]}},
      "nodes": [{"id": "y", "op": "MatMul", "inputs": ["x", "w"]}], "outputs": ["y"]})";
    Graph g = load_graph_text(id);
    std::vector<Sample> s{{input({1, 2}, {0.25, -0.5})}, {input({1, 2}, {1.0, 0.0625})}};
    auto rep = calibrate(g, s, CalibrationMode::kAccuracy);
    CHECK(rep.scale == 4);
    CHECK(rep.max_rel_error == 0.0);
  }

  TEST_CASE("resources mode on the MLP fixture meets five percent") {
    Graph g = load_graph_file(fixture("mlp.json"));
    auto ds = fixtures::Dataset::load(fixture("mlp_data.json"));
    auto rep = calibrate(g, ds.inputs, CalibrationMode::kResources);
    CHECK(rep.max_rel_error <= 0.05);
    CHECK(rep.n_con > 0);
    CHECK(rep.padded_rows == padded_rows_for(rep.n_con));
    auto again = CalibrationReport::from_json(rep.to_json());
    CHECK(again.to_json() == rep.to_json());
  }

  TEST_CASE("no scale meets an impossible bound") {
    Graph g = load_graph_file(fixture("svm.json"));
    auto ds = fixtures::Dataset::load(fixture("svm_data.json"));
    CalibrationOptions o;
    o.accuracy_bound = 1e-12;
    o.max_scale = 6;
    CHECK_THROWS_AS(calibrate(g, ds.inputs, CalibrationMode::kAccuracy, o), CalibrationFailure);
  }
}
