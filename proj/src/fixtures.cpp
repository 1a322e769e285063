#include "zkeval/fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "zkeval/errors.hpp"
#include "zkeval/pipeline.hpp"

namespace zkeval::fixtures {

using nlohmann::json;

namespace {

json tensor(const Shape& shape, std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  json data = json::array();
  for (int64_t i = 0; i < shape_size(shape); ++i) {
    // Short decimals keep the checked-in files readable and diff-friendly.
    double v = std::round(dist(rng) * 1e6) / 1e6;
    data.push_back(v);
  }
  return {{"shape", shape}, {"data", data}};
}

json node(const std::string& id, const std::string& op, std::vector<std::string> inputs, json attrs = json::object()) {
  json n = {{"id", id}, {"op", op}, {"inputs", inputs}};
  if (!attrs.empty()) n["attrs"] = attrs;
  return n;
}

json doc(json inputs, json weights, json nodes, std::vector<std::string> outputs) {
  return {{"ir_version", 1}, {"inputs", inputs}, {"weights", weights}, {"nodes", nodes}, {"outputs", outputs}};
}

}  // namespace

Graph regression(int64_t d, uint64_t seed) {
  std::mt19937_64 rng(seed);
  json w = {{"w", tensor({d, 1}, rng, 1.0 / std::sqrt(static_cast<double>(d)))}, {"b", tensor({1, 1}, rng, 0.1)}};
  // Targets centred away from zero, like a price or a temperature.
  w["b"]["data"][0] = w["b"]["data"][0].get<double>() + 2.0;
  json nodes = {node("mm", "MatMul", {"x", "w"}), node("y", "Add", {"mm", "b"})};
  return load_graph(doc(json::array({{{"name", "x"}, {"shape", {1, d}}}}), w, nodes, {"y"}));
}

Graph svm(int64_t d, int64_t classes, uint64_t seed) {
  std::mt19937_64 rng(seed);
  json w = {{"w", tensor({d, classes}, rng, 1.0 / std::sqrt(static_cast<double>(d)))},
            {"b", tensor({1, classes}, rng, 0.1)}};
  json nodes = {node("scores", "MatMul", {"x", "w"}), node("logits", "Add", {"scores", "b"}),
                node("class", "ArgMax", {"logits"})};
  return load_graph(doc(json::array({{{"name", "x"}, {"shape", {1, d}}}}), w, nodes, {"class"}));
}

Graph mlp(int64_t d_in, int64_t hidden, int64_t out, uint64_t seed, bool argmax) {
  std::mt19937_64 rng(seed);
  json w = {{"w1", tensor({d_in, hidden}, rng, 1.0 / std::sqrt(static_cast<double>(d_in)))},
            {"b1", tensor({1, hidden}, rng, 0.1)},
            {"w2", tensor({hidden, out}, rng, 1.0 / std::sqrt(static_cast<double>(hidden)))},
            {"b2", tensor({1, out}, rng, 0.1)}};
  json nodes = {node("fc1", "MatMul", {"x", "w1"}), node("fc1_bias", "Add", {"fc1", "b1"}),
                node("h", "ReLU", {"fc1_bias"}),     node("fc2", "MatMul", {"h", "w2"}),
                node("logits", "Add", {"fc2", "b2"})};
  std::string head = "logits";
  if (argmax) {
    nodes.push_back(node("class", "ArgMax", {"logits"}));
    head = "class";
  }
  return load_graph(doc(json::array({{{"name", "x"}, {"shape", {1, d_in}}}}), w, nodes, {head}));
}

Graph cnn(uint64_t seed) {
  std::mt19937_64 rng(seed);
  json w = {{"k", tensor({8, 1, 3, 3}, rng, 1.0 / 3.0)},
            {"kb", tensor({8, 1, 1}, rng, 0.1)},
            {"w", tensor({1568, 10}, rng, 1.0 / std::sqrt(1568.0))},
            {"b", tensor({1, 10}, rng, 0.1)}};
  json nodes = {node("conv", "Conv2D", {"x", "k"}, {{"stride", 1}, {"padding", 0}}),
                node("conv_bias", "Add", {"conv", "kb"}),
                node("act", "ReLU", {"conv_bias"}),
                node("flat", "Reshape", {"act"}, {{"shape", {1, 1568}}}),
                node("fc", "MatMul", {"flat", "w"}),
                node("logits", "Add", {"fc", "b"}),
                node("class", "ArgMax", {"logits"})};
  return load_graph(doc(json::array({{{"name", "x"}, {"shape", {1, 16, 16}}}}), w, nodes, {"class"}));
}

json Dataset::to_json() const {
  json samples = json::array();
  for (size_t i = 0; i < inputs.size(); ++i) {
    json in = json::array();
    for (const auto& t : inputs[i]) {
      json tj = tensor_to_json(t);
      tj["name"] = t.name;
      in.push_back(tj);
    }
    samples.push_back({{"inputs", in}, {"label", labels[i]}});
  }
  return {{"format", "zkeval-dataset/1"}, {"task", task}, {"samples", samples}};
}

Dataset Dataset::from_json(const json& j) {
  try {
    if (j.at("format") != "zkeval-dataset/1") throw SchemaError("unsupported dataset format");
    Dataset d;
    d.task = j.at("task").get<std::string>();
    if (d.task != "classification" && d.task != "regression") throw SchemaError("unknown dataset task " + d.task);
    for (const auto& s : j.at("samples")) {
      Sample in;
      for (const auto& t : s.at("inputs")) in.push_back(tensor_from_json(t, t.value("name", "")));
      d.inputs.push_back(std::move(in));
      d.labels.push_back(s.at("label").get<std::vector<double>>());
    }
    return d;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad dataset: ") + e.what());
  }
}

Dataset Dataset::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open dataset " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return from_json(json::parse(ss.str()));
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

Dataset make_dataset(const Graph& g, const std::string& task, size_t n, uint64_t seed, double lo, double hi,
                     size_t flip_every) {
  Dataset d;
  d.task = task;
  d.inputs = random_samples(g, n, seed, lo, hi);
  // Round inputs to 4 decimals so the JSON round-trips exactly.
  for (auto& s : d.inputs)
    for (auto& t : s)
      for (auto& v : t.data) v = std::round(v * 1e4) / 1e4;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> noise(0.0, 0.05);
  const std::string head = circuit_output_ref(g, g.outputs[0]);
  for (size_t i = 0; i < n; ++i) {
    auto vals = infer_float_all(g, d.inputs[i]);
    const Tensor& y = vals.at(head);
    if (task == "classification") {
      int64_t best = 0;
      for (size_t k = 1; k < y.data.size(); ++k)
        if (y.data[k] > y.data[best]) best = static_cast<int64_t>(k);
      if (flip_every && i % flip_every == flip_every - 1) best = (best + 1) % static_cast<int64_t>(y.data.size());
      d.labels.push_back({static_cast<double>(best)});
    } else {
      std::vector<double> l;
      for (double v : y.data) l.push_back(std::round((v + noise(rng)) * 1e4) / 1e4);
      d.labels.push_back(l);
    }
  }
  return d;
}

}  // namespace zkeval::fixtures
