#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zkeval/calibrate.hpp"
#include "zkeval/graph.hpp"

// Seeded desk-scale models and datasets. The checked-in files under
// fixtures/ are produced by tools/make_fixtures from these builders.
namespace zkeval::fixtures {

// x[1,d] -> x W + b, one output.
Graph regression(int64_t d = 10, uint64_t seed = 1);
// Linear scores with an ArgMax head.
Graph svm(int64_t d = 16, int64_t classes = 3, uint64_t seed = 2);
// d_in -> hidden (ReLU) -> out, ArgMax head when `argmax`.
Graph mlp(int64_t d_in = 784, int64_t hidden = 32, int64_t out = 10, uint64_t seed = 3, bool argmax = true);
// 1x16x16 -> Conv2D 8x3x3 -> ReLU -> 1568 -> 10, ArgMax head.
Graph cnn(uint64_t seed = 4);

struct Dataset {
  std::string task;  // "classification" or "regression"
  std::vector<Sample> inputs;
  std::vector<std::vector<double>> labels;

  size_t size() const { return inputs.size(); }
  nlohmann::json to_json() const;
  static Dataset from_json(const nlohmann::json& j);
  static Dataset load(const std::string& path);
};

// Inputs drawn uniformly from [lo, hi). Classification labels are the float
// model's class with every `flip_every`-th sample moved to the next class
// (0 keeps all); regression labels are the float output plus small noise.
Dataset make_dataset(const Graph& g, const std::string& task, size_t n, uint64_t seed, double lo, double hi,
                     size_t flip_every = 0);

}  // namespace zkeval::fixtures
