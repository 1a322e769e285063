#include "zkeval/pipeline.hpp"

#include <random>

namespace zkeval {

CompiledModel compile_model(const Graph& g, const CalibrationReport& cal) {
  CompiledModel m;
  m.cal = cal;
  m.cs = lower_graph(g, cal);
  m.weights = weight_column(m.cs, lower_to_einsum(g).weights);
  m.circuit_digest = m.cs.digest();
  m.weight_hash = hash_weight_column(m.weights);
  return m;
}

Witness CompiledModel::witness(const std::vector<Tensor>& inputs) const {
  return make_witness(cs, circuit_digest, weights, weight_hash, instance_for(cs, inputs, weight_hash));
}

std::vector<Sample> random_samples(const Graph& g, size_t n, uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<Sample> out(n);
  for (auto& s : out)
    for (const auto& in : g.inputs) {
      Tensor t;
      t.name = in.name;
      t.shape = in.shape;
      t.data.resize(static_cast<size_t>(shape_size(in.shape)));
      for (auto& v : t.data) v = dist(rng);
      s.push_back(std::move(t));
    }
  return out;
}

Digest dataset_digest(const std::vector<Sample>& inputs, const std::vector<std::vector<double>>& labels) {
  Sha256 h;
  h.update(std::string_view("zkeval.dataset.v1"));
  ByteWriter w;
  w.u64(inputs.size());
  for (const auto& s : inputs) {
    w.u64(s.size());
    for (const auto& t : s) {
      w.u64(t.shape.size());
      for (auto d : t.shape) w.i64(d);
      w.u64(t.data.size());
      for (double v : t.data) w.f64(v);
    }
  }
  w.u64(labels.size());
  for (const auto& l : labels) {
    w.u64(l.size());
    for (double v : l) w.f64(v);
  }
  h.update(w.bytes());
  return h.finish();
}

}  // namespace zkeval
