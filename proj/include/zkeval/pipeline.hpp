#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zkeval/calibrate.hpp"
#include "zkeval/circuit.hpp"
#include "zkeval/graph.hpp"
#include "zkeval/hash.hpp"
#include "zkeval/witness.hpp"

namespace zkeval {

// A graph lowered at a fixed calibration, with its weight column.
struct CompiledModel {
  CalibrationReport cal;
  ConstraintSystem cs;
  std::vector<Fe> weights;
  Digest circuit_digest{};
  Digest weight_hash{};

  Witness witness(const std::vector<Tensor>& inputs) const;
};

CompiledModel compile_model(const Graph& g, const CalibrationReport& cal);

// Uniform inputs in [lo, hi) for every graph input.
std::vector<Sample> random_samples(const Graph& g, size_t n, uint64_t seed, double lo = -1.0, double hi = 1.0);

// Order-sensitive digest of a labelled dataset (inputs then labels).
Digest dataset_digest(const std::vector<Sample>& inputs, const std::vector<std::vector<double>>& labels);

}  // namespace zkeval
