#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "zkeval/graph.hpp"
#include "zkeval/kernels.hpp"

namespace zkeval {

// Nonlinear functions realized as lookup tables. `param` is the activation
// scale for activations and the shift amount for kRescale.
enum class LookupFn : uint8_t { kReLU = 0, kSigmoid = 1, kExp = 2, kReciprocal = 3, kRescale = 4 };

const char* lookup_fn_name(LookupFn fn);
int64_t lookup_eval(LookupFn fn, int param, int64_t in);

// Bias addition folded into a contraction's accumulator start value.
struct FusedBias {
  std::string add_node;
  std::string weight;
  std::vector<int64_t> index;  // contraction output element -> weight element
};

// Scale assignment for a lowered graph: one global activation scale, a scale
// per weight tensor (fused biases live on the product grid).
struct QuantPlan {
  int act_scale = 7;
  std::map<std::string, int> weight_scales;
  std::map<std::string, FusedBias> fused;  // keyed by contraction node id
  std::map<std::string, std::string> fused_adds;  // add node -> its non-bias input

  int scale_of(const Graph& g, const std::string& ref) const;
};

QuantPlan plan_quantization(const Graph& lowered, int act_scale);

// Reference fixed-point inference on plain integers (no tables, no field).
// Values are returned by ref; ArgMax outputs carry their input's raws.
std::unordered_map<std::string, std::vector<int64_t>> run_reference_quantized(
    const Graph& lowered, const QuantPlan& plan, const std::vector<Tensor>& inputs,
    kernels::Policy policy = kernels::Policy::kParallel);

// Relative error used throughout calibration: ||q - f||_inf / ||f||_inf,
// falling back to the absolute error when f is identically zero.
double relative_error(const std::vector<double>& quantized, const std::vector<double>& reference);

}  // namespace zkeval
