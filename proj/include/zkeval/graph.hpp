#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "zkeval/kernels.hpp"

namespace zkeval {

using Shape = std::vector<int64_t>;

int64_t shape_size(const Shape& s);
std::string shape_str(const Shape& s);

struct Tensor {
  std::string name;
  Shape shape;
  std::vector<double> data;  // row-major, empty when only the shape is known

  int64_t size() const { return shape_size(shape); }
};

enum class OpKind {
  kEinsum,
  kAdd,
  kSub,
  kMul,
  kMatMul,
  kConv2D,
  kReLU,
  kSigmoid,
  kExp,
  kReciprocal,
  kSum,
  kMax,
  kMin,
  kArgMax,
  kReshape,
  kConstant,
  kIm2Col,
};

const char* op_name(OpKind k);
OpKind op_from_name(const std::string& name);
bool is_lookup_activation(OpKind k);

struct Node {
  std::string id;
  OpKind kind = OpKind::kAdd;
  std::vector<std::string> inputs;

  // Op attributes; only the ones relevant to `kind` are meaningful.
  std::string equation;            // Einsum
  int64_t stride = 1;              // Conv2D, Im2Col
  int64_t padding = 0;             // Conv2D, Im2Col
  int64_t kernel_h = 0, kernel_w = 0;  // Im2Col
  Shape reshape;                   // Reshape
  std::optional<int64_t> axis;     // Sum, Max, Min (keepdims); none = all elements
  Tensor constant;                 // Constant (public)

  Shape output_shape;  // filled by validation
};

enum class RefKind { kInput, kWeight, kNode };

struct TensorSpec {
  std::string name;
  Shape shape;
};

// Computational graph f(., W). Weights are private named constants; nodes are
// kept in topological order.
class Graph {
 public:
  std::vector<TensorSpec> inputs;
  std::map<std::string, Tensor> weights;  // ordered by name
  std::vector<Node> nodes;
  std::vector<std::string> outputs;

  // Checks every invariant and fills in output shapes. Throws SchemaError,
  // ShapeError or CycleError.
  void validate();

  RefKind ref_kind(const std::string& ref) const;
  const Shape& shape_of(const std::string& ref) const;
  const Node& node(const std::string& id) const;
  bool has_node(const std::string& id) const { return node_index_.count(id) != 0; }
  // Number of node inputs referencing `ref`, plus one per graph output.
  int use_count(const std::string& ref) const;

  int64_t param_count() const;

 private:
  std::unordered_map<std::string, size_t> node_index_;
  std::unordered_map<std::string, size_t> input_index_;
  std::unordered_map<std::string, int> uses_;
};

Graph load_graph(const nlohmann::json& doc);
Graph load_graph_text(const std::string& text);
Graph load_graph_file(const std::string& path);
nlohmann::json graph_to_json(const Graph& g, bool base64_payloads = false);

nlohmann::json tensor_to_json(const Tensor& t, bool base64 = false);
Tensor tensor_from_json(const nlohmann::json& j, const std::string& name = {});

// Reference real-arithmetic forward pass. Returns every node value by id
// (inputs and weights included).
std::unordered_map<std::string, Tensor> infer_float_all(const Graph& g, const std::vector<Tensor>& inputs,
                                                        kernels::Policy policy = kernels::Policy::kParallel);
// Single-input, first-output convenience form.
Tensor infer_float(const Graph& g, const Tensor& x, kernels::Policy policy = kernels::Policy::kParallel);

int64_t count_macs(const Graph& g);
int64_t count_element_ops(const Graph& g);

// Replaces MatMul and Conv2D by Einsum contractions (Conv2D through an Im2Col
// gather). Activations and wiring pass through untouched.
Graph lower_to_einsum(const Graph& g);

// Outputs whose node is ArgMax are post-processed outside the circuit; this
// returns the ref whose values the circuit exposes.
std::string circuit_output_ref(const Graph& g, const std::string& output);
bool is_argmax_output(const Graph& g, const std::string& output);

// Shared index helpers (used by float, quantized and circuit paths).
std::vector<int64_t> broadcast_index(const Shape& out, const Shape& in);
Shape broadcast_shapes(const Shape& a, const Shape& b);
// Gather indices for im2col; -1 marks a zero-padding position.
std::vector<int64_t> im2col_index(const Shape& in_chw, int64_t kh, int64_t kw, int64_t stride, int64_t pad);
// Input flat indices feeding each output element of a reduction.
std::vector<std::vector<int64_t>> reduction_groups(const Shape& in, std::optional<int64_t> axis);

}  // namespace zkeval
