#include "zkeval/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "zkeval/einsum.hpp"
#include "zkeval/errors.hpp"
#include "zkeval/hash.hpp"

namespace zkeval {

using nlohmann::json;

int64_t shape_size(const Shape& s) {
  int64_t n = 1;
  for (auto d : s) n *= d;
  return n;
}

std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ']';
  return os.str();
}

namespace {

struct OpEntry {
  OpKind kind;
  const char* name;
};

constexpr OpEntry kOps[] = {
    {OpKind::kEinsum, "Einsum"},   {OpKind::kAdd, "Add"},         {OpKind::kSub, "Sub"},
    {OpKind::kMul, "Mul"},         {OpKind::kMatMul, "MatMul"},   {OpKind::kConv2D, "Conv2D"},
    {OpKind::kReLU, "ReLU"},       {OpKind::kSigmoid, "Sigmoid"}, {OpKind::kExp, "Exp"},
    {OpKind::kReciprocal, "Reciprocal"}, {OpKind::kSum, "Sum"},   {OpKind::kMax, "Max"},
    {OpKind::kMin, "Min"},         {OpKind::kArgMax, "ArgMax"},   {OpKind::kReshape, "Reshape"},
    {OpKind::kConstant, "Constant"}, {OpKind::kIm2Col, "Im2Col"},
};

size_t expected_arity(OpKind k) {
  switch (k) {
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
    case OpKind::kMatMul:
    case OpKind::kConv2D:
      return 2;
    case OpKind::kConstant:
      return 0;
    case OpKind::kEinsum:
      return SIZE_MAX;  // checked against the equation
    default:
      return 1;
  }
}

Shape parse_shape(const json& j, const std::string& what) {
  if (!j.is_array()) throw SchemaError(what + ": shape must be an array");
  Shape s;
  for (const auto& d : j) {
    if (!d.is_number_integer() || d.get<int64_t>() <= 0) throw SchemaError(what + ": shape entries must be positive integers");
    s.push_back(d.get<int64_t>());
  }
  return s;
}

}  // namespace

const char* op_name(OpKind k) {
  for (const auto& e : kOps)
    if (e.kind == k) return e.name;
  return "?";
}

OpKind op_from_name(const std::string& name) {
  for (const auto& e : kOps)
    if (name == e.name) return e.kind;
  throw UnsupportedOpError("unsupported op '" + name + "'");
}

bool is_lookup_activation(OpKind k) {
  return k == OpKind::kReLU || k == OpKind::kSigmoid || k == OpKind::kExp || k == OpKind::kReciprocal;
}

// ---------------------------------------------------------------------------
// Index helpers

Shape broadcast_shapes(const Shape& a, const Shape& b) {
  size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (size_t i = 0; i < rank; ++i) {
    int64_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    int64_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1)
      throw ShapeError("cannot broadcast " + shape_str(a) + " with " + shape_str(b));
    out[i] = std::max(da, db);
  }
  return out;
}

std::vector<int64_t> broadcast_index(const Shape& out, const Shape& in) {
  const size_t rank = out.size();
  if (in.size() > rank) throw ShapeError("broadcast source has higher rank than target");
  std::vector<int64_t> in_stride(rank, 0);
  int64_t s = 1;
  for (size_t i = in.size(); i-- > 0;) {
    size_t od = i + (rank - in.size());
    if (in[i] != 1 && in[i] != out[od]) throw ShapeError("cannot broadcast " + shape_str(in) + " to " + shape_str(out));
    in_stride[od] = in[i] == 1 ? 0 : s;
    s *= in[i];
  }
  const int64_t n = shape_size(out);
  std::vector<int64_t> idx(static_cast<size_t>(n));
  std::vector<int64_t> pos(rank, 0);
  for (int64_t k = 0; k < n; ++k) {
    int64_t o = 0;
    for (size_t d = 0; d < rank; ++d) o += pos[d] * in_stride[d];
    idx[static_cast<size_t>(k)] = o;
    for (size_t d = rank; d-- > 0;) {
      if (++pos[d] < out[d]) break;
      pos[d] = 0;
    }
  }
  return idx;
}

std::vector<int64_t> im2col_index(const Shape& in, int64_t kh, int64_t kw, int64_t stride, int64_t pad) {
  const int64_t C = in[0], H = in[1], W = in[2];
  const int64_t oh = (H + 2 * pad - kh) / stride + 1;
  const int64_t ow = (W + 2 * pad - kw) / stride + 1;
  const int64_t cols = oh * ow;
  std::vector<int64_t> idx(static_cast<size_t>(C * kh * kw * cols), -1);
  for (int64_t c = 0; c < C; ++c)
    for (int64_t i = 0; i < kh; ++i)
      for (int64_t j = 0; j < kw; ++j) {
        int64_t row = (c * kh + i) * kw + j;
        for (int64_t y = 0; y < oh; ++y)
          for (int64_t x = 0; x < ow; ++x) {
            int64_t sy = y * stride + i - pad, sx = x * stride + j - pad;
            if (sy >= 0 && sy < H && sx >= 0 && sx < W)
              idx[static_cast<size_t>(row * cols + y * ow + x)] = (c * H + sy) * W + sx;
          }
      }
  return idx;
}

std::vector<std::vector<int64_t>> reduction_groups(const Shape& in, std::optional<int64_t> axis) {
  const int64_t n = shape_size(in);
  if (!axis) {
    std::vector<int64_t> all(static_cast<size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    return {std::move(all)};
  }
  int64_t ax = *axis;
  int64_t outer = 1, inner = 1;
  for (int64_t d = 0; d < ax; ++d) outer *= in[static_cast<size_t>(d)];
  for (size_t d = static_cast<size_t>(ax) + 1; d < in.size(); ++d) inner *= in[d];
  const int64_t len = in[static_cast<size_t>(ax)];
  std::vector<std::vector<int64_t>> groups;
  groups.reserve(static_cast<size_t>(outer * inner));
  for (int64_t o = 0; o < outer; ++o)
    for (int64_t i = 0; i < inner; ++i) {
      std::vector<int64_t> g(static_cast<size_t>(len));
      for (int64_t k = 0; k < len; ++k) g[static_cast<size_t>(k)] = (o * len + k) * inner + i;
      groups.push_back(std::move(g));
    }
  return groups;
}

// ---------------------------------------------------------------------------
// Graph

RefKind Graph::ref_kind(const std::string& ref) const {
  if (input_index_.count(ref)) return RefKind::kInput;
  if (weights.count(ref)) return RefKind::kWeight;
  if (node_index_.count(ref)) return RefKind::kNode;
  throw SchemaError("unknown reference '" + ref + "'");
}

const Shape& Graph::shape_of(const std::string& ref) const {
  if (auto it = input_index_.find(ref); it != input_index_.end()) return inputs[it->second].shape;
  if (auto it = weights.find(ref); it != weights.end()) return it->second.shape;
  if (auto it = node_index_.find(ref); it != node_index_.end()) return nodes[it->second].output_shape;
  throw SchemaError("unknown reference '" + ref + "'");
}

const Node& Graph::node(const std::string& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw SchemaError("unknown node '" + id + "'");
  return nodes[it->second];
}

int Graph::use_count(const std::string& ref) const {
  auto it = uses_.find(ref);
  return it == uses_.end() ? 0 : it->second;
}

int64_t Graph::param_count() const {
  int64_t n = 0;
  for (const auto& [name, t] : weights) n += t.size();
  return n;
}

namespace {

Shape infer_shape(const Node& n, const std::vector<Shape>& in) {
  auto need_rank = [&](size_t i, size_t r) {
    if (in[i].size() != r)
      throw ShapeError(std::string(op_name(n.kind)) + " node '" + n.id + "' expects rank-" + std::to_string(r) +
                       " input, got " + shape_str(in[i]));
  };
  switch (n.kind) {
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul:
      return broadcast_shapes(in[0], in[1]);
    case OpKind::kMatMul:
      need_rank(0, 2);
      need_rank(1, 2);
      if (in[0][1] != in[1][0])
        throw ShapeError("MatMul '" + n.id + "' inner dimensions differ: " + shape_str(in[0]) + " x " + shape_str(in[1]));
      return {in[0][0], in[1][1]};
    case OpKind::kConv2D: {
      need_rank(0, 3);
      need_rank(1, 4);
      if (in[0][0] != in[1][1]) throw ShapeError("Conv2D '" + n.id + "' channel mismatch");
      if (n.stride < 1 || n.padding < 0) throw SchemaError("Conv2D '" + n.id + "' has invalid stride/padding");
      int64_t oh = (in[0][1] + 2 * n.padding - in[1][2]) / n.stride + 1;
      int64_t ow = (in[0][2] + 2 * n.padding - in[1][3]) / n.stride + 1;
      if (oh <= 0 || ow <= 0) throw ShapeError("Conv2D '" + n.id + "' kernel larger than padded input");
      return {in[1][0], oh, ow};
    }
    case OpKind::kIm2Col: {
      need_rank(0, 3);
      if (n.stride < 1 || n.padding < 0 || n.kernel_h < 1 || n.kernel_w < 1)
        throw SchemaError("Im2Col '" + n.id + "' has invalid attributes");
      int64_t oh = (in[0][1] + 2 * n.padding - n.kernel_h) / n.stride + 1;
      int64_t ow = (in[0][2] + 2 * n.padding - n.kernel_w) / n.stride + 1;
      if (oh <= 0 || ow <= 0) throw ShapeError("Im2Col '" + n.id + "' kernel larger than padded input");
      return {in[0][0] * n.kernel_h * n.kernel_w, oh * ow};
    }
    case OpKind::kReLU:
    case OpKind::kSigmoid:
    case OpKind::kExp:
    case OpKind::kReciprocal:
      return in[0];
    case OpKind::kSum:
    case OpKind::kMax:
    case OpKind::kMin: {
      if (!n.axis) return {1};
      if (*n.axis < 0 || *n.axis >= static_cast<int64_t>(in[0].size()))
        throw ShapeError("reduction axis out of range in '" + n.id + "'");
      Shape s = in[0];
      s[static_cast<size_t>(*n.axis)] = 1;
      return s;
    }
    case OpKind::kArgMax:
      return {1};
    case OpKind::kReshape:
      if (shape_size(n.reshape) != shape_size(in[0]))
        throw ShapeError("Reshape '" + n.id + "' changes element count: " + shape_str(in[0]) + " -> " + shape_str(n.reshape));
      return n.reshape;
    case OpKind::kConstant:
      return n.constant.shape;
    case OpKind::kEinsum: {
      auto spec = EinsumSpec::parse(n.equation);
      if (spec.operands.size() != in.size()) throw ShapeError("Einsum '" + n.id + "' operand count mismatch");
      return einsum_layout(spec, in).output_shape;
    }
  }
  return {};
}

}  // namespace

void Graph::validate() {
  node_index_.clear();
  input_index_.clear();
  uses_.clear();
  std::set<std::string> names;
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].shape.empty()) throw SchemaError("input '" + inputs[i].name + "' has empty shape");
    if (!names.insert(inputs[i].name).second) throw SchemaError("duplicate name '" + inputs[i].name + "'");
    input_index_[inputs[i].name] = i;
  }
  for (auto& [name, t] : weights) {
    if (!names.insert(name).second) throw SchemaError("duplicate name '" + name + "'");
    if (t.data.size() != static_cast<size_t>(t.size()))
      throw SchemaError("weight '" + name + "' payload length does not match shape");
    for (double v : t.data)
      if (!std::isfinite(v)) throw SchemaError("weight '" + name + "' has non-finite values");
  }
  std::set<std::string> all_ids;
  for (const auto& n : nodes) all_ids.insert(n.id);
  for (size_t i = 0; i < nodes.size(); ++i) {
    Node& n = nodes[i];
    if (n.id.empty()) throw SchemaError("node with empty id");
    if (!names.insert(n.id).second) throw SchemaError("duplicate name '" + n.id + "'");
    size_t arity = expected_arity(n.kind);
    if (arity != SIZE_MAX && n.inputs.size() != arity)
      throw SchemaError(std::string(op_name(n.kind)) + " node '" + n.id + "' expects " + std::to_string(arity) + " inputs");
    if (n.kind == OpKind::kEinsum && (n.inputs.empty() || n.inputs.size() > 2))
      throw SchemaError("Einsum node '" + n.id + "' needs one or two inputs");
    if (n.kind == OpKind::kConstant && n.constant.data.size() != static_cast<size_t>(n.constant.size()))
      throw SchemaError("Constant '" + n.id + "' payload length does not match shape");
    std::vector<Shape> in_shapes;
    for (const auto& ref : n.inputs) {
      if (ref == n.id) throw CycleError("node '" + n.id + "' references itself");
      if (!input_index_.count(ref) && !weights.count(ref) && !node_index_.count(ref)) {
        if (all_ids.count(ref)) throw CycleError("node '" + n.id + "' references later node '" + ref + "'");
        throw SchemaError("node '" + n.id + "' references unknown '" + ref + "'");
      }
      in_shapes.push_back(shape_of(ref));
      ++uses_[ref];
    }
    Shape s = infer_shape(n, in_shapes);
    if (!n.output_shape.empty() && n.output_shape != s)
      throw ShapeError("node '" + n.id + "' declares shape " + shape_str(n.output_shape) + " but computes " + shape_str(s));
    n.output_shape = s;
    node_index_[n.id] = i;
  }
  if (outputs.empty()) throw SchemaError("graph has no outputs");
  for (const auto& o : outputs) {
    ref_kind(o);
    ++uses_[o];
  }
  for (const auto& [name, t] : weights)
    if (use_count(name) == 0) throw SchemaError("weight '" + name + "' is not referenced by any node");
  for (const auto& n : nodes)
    if (n.kind == OpKind::kArgMax &&
        std::find(outputs.begin(), outputs.end(), n.id) == outputs.end())
      throw SchemaError("ArgMax '" + n.id + "' must be a graph output (it is evaluated outside the circuit)");

  // Every output must depend on some graph input.
  std::set<std::string> live;
  for (const auto& in : inputs) live.insert(in.name);
  for (const auto& n : nodes)
    for (const auto& ref : n.inputs)
      if (live.count(ref)) {
        live.insert(n.id);
        break;
      }
  for (const auto& o : outputs)
    if (!live.count(o)) throw SchemaError("output '" + o + "' is not reachable from the graph inputs");
}

// ---------------------------------------------------------------------------
// JSON

json tensor_to_json(const Tensor& t, bool base64) {
  json j;
  j["shape"] = t.shape;
  if (base64) {
    ByteWriter w;
    for (double v : t.data) w.f64(v);
    j["data_b64"] = base64_encode(w.bytes());
  } else {
    j["data"] = t.data;
  }
  return j;
}

Tensor tensor_from_json(const json& j, const std::string& name) {
  if (!j.is_object()) throw SchemaError("tensor '" + name + "' must be an object");
  Tensor t;
  t.name = name;
  if (!j.contains("shape")) throw SchemaError("tensor '" + name + "' has no shape");
  t.shape = parse_shape(j.at("shape"), "tensor '" + name + "'");
  if (j.contains("data")) {
    if (!j.at("data").is_array()) throw SchemaError("tensor '" + name + "' data must be an array");
    for (const auto& v : j.at("data")) {
      if (!v.is_number()) throw SchemaError("tensor '" + name + "' data must be numeric");
      t.data.push_back(v.get<double>());
    }
  } else if (j.contains("data_b64")) {
    Bytes raw = base64_decode(j.at("data_b64").get<std::string>());
    if (raw.size() % 8) throw SchemaError("tensor '" + name + "' base64 payload is not a multiple of 8 bytes");
    ByteReader r(raw);
    while (r.remaining()) t.data.push_back(r.f64());
  } else {
    throw SchemaError("tensor '" + name + "' has no data or data_b64");
  }
  if (t.data.size() != static_cast<size_t>(t.size()))
    throw SchemaError("tensor '" + name + "' payload length " + std::to_string(t.data.size()) + " does not match shape " +
                      shape_str(t.shape));
  return t;
}

Graph load_graph(const json& doc) {
  try {
    if (!doc.is_object()) throw SchemaError("graph document must be a JSON object");
    if (!doc.contains("ir_version") || doc.at("ir_version") != 1) throw SchemaError("unsupported or missing ir_version");
    Graph g;
    for (const auto& in : doc.at("inputs")) {
      g.inputs.push_back({in.at("name").get<std::string>(), parse_shape(in.at("shape"), "input")});
    }
    if (doc.contains("weights")) {
      for (auto& [name, t] : doc.at("weights").items()) g.weights[name] = tensor_from_json(t, name);
    }
    for (const auto& jn : doc.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<std::string>();
      n.kind = op_from_name(jn.at("op").get<std::string>());
      if (jn.contains("inputs"))
        for (const auto& r : jn.at("inputs")) n.inputs.push_back(r.get<std::string>());
      const json attrs = jn.value("attrs", json::object());
      switch (n.kind) {
        case OpKind::kEinsum:
          n.equation = attrs.at("equation").get<std::string>();
          break;
        case OpKind::kConv2D:
          n.stride = attrs.value("stride", int64_t{1});
          n.padding = attrs.value("padding", int64_t{0});
          break;
        case OpKind::kIm2Col:
          n.stride = attrs.value("stride", int64_t{1});
          n.padding = attrs.value("padding", int64_t{0});
          n.kernel_h = attrs.at("kernel_h").get<int64_t>();
          n.kernel_w = attrs.at("kernel_w").get<int64_t>();
          break;
        case OpKind::kReshape:
          n.reshape = parse_shape(attrs.at("shape"), "Reshape '" + n.id + "'");
          break;
        case OpKind::kSum:
        case OpKind::kMax:
        case OpKind::kMin:
          if (attrs.contains("axis")) n.axis = attrs.at("axis").get<int64_t>();
          break;
        case OpKind::kConstant:
          n.constant = tensor_from_json(attrs.at("tensor"), n.id);
          break;
        default:
          break;
      }
      if (jn.contains("output_shape")) n.output_shape = parse_shape(jn.at("output_shape"), "node '" + n.id + "'");
      g.nodes.push_back(std::move(n));
    }
    for (const auto& o : doc.at("outputs")) g.outputs.push_back(o.get<std::string>());
    g.validate();
    return g;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed graph document: ") + e.what());
  }
}

Graph load_graph_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("graph document is not valid JSON: ") + e.what());
  }
  return load_graph(doc);
}

Graph load_graph_file(const std::string& path) { return load_graph_text(read_text_file(path)); }

json graph_to_json(const Graph& g, bool base64) {
  json doc;
  doc["ir_version"] = 1;
  doc["inputs"] = json::array();
  for (const auto& in : g.inputs) doc["inputs"].push_back({{"name", in.name}, {"shape", in.shape}});
  doc["weights"] = json::object();
  for (const auto& [name, t] : g.weights) doc["weights"][name] = tensor_to_json(t, base64);
  doc["nodes"] = json::array();
  for (const auto& n : g.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["op"] = op_name(n.kind);
    jn["inputs"] = n.inputs;
    json attrs = json::object();
    switch (n.kind) {
      case OpKind::kEinsum:
        attrs["equation"] = n.equation;
        break;
      case OpKind::kConv2D:
        attrs["stride"] = n.stride;
        attrs["padding"] = n.padding;
        break;
      case OpKind::kIm2Col:
        attrs["stride"] = n.stride;
        attrs["padding"] = n.padding;
        attrs["kernel_h"] = n.kernel_h;
        attrs["kernel_w"] = n.kernel_w;
        break;
      case OpKind::kReshape:
        attrs["shape"] = n.reshape;
        break;
      case OpKind::kSum:
      case OpKind::kMax:
      case OpKind::kMin:
        if (n.axis) attrs["axis"] = *n.axis;
        break;
      case OpKind::kConstant:
        attrs["tensor"] = tensor_to_json(n.constant, base64);
        break;
      default:
        break;
    }
    if (!attrs.empty()) jn["attrs"] = attrs;
    jn["output_shape"] = n.output_shape;
    doc["nodes"].push_back(jn);
  }
  doc["outputs"] = g.outputs;
  return doc;
}

// ---------------------------------------------------------------------------
// Float inference

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Tensor eval_node(const Graph& g, const Node& n, const std::vector<const Tensor*>& in, kernels::Policy policy) {
  Tensor out;
  out.name = n.id;
  out.shape = n.output_shape;
  const int64_t size = shape_size(out.shape);
  out.data.assign(static_cast<size_t>(size), 0.0);
  switch (n.kind) {
    case OpKind::kAdd:
    case OpKind::kSub:
    case OpKind::kMul: {
      auto ia = broadcast_index(out.shape, in[0]->shape);
      auto ib = broadcast_index(out.shape, in[1]->shape);
      for (int64_t k = 0; k < size; ++k) {
        double a = in[0]->data[ia[k]], b = in[1]->data[ib[k]];
        out.data[k] = n.kind == OpKind::kAdd ? a + b : n.kind == OpKind::kSub ? a - b : a * b;
      }
      break;
    }
    case OpKind::kMatMul:
    case OpKind::kEinsum: {
      auto spec = EinsumSpec::parse(n.kind == OpKind::kMatMul ? "ij,jk->ik" : n.equation);
      std::vector<Shape> shapes;
      for (auto* t : in) shapes.push_back(t->shape);
      auto layout = einsum_layout(spec, shapes);
      std::span<const double> b = in.size() > 1 ? std::span<const double>(in[1]->data) : std::span<const double>();
      kernels::contract_f64(layout.plan, in[0]->data, b, out.data, policy);
      break;
    }
    case OpKind::kConv2D: {
      const auto& k = *in[1];
      auto idx = im2col_index(in[0]->shape, k.shape[2], k.shape[3], n.stride, n.padding);
      const int64_t rows = k.shape[1] * k.shape[2] * k.shape[3];
      const int64_t cols = static_cast<int64_t>(idx.size()) / rows;
      std::vector<double> patches(idx.size());
      for (size_t i = 0; i < idx.size(); ++i) patches[i] = idx[i] < 0 ? 0.0 : in[0]->data[idx[i]];
      auto layout = einsum_layout(EinsumSpec::parse("ok,kp->op"), {Shape{k.shape[0], rows}, Shape{rows, cols}});
      kernels::contract_f64(layout.plan, k.data, patches, out.data, policy);
      break;
    }
    case OpKind::kIm2Col: {
      auto idx = im2col_index(in[0]->shape, n.kernel_h, n.kernel_w, n.stride, n.padding);
      for (size_t i = 0; i < idx.size(); ++i) out.data[i] = idx[i] < 0 ? 0.0 : in[0]->data[idx[i]];
      break;
    }
    case OpKind::kReLU:
      for (int64_t k = 0; k < size; ++k) out.data[k] = std::max(0.0, in[0]->data[k]);
      break;
    case OpKind::kSigmoid:
      for (int64_t k = 0; k < size; ++k) out.data[k] = sigmoid(in[0]->data[k]);
      break;
    case OpKind::kExp:
      for (int64_t k = 0; k < size; ++k) out.data[k] = std::exp(in[0]->data[k]);
      break;
    case OpKind::kReciprocal:
      for (int64_t k = 0; k < size; ++k) out.data[k] = in[0]->data[k] == 0.0 ? 0.0 : 1.0 / in[0]->data[k];
      break;
    case OpKind::kSum:
    case OpKind::kMax:
    case OpKind::kMin: {
      auto groups = reduction_groups(in[0]->shape, n.axis);
      for (size_t o = 0; o < groups.size(); ++o) {
        double acc = n.kind == OpKind::kSum ? 0.0
                     : n.kind == OpKind::kMax ? -std::numeric_limits<double>::infinity()
                                               : std::numeric_limits<double>::infinity();
        for (auto i : groups[o]) {
          double v = in[0]->data[i];
          acc = n.kind == OpKind::kSum ? acc + v : n.kind == OpKind::kMax ? std::max(acc, v) : std::min(acc, v);
        }
        out.data[o] = acc;
      }
      break;
    }
    case OpKind::kArgMax: {
      const auto& d = in[0]->data;
      out.data[0] = static_cast<double>(std::max_element(d.begin(), d.end()) - d.begin());
      break;
    }
    case OpKind::kReshape:
      out.data = in[0]->data;
      break;
    case OpKind::kConstant:
      out.data = n.constant.data;
      break;
  }
  (void)g;
  return out;
}

}  // namespace

std::unordered_map<std::string, Tensor> infer_float_all(const Graph& g, const std::vector<Tensor>& inputs,
                                                        kernels::Policy policy) {
  if (inputs.size() != g.inputs.size()) throw ShapeError("expected " + std::to_string(g.inputs.size()) + " inputs");
  std::unordered_map<std::string, Tensor> values;
  for (size_t i = 0; i < inputs.size(); ++i) {
    const auto& spec = g.inputs[i];
    if (shape_size(inputs[i].shape) != shape_size(spec.shape) || inputs[i].data.size() != static_cast<size_t>(shape_size(spec.shape)))
      throw ShapeError("input '" + spec.name + "' expects shape " + shape_str(spec.shape) + ", got " + shape_str(inputs[i].shape));
    Tensor t = inputs[i];
    t.name = spec.name;
    t.shape = spec.shape;
    values[spec.name] = std::move(t);
  }
  for (const auto& [name, t] : g.weights) values[name] = t;
  for (const auto& n : g.nodes) {
    std::vector<const Tensor*> in;
    for (const auto& ref : n.inputs) in.push_back(&values.at(ref));
    values[n.id] = eval_node(g, n, in, policy);
  }
  return values;
}

Tensor infer_float(const Graph& g, const Tensor& x, kernels::Policy policy) {
  auto values = infer_float_all(g, {x}, policy);
  return values.at(g.outputs.front());
}

// ---------------------------------------------------------------------------
// Operation counting

int64_t count_macs(const Graph& g) {
  int64_t macs = 0;
  for (const auto& n : g.nodes) {
    switch (n.kind) {
      case OpKind::kMatMul: {
        const auto& a = g.shape_of(n.inputs[0]);
        macs += a[0] * a[1] * n.output_shape[1];
        break;
      }
      case OpKind::kConv2D: {
        const auto& k = g.shape_of(n.inputs[1]);
        macs += shape_size(n.output_shape) * k[2] * k[3] * k[1];
        break;
      }
      case OpKind::kEinsum:
        if (n.inputs.size() == 2) {
          std::vector<Shape> shapes{g.shape_of(n.inputs[0]), g.shape_of(n.inputs[1])};
          macs += einsum_layout(EinsumSpec::parse(n.equation), shapes).index_space;
        }
        break;
      default:
        break;
    }
  }
  return macs;
}

int64_t count_element_ops(const Graph& g) {
  int64_t ops = 0;
  for (const auto& n : g.nodes) {
    switch (n.kind) {
      case OpKind::kAdd:
      case OpKind::kSub:
      case OpKind::kMul:
      case OpKind::kReLU:
      case OpKind::kSigmoid:
      case OpKind::kExp:
      case OpKind::kReciprocal:
        ops += shape_size(n.output_shape);
        break;
      case OpKind::kSum:
      case OpKind::kMax:
      case OpKind::kMin:
        ops += shape_size(g.shape_of(n.inputs[0]));
        break;
      default:
        break;
    }
  }
  return ops;
}

// ---------------------------------------------------------------------------
// Einsum lowering

Graph lower_to_einsum(const Graph& g) {
  Graph out;
  out.inputs = g.inputs;
  out.weights = g.weights;
  out.outputs = g.outputs;
  for (const auto& n : g.nodes) {
    if (n.kind == OpKind::kMatMul) {
      Node e = n;
      e.kind = OpKind::kEinsum;
      e.equation = "ij,jk->ik";
      out.nodes.push_back(std::move(e));
    } else if (n.kind == OpKind::kConv2D) {
      const Shape& x = g.shape_of(n.inputs[0]);
      const Shape& k = g.shape_of(n.inputs[1]);
      const int64_t rows = k[1] * k[2] * k[3];
      Node patches;
      patches.id = n.id + "::im2col";
      patches.kind = OpKind::kIm2Col;
      patches.inputs = {n.inputs[0]};
      patches.kernel_h = k[2];
      patches.kernel_w = k[3];
      patches.stride = n.stride;
      patches.padding = n.padding;
      Node kernel;
      kernel.id = n.id + "::kernel";
      kernel.kind = OpKind::kReshape;
      kernel.inputs = {n.inputs[1]};
      kernel.reshape = {k[0], rows};
      Node contract;
      contract.id = n.id + "::contract";
      contract.kind = OpKind::kEinsum;
      contract.equation = "ok,kp->op";
      contract.inputs = {kernel.id, patches.id};
      Node back;
      back.id = n.id;
      back.kind = OpKind::kReshape;
      back.inputs = {contract.id};
      back.reshape = n.output_shape;
      (void)x;
      out.nodes.push_back(std::move(patches));
      out.nodes.push_back(std::move(kernel));
      out.nodes.push_back(std::move(contract));
      out.nodes.push_back(std::move(back));
    } else {
      Node copy = n;
      copy.output_shape.clear();
      out.nodes.push_back(std::move(copy));
    }
  }
  for (auto& n : out.nodes) n.output_shape.clear();
  out.validate();
  return out;
}

std::string circuit_output_ref(const Graph& g, const std::string& output) {
  if (g.has_node(output) && g.node(output).kind == OpKind::kArgMax) return g.node(output).inputs[0];
  return output;
}

bool is_argmax_output(const Graph& g, const std::string& output) {
  return g.has_node(output) && g.node(output).kind == OpKind::kArgMax;
}

}  // namespace zkeval
