#include "zkeval/quantized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zkeval/einsum.hpp"
#include "zkeval/errors.hpp"
#include "zkeval/field.hpp"

namespace zkeval {

const char* lookup_fn_name(LookupFn fn) {
  switch (fn) {
    case LookupFn::kReLU: return "relu";
    case LookupFn::kSigmoid: return "sigmoid";
    case LookupFn::kExp: return "exp";
    case LookupFn::kReciprocal: return "reciprocal";
    case LookupFn::kRescale: return "rescale";
  }
  return "?";
}

namespace {

constexpr int64_t kLookupClamp = int64_t{1} << 62;

int64_t round_clamped(long double v) {
  if (v >= static_cast<long double>(kLookupClamp)) return kLookupClamp;
  if (v <= -static_cast<long double>(kLookupClamp)) return -kLookupClamp;
  return static_cast<int64_t>(std::llround(v));  // half away from zero
}

}  // namespace

int64_t lookup_eval(LookupFn fn, int param, int64_t in) {
  switch (fn) {
    case LookupFn::kReLU:
      return in > 0 ? in : 0;
    case LookupFn::kSigmoid: {
      long double z = std::ldexp(static_cast<long double>(in), -param);
      return round_clamped(std::ldexp(1.0L / (1.0L + std::exp(-z)), param));
    }
    case LookupFn::kExp: {
      long double z = std::ldexp(static_cast<long double>(in), -param);
      return round_clamped(std::ldexp(std::exp(z), param));
    }
    case LookupFn::kReciprocal:
      if (in == 0) return 0;
      return round_clamped(std::ldexp(1.0L, 2 * param) / static_cast<long double>(in));
    case LookupFn::kRescale:
      return floor_shift(in, param);
  }
  return 0;
}

int QuantPlan::scale_of(const Graph& g, const std::string& ref) const {
  if (g.ref_kind(ref) == RefKind::kWeight) return weight_scales.at(ref);
  return act_scale;
}

QuantPlan plan_quantization(const Graph& g, int act_scale) {
  QuantPlan plan;
  plan.act_scale = act_scale;
  for (const auto& [name, t] : g.weights) plan.weight_scales[name] = act_scale;

  for (const auto& n : g.nodes) {
    if (n.kind != OpKind::kAdd) continue;
    for (int side = 0; side < 2; ++side) {
      const std::string& w = n.inputs[side];
      const std::string& other = n.inputs[1 - side];
      if (g.ref_kind(w) != RefKind::kWeight || g.use_count(w) != 1) continue;
      if (g.ref_kind(other) != RefKind::kNode || g.use_count(other) != 1) continue;
      // The bias must broadcast into the contraction's shape, not widen it.
      if (broadcast_shapes(g.shape_of(other), g.shape_of(w)) != g.shape_of(other)) continue;
      std::string cur = other;
      while (g.has_node(cur) && g.node(cur).kind == OpKind::kReshape && g.use_count(cur) == 1 &&
             g.ref_kind(g.node(cur).inputs[0]) == RefKind::kNode) {
        cur = g.node(cur).inputs[0];
      }
      if (!g.has_node(cur) || g.use_count(cur) != 1) continue;
      const Node& c = g.node(cur);
      if (c.kind != OpKind::kEinsum || c.inputs.size() != 2 || plan.fused.count(cur)) continue;
      FusedBias fb;
      fb.add_node = n.id;
      fb.weight = w;
      fb.index = broadcast_index(g.shape_of(other), g.shape_of(w));
      int sa = plan.scale_of(g, c.inputs[0]);
      int sb = plan.scale_of(g, c.inputs[1]);
      plan.weight_scales[w] = sa + sb;
      plan.fused[cur] = std::move(fb);
      plan.fused_adds[n.id] = other;
      break;
    }
  }
  return plan;
}

namespace {

int64_t checked(__int128 v) {
  __int128 lim = static_cast<__int128>(Fe::kHalfRange);
  if (v >= lim || v <= -lim) throw OverflowError("fixed-point value exceeds the field's signed range");
  return static_cast<int64_t>(v);
}

}  // namespace

std::unordered_map<std::string, std::vector<int64_t>> run_reference_quantized(
    const Graph& g, const QuantPlan& plan, const std::vector<Tensor>& inputs, kernels::Policy policy) {
  if (inputs.size() != g.inputs.size()) throw ShapeError("expected " + std::to_string(g.inputs.size()) + " inputs");
  const int s = plan.act_scale;
  std::unordered_map<std::string, std::vector<int64_t>> values;
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].data.size() != static_cast<size_t>(shape_size(g.inputs[i].shape)))
      throw ShapeError("input '" + g.inputs[i].name + "' expects shape " + shape_str(g.inputs[i].shape));
    std::vector<int64_t> raw(inputs[i].data.size());
    for (size_t k = 0; k < raw.size(); ++k) raw[k] = encode_raw(inputs[i].data[k], s);
    values[g.inputs[i].name] = std::move(raw);
  }
  for (const auto& [name, t] : g.weights) {
    int ws = plan.weight_scales.at(name);
    std::vector<int64_t> raw(t.data.size());
    for (size_t k = 0; k < raw.size(); ++k) raw[k] = encode_raw(t.data[k], ws);
    values[name] = std::move(raw);
  }

  for (const auto& n : g.nodes) {
    const int64_t size = shape_size(n.output_shape);
    std::vector<int64_t> out(static_cast<size_t>(size), 0);
    auto in = [&](size_t i) -> const std::vector<int64_t>& { return values.at(n.inputs[i]); };
    switch (n.kind) {
      case OpKind::kEinsum:
      case OpKind::kMatMul: {
        auto spec = EinsumSpec::parse(n.kind == OpKind::kMatMul ? "ij,jk->ik" : n.equation);
        std::vector<Shape> shapes;
        for (const auto& r : n.inputs) shapes.push_back(g.shape_of(r));
        auto layout = einsum_layout(spec, shapes);
        if (n.inputs.size() == 2) {
          std::vector<int64_t> bias;
          if (auto it = plan.fused.find(n.id); it != plan.fused.end()) {
            const auto& w = values.at(it->second.weight);
            bias.resize(it->second.index.size());
            for (size_t k = 0; k < bias.size(); ++k) bias[k] = w[it->second.index[k]];
          }
          int shift = plan.scale_of(g, n.inputs[0]) + plan.scale_of(g, n.inputs[1]) - s;
          kernels::contract_i64(layout.plan, in(0), in(1), bias, shift, out, policy);
        } else {
          kernels::contract_i64(layout.plan, in(0), {}, {}, 0, out, policy);
        }
        break;
      }
      case OpKind::kConv2D:
        throw UnsupportedOpError("quantized inference runs on einsum-lowered graphs");
      case OpKind::kAdd:
      case OpKind::kSub:
      case OpKind::kMul: {
        if (auto it = plan.fused_adds.find(n.id); it != plan.fused_adds.end()) {
          // Bias already folded into the contraction feeding this node.
          out = values.at(it->second);
          break;
        }
        auto ia = broadcast_index(n.output_shape, g.shape_of(n.inputs[0]));
        auto ib = broadcast_index(n.output_shape, g.shape_of(n.inputs[1]));
        const auto& a = in(0);
        const auto& b = in(1);
        int sa = plan.scale_of(g, n.inputs[0]), sb = plan.scale_of(g, n.inputs[1]);
        if (n.kind != OpKind::kMul && sa != sb) throw ShapeError("scale mismatch at '" + n.id + "'");
        for (int64_t k = 0; k < size; ++k) {
          __int128 x = a[ia[k]], y = b[ib[k]];
          if (n.kind == OpKind::kAdd) out[k] = checked(x + y);
          else if (n.kind == OpKind::kSub) out[k] = checked(x - y);
          else out[k] = floor_shift(checked(x * y), sa + sb - s);
        }
        break;
      }
      case OpKind::kIm2Col: {
        auto idx = im2col_index(g.shape_of(n.inputs[0]), n.kernel_h, n.kernel_w, n.stride, n.padding);
        for (size_t k = 0; k < idx.size(); ++k) out[k] = idx[k] < 0 ? 0 : in(0)[idx[k]];
        break;
      }
      case OpKind::kReLU:
      case OpKind::kSigmoid:
      case OpKind::kExp:
      case OpKind::kReciprocal: {
        LookupFn fn = n.kind == OpKind::kReLU      ? LookupFn::kReLU
                      : n.kind == OpKind::kSigmoid ? LookupFn::kSigmoid
                      : n.kind == OpKind::kExp     ? LookupFn::kExp
                                                   : LookupFn::kReciprocal;
        for (int64_t k = 0; k < size; ++k) out[k] = lookup_eval(fn, s, in(0)[k]);
        break;
      }
      case OpKind::kSum:
      case OpKind::kMax:
      case OpKind::kMin: {
        auto groups = reduction_groups(g.shape_of(n.inputs[0]), n.axis);
        for (size_t o = 0; o < groups.size(); ++o) {
          __int128 acc = n.kind == OpKind::kSum ? 0 : in(0)[groups[o][0]];
          for (auto i : groups[o]) {
            int64_t v = in(0)[i];
            if (n.kind == OpKind::kSum) acc = checked(acc + v);
            else if (n.kind == OpKind::kMax) acc = std::max<__int128>(acc, v);
            else acc = std::min<__int128>(acc, v);
          }
          out[o] = static_cast<int64_t>(acc);
        }
        break;
      }
      case OpKind::kArgMax:
        out = in(0);
        break;
      case OpKind::kReshape:
        out = in(0);
        break;
      case OpKind::kConstant:
        for (int64_t k = 0; k < size; ++k) out[k] = encode_raw(n.constant.data[k], s);
        break;
    }
    values[n.id] = std::move(out);
  }
  return values;
}

double relative_error(const std::vector<double>& q, const std::vector<double>& f) {
  if (q.size() != f.size()) throw LengthMismatch("relative_error operands differ in length");
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < q.size(); ++i) {
    num = std::max(num, std::fabs(q[i] - f[i]));
    den = std::max(den, std::fabs(f[i]));
  }
  if (den == 0.0) return num;
  return num / den;
}

}  // namespace zkeval
