#include <algorithm>
#include <unordered_map>

#include "zkeval/calibrate.hpp"
#include "zkeval/circuit.hpp"
#include "zkeval/einsum.hpp"
#include "zkeval/errors.hpp"

namespace zkeval {

namespace {

using Wires = std::vector<Operand>;

LookupFn activation_fn(OpKind k) {
  switch (k) {
    case OpKind::kReLU: return LookupFn::kReLU;
    case OpKind::kSigmoid: return LookupFn::kSigmoid;
    case OpKind::kExp: return LookupFn::kExp;
    case OpKind::kReciprocal: return LookupFn::kReciprocal;
    default: throw UnsupportedOpError("not a lookup activation");
  }
}

}  // namespace

ConstraintSystem lower_graph(const Graph& g, const CalibrationReport& cal) {
  const Graph lowered = lower_to_einsum(g);
  const int s = cal.scale;
  const QuantPlan plan = plan_quantization(lowered, s);
  CircuitBuilder b;
  ConstraintSystem& cs = b.cs();
  cs.scale = s;
  cs.settings_json = cal.to_json().dump();

  std::unordered_map<std::string, Wires> wires;

  uint64_t offset = 0;
  for (const auto& [name, t] : lowered.weights) {
    cs.weight_slots.push_back({name, offset, t.shape, plan.weight_scales.at(name)});
    Wires w(static_cast<size_t>(t.size()));
    for (size_t k = 0; k < w.size(); ++k) w[k] = Operand::weight(offset + k);
    wires[name] = std::move(w);
    offset += static_cast<uint64_t>(t.size());
  }
  b.set_weight_count(offset);

  for (const auto& in : lowered.inputs) {
    Wires w(static_cast<size_t>(shape_size(in.shape)));
    for (auto& op : w) op = b.new_instance();
    wires[in.name] = std::move(w);
    cs.input_specs.push_back({in.name, in.shape});
  }

  auto rescale = [&](const Wires& acc, int shift, int64_t bound) -> Wires {
    if (shift == 0) return acc;
    uint32_t t = b.table(LookupFn::kRescale, shift, -bound, bound);
    return b.lookup(acc, t);
  };

  for (const auto& n : lowered.nodes) {
    b.set_label(n.id);
    const int64_t size = shape_size(n.output_shape);
    auto in = [&](size_t i) -> const Wires& { return wires.at(n.inputs[i]); };
    Wires out;
    switch (n.kind) {
      case OpKind::kEinsum: {
        auto spec = EinsumSpec::parse(n.equation);
        std::vector<Shape> shapes;
        for (const auto& r : n.inputs) shapes.push_back(lowered.shape_of(r));
        auto layout = einsum_layout(spec, shapes);
        const auto& p = layout.plan;
        if (n.inputs.size() == 1) {
          const Wires& a = in(0);
          for (size_t o = 0; o < p.out_count(); ++o) {
            if (p.sum_count() == 1) {
              out.push_back(a[p.a_out[o] + p.a_sum[0]]);
              continue;
            }
            Wires terms;
            for (size_t k = 0; k < p.sum_count(); ++k) terms.push_back(a[p.a_out[o] + p.a_sum[k]]);
            out.push_back(b.cumulative_sum(terms).back());
          }
          break;
        }
        const Wires& a = in(0);
        const Wires& c = in(1);
        const FusedBias* fb = nullptr;
        if (auto it = plan.fused.find(n.id); it != plan.fused.end()) fb = &it->second;
        const int sa = plan.scale_of(lowered, n.inputs[0]);
        const int sb = plan.scale_of(lowered, n.inputs[1]);
        const int shift = sa + sb - s;
        // The accumulator carries the fused bias, so it spans the Add's range too.
        int64_t bound = cal.raw_bound(n.id, sa + sb);
        if (fb) bound = std::max(bound, cal.raw_bound(fb->add_node, sa + sb));
        Wires acc;
        for (size_t o = 0; o < p.out_count(); ++o) {
          Wires x, y;
          for (size_t k = 0; k < p.sum_count(); ++k) {
            x.push_back(a[p.a_out[o] + p.a_sum[k]]);
            y.push_back(c[p.b_out[o] + p.b_sum[k]]);
          }
          std::optional<Operand> m0;
          if (fb) m0 = wires.at(fb->weight)[fb->index[o]];
          acc.push_back(b.cumulative_dot_product(x, y, m0).back());
        }
        out = rescale(acc, shift, bound);
        break;
      }
      case OpKind::kAdd:
      case OpKind::kSub:
      case OpKind::kMul: {
        if (auto it = plan.fused_adds.find(n.id); it != plan.fused_adds.end()) {
          out = wires.at(it->second);
          break;
        }
        auto ia = broadcast_index(n.output_shape, lowered.shape_of(n.inputs[0]));
        auto ib = broadcast_index(n.output_shape, lowered.shape_of(n.inputs[1]));
        Wires x(static_cast<size_t>(size)), y(static_cast<size_t>(size));
        for (int64_t k = 0; k < size; ++k) {
          x[k] = in(0)[ia[k]];
          y[k] = in(1)[ib[k]];
        }
        const int sa = plan.scale_of(lowered, n.inputs[0]);
        const int sb = plan.scale_of(lowered, n.inputs[1]);
        if (n.kind == OpKind::kMul) {
          auto prod = b.elementwise(x, y, CircuitBuilder::ElementwiseOp::kMul);
          out = rescale(prod, sa + sb - s, cal.raw_bound(n.id, sa + sb));
        } else {
          if (sa != sb) throw ShapeError("scale mismatch at '" + n.id + "'");
          out = b.elementwise(x, y, n.kind == OpKind::kAdd ? CircuitBuilder::ElementwiseOp::kAdd
                                                           : CircuitBuilder::ElementwiseOp::kSub);
        }
        break;
      }
      case OpKind::kReLU:
      case OpKind::kSigmoid:
      case OpKind::kExp:
      case OpKind::kReciprocal: {
        LookupFn fn = activation_fn(n.kind);
        int64_t bound = cal.raw_bound(n.inputs[0], s);
        uint32_t t = b.table(fn, fn == LookupFn::kReLU ? 0 : s, -bound, bound);
        out = b.lookup(in(0), t);
        break;
      }
      case OpKind::kSum:
      case OpKind::kMax:
      case OpKind::kMin: {
        auto groups = reduction_groups(lowered.shape_of(n.inputs[0]), n.axis);
        int64_t bound = n.kind == OpKind::kSum ? 0 : cal.raw_bound(n.inputs[0], s);
        for (const auto& grp : groups) {
          Wires x;
          for (auto i : grp) x.push_back(in(0)[i]);
          if (n.kind == OpKind::kSum) out.push_back(b.cumulative_sum(x).back());
          else if (n.kind == OpKind::kMax) out.push_back(b.max_of(x, bound));
          else out.push_back(b.min_of(x, bound));
        }
        break;
      }
      case OpKind::kArgMax:
      case OpKind::kReshape:
        out = in(0);
        break;
      case OpKind::kConstant:
        for (double v : n.constant.data) out.push_back(Operand::constant(Fe::from_signed(encode_raw(v, s))));
        break;
      case OpKind::kIm2Col: {
        auto idx = im2col_index(lowered.shape_of(n.inputs[0]), n.kernel_h, n.kernel_w, n.stride, n.padding);
        for (auto i : idx) out.push_back(i < 0 ? Operand::constant(Fe(0)) : in(0)[i]);
        break;
      }
      case OpKind::kMatMul:
      case OpKind::kConv2D:
        throw UnsupportedOpError("'" + n.id + "' survived einsum lowering");
    }
    wires[n.id] = std::move(out);
  }

  Wires outputs;
  for (const auto& o : lowered.outputs) {
    std::string ref = circuit_output_ref(lowered, o);
    const Wires& w = wires.at(ref);
    outputs.insert(outputs.end(), w.begin(), w.end());
    cs.output_specs.push_back({o, lowered.shape_of(ref)});
    cs.output_argmax.push_back(is_argmax_output(lowered, o));
  }
  b.expose_outputs(std::move(outputs), true);

  for (const auto& t : cs.tables)
    if (t.size() > kMaxTableSize)
      throw DomainError(t.name() + " table needs " + std::to_string(t.size()) + " entries, above the limit of " +
                        std::to_string(kMaxTableSize) + "; calibrate at a smaller scale");
  return b.finish();
}

}  // namespace zkeval
