#include "zkeval/circuit.hpp"

#include <algorithm>

#include "zkeval/errors.hpp"
#include "zkeval/merkle.hpp"

namespace zkeval {

namespace {

constexpr uint32_t kCircuitMagic = 0x53434b5a;  // "ZKCS"
constexpr uint32_t kCircuitVersion = 1;

void put_varint(ByteWriter& w, uint64_t v) {
  while (v >= 0x80) {
    w.u8(static_cast<uint8_t>(v | 0x80));
    v >>= 7;
  }
  w.u8(static_cast<uint8_t>(v));
}

uint64_t get_varint(ByteReader& r) {
  uint64_t v = 0;
  for (int shift = 0; shift < 64; shift += 7) {
    uint8_t b = r.u8();
    if (shift == 63 && b > 1) throw FormatError("varint overflow");
    v |= static_cast<uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) {
      if (b == 0 && shift != 0) throw FormatError("non-minimal varint");
      return v;
    }
  }
  throw FormatError("varint too long");
}

void put_operand(ByteWriter& w, const Operand& op) {
  w.u8(static_cast<uint8_t>(op.kind));
  if (op.kind != Operand::Kind::kNone) put_varint(w, op.index);
}

Operand get_operand(ByteReader& r) {
  uint8_t k = r.u8();
  if (k > 4) throw FormatError("invalid operand kind");
  Operand op{static_cast<Operand::Kind>(k), 0};
  if (op.kind != Operand::Kind::kNone) op.index = get_varint(r);
  if (op.kind == Operand::Kind::kConst && op.index >= Fe::kModulus) throw FormatError("non-canonical constant");
  return op;
}

void put_shape(ByteWriter& w, const Shape& s) {
  w.u64(s.size());
  for (auto d : s) w.i64(d);
}

Shape get_shape(ByteReader& r) {
  Shape s(r.count(8));
  for (auto& d : s) d = r.i64();
  return s;
}

}  // namespace

void Gate::serialize(ByteWriter& w) const {
  w.u8(static_cast<uint8_t>(kind));
  if (kind == GateKind::kEmpty) return;
  if (kind == GateKind::kLookup) {
    put_varint(w, table);
    put_operand(w, a);
    put_operand(w, c);
    return;
  }
  const Fe* sel[] = {&q_l, &q_r, &q_m, &q_d, &q_o, &q_c};
  uint8_t mask = 0;
  for (int i = 0; i < 6; ++i)
    if (!sel[i]->is_zero()) mask |= static_cast<uint8_t>(1u << i);
  w.u8(mask);
  for (int i = 0; i < 6; ++i)
    if (mask & (1u << i)) w.fe(*sel[i]);
  put_operand(w, a);
  put_operand(w, b);
  put_operand(w, c);
  put_operand(w, d);
}

Gate Gate::deserialize(ByteReader& r) {
  Gate g;
  uint8_t k = r.u8();
  if (k > 2) throw FormatError("invalid gate kind");
  g.kind = static_cast<GateKind>(k);
  if (g.kind == GateKind::kEmpty) return g;
  if (g.kind == GateKind::kLookup) {
    uint64_t t = get_varint(r);
    if (t > UINT32_MAX) throw FormatError("table id out of range");
    g.table = static_cast<uint32_t>(t);
    g.a = get_operand(r);
    g.c = get_operand(r);
    return g;
  }
  uint8_t mask = r.u8();
  if (mask >> 6) throw FormatError("invalid selector mask");
  Fe* sel[] = {&g.q_l, &g.q_r, &g.q_m, &g.q_d, &g.q_o, &g.q_c};
  for (int i = 0; i < 6; ++i) {
    if (!(mask & (1u << i))) continue;
    *sel[i] = r.fe();
    if (sel[i]->is_zero()) throw FormatError("zero selector marked present");
  }
  g.a = get_operand(r);
  g.b = get_operand(r);
  g.c = get_operand(r);
  g.d = get_operand(r);
  return g;
}

Bytes Gate::bytes() const {
  ByteWriter w;
  serialize(w);
  return w.take();
}

std::vector<Operand> Gate::operands() const {
  std::vector<Operand> out;
  for (const Operand* op : {&a, &b, &c, &d})
    if (op->kind != Operand::Kind::kNone) out.push_back(*op);
  return out;
}

const char* argument_name(ArgumentKind k) {
  switch (k) {
    case ArgumentKind::kCumulativeSum: return "cumulative_sum";
    case ArgumentKind::kCumulativeProduct: return "cumulative_product";
    case ArgumentKind::kCumulativeDotProduct: return "cumulative_dot_product";
    case ArgumentKind::kElementwiseAdd: return "elementwise_add";
    case ArgumentKind::kElementwiseSub: return "elementwise_sub";
    case ArgumentKind::kElementwiseMul: return "elementwise_mul";
    case ArgumentKind::kLookup: return "lookup";
    case ArgumentKind::kBooleanity: return "booleanity";
    case ArgumentKind::kMax: return "max";
    case ArgumentKind::kMin: return "min";
    case ArgumentKind::kAffine: return "affine";
  }
  return "?";
}

std::string LookupTable::name() const {
  return std::string(lookup_fn_name(fn)) + "(" + std::to_string(param) + ")";
}

uint64_t padded_rows_for(uint64_t n_con) {
  if (n_con <= 1) return 1;
  return uint64_t{1} << ceil_log2(n_con);
}

uint64_t ConstraintSystem::padded_rows() const { return padded_rows_for(n_con()); }

std::vector<Fe> digest_limbs(const Digest& d) {
  std::vector<Fe> out(ConstraintSystem::kDigestLimbs);
  for (size_t i = 0; i < out.size(); ++i) {
    uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<uint32_t>(d[4 * i + b]) << (8 * b);
    out[i] = Fe(v);
  }
  return out;
}

Bytes ConstraintSystem::serialize() const {
  ByteWriter w;
  w.u32(kCircuitMagic);
  w.u32(kCircuitVersion);
  w.i64(scale);
  w.u64(n_advice);
  w.u64(n_instance);
  w.u64(n_public_inputs);
  w.u8(binds_weights ? 1 : 0);
  w.u64(n_weights);
  w.u64(n_external);
  w.u64(gates.size());
  for (const auto& g : gates) g.serialize(w);
  w.u64(arguments.size());
  for (const auto& a : arguments) {
    w.u8(static_cast<uint8_t>(a.kind));
    w.u64(a.row_begin);
    w.u64(a.row_end);
    w.u32(a.table);
    w.str(a.label);
  }
  w.u64(tables.size());
  for (const auto& t : tables) {
    w.u32(t.id);
    w.u8(static_cast<uint8_t>(t.fn));
    w.i64(t.param);
    w.i64(t.lo);
    w.i64(t.hi);
  }
  w.u64(hints.size());
  for (const auto& h : hints) {
    w.u8(static_cast<uint8_t>(h.kind));
    w.u64(h.inputs.size());
    for (const auto& op : h.inputs) put_operand(w, op);
    w.u64(h.out);
    w.u64(h.slot);
    w.u64(h.at_row);
  }
  w.u64(outputs.size());
  for (const auto& op : outputs) put_operand(w, op);
  for (const auto* specs : {&input_specs, &output_specs}) {
    w.u64(specs->size());
    for (const auto& s : *specs) {
      w.str(s.name);
      put_shape(w, s.shape);
    }
  }
  w.u64(output_argmax.size());
  for (bool b : output_argmax) w.u8(b ? 1 : 0);
  w.u64(weight_slots.size());
  for (const auto& s : weight_slots) {
    w.str(s.name);
    w.u64(s.offset);
    put_shape(w, s.shape);
    w.i64(s.scale);
  }
  w.str(settings_json);
  return w.take();
}

ConstraintSystem ConstraintSystem::deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u32() != kCircuitMagic) throw FormatError("not a circuit file");
  if (r.u32() != kCircuitVersion) throw FormatError("unsupported circuit version");
  ConstraintSystem cs;
  cs.scale = static_cast<int>(r.i64());
  cs.n_advice = r.u64();
  cs.n_instance = r.u64();
  cs.n_public_inputs = r.u64();
  cs.binds_weights = r.boolean();
  cs.n_weights = r.u64();
  cs.n_external = r.u64();
  cs.gates.resize(r.count(1));
  for (auto& g : cs.gates) g = Gate::deserialize(r);
  cs.arguments.resize(r.count(29));
  for (auto& a : cs.arguments) {
    uint8_t k = r.u8();
    if (k > static_cast<uint8_t>(ArgumentKind::kAffine)) throw FormatError("invalid argument kind");
    a.kind = static_cast<ArgumentKind>(k);
    a.row_begin = r.u64();
    a.row_end = r.u64();
    a.table = r.u32();
    a.label = r.str();
  }
  cs.tables.resize(r.count(29));
  for (auto& t : cs.tables) {
    t.id = r.u32();
    uint8_t fn = r.u8();
    if (fn > static_cast<uint8_t>(LookupFn::kRescale)) throw FormatError("invalid lookup function");
    t.fn = static_cast<LookupFn>(fn);
    t.param = static_cast<int>(r.i64());
    t.lo = r.i64();
    t.hi = r.i64();
  }
  cs.hints.resize(r.count(33));
  for (auto& h : cs.hints) {
    uint8_t k = r.u8();
    if (k > 2) throw FormatError("invalid hint kind");
    h.kind = static_cast<Hint::Kind>(k);
    h.inputs.resize(r.count(1));
    for (auto& op : h.inputs) op = get_operand(r);
    h.out = r.u64();
    h.slot = r.u64();
    h.at_row = r.u64();
  }
  cs.outputs.resize(r.count(1));
  for (auto& op : cs.outputs) op = get_operand(r);
  for (auto* specs : {&cs.input_specs, &cs.output_specs}) {
    specs->resize(r.count(16));
    for (auto& s : *specs) {
      s.name = r.str();
      s.shape = get_shape(r);
    }
  }
  cs.output_argmax.resize(r.count(1));
  for (size_t i = 0; i < cs.output_argmax.size(); ++i) cs.output_argmax[i] = r.boolean();
  cs.weight_slots.resize(r.count(32));
  for (auto& s : cs.weight_slots) {
    s.name = r.str();
    s.offset = r.u64();
    s.shape = get_shape(r);
    s.scale = static_cast<int>(r.i64());
  }
  cs.settings_json = r.str();
  r.expect_end();
  return cs;
}

Digest ConstraintSystem::digest() const { return sha256(serialize()); }

const Argument* ConstraintSystem::argument_at(uint64_t row) const {
  auto it = std::upper_bound(arguments.begin(), arguments.end(), row,
                             [](uint64_t r, const Argument& a) { return r < a.row_begin; });
  if (it == arguments.begin()) return nullptr;
  --it;
  return row < it->row_end ? &*it : nullptr;
}

std::string ConstraintSystem::row_label(uint64_t row) const {
  const Argument* a = argument_at(row);
  std::string out = "row " + std::to_string(row);
  if (a) out += " (" + std::string(argument_name(a->kind)) + (a->label.empty() ? "" : " at '" + a->label + "'") + ")";
  return out;
}

Fe Assignment::value(const Operand& op) const {
  switch (op.kind) {
    case Operand::Kind::kNone: return Fe();
    case Operand::Kind::kAdvice: return advice.at(op.index);
    case Operand::Kind::kInstance: return instance.at(op.index);
    case Operand::Kind::kWeight: return weights.at(op.index);
    case Operand::Kind::kConst: return Fe(op.index);
  }
  return Fe();
}

// ---- builder ----

Operand CircuitBuilder::new_advice() { return Operand::advice(cs_.n_advice++); }

Operand CircuitBuilder::new_instance() {
  Operand op = Operand::instance(cs_.n_instance++);
  cs_.n_public_inputs = cs_.n_instance;
  return op;
}

void CircuitBuilder::expose_outputs(std::vector<Operand> outputs, bool bind_weights) {
  cs_.outputs = std::move(outputs);
  cs_.binds_weights = bind_weights;
  cs_.n_instance = cs_.n_public_inputs + cs_.outputs.size() + (bind_weights ? ConstraintSystem::kDigestLimbs : 0);
}

Operand CircuitBuilder::external_input() {
  Operand out = new_advice();
  Hint h;
  h.kind = Hint::Kind::kExternal;
  h.out = out.index;
  h.slot = cs_.n_external++;
  h.at_row = cs_.gates.size();
  cs_.hints.push_back(std::move(h));
  return out;
}

uint32_t CircuitBuilder::table(LookupFn fn, int param, int64_t lo, int64_t hi) {
  auto key = std::make_pair(static_cast<int>(fn), param);
  auto it = table_ids_.find(key);
  if (it != table_ids_.end()) {
    auto& t = cs_.tables[it->second];
    t.lo = std::min(t.lo, lo);
    t.hi = std::max(t.hi, hi);
    return it->second;
  }
  LookupTable t;
  t.id = static_cast<uint32_t>(cs_.tables.size());
  t.fn = fn;
  t.param = param;
  t.lo = lo;
  t.hi = hi;
  cs_.tables.push_back(t);
  table_ids_[key] = t.id;
  return t.id;
}

uint64_t CircuitBuilder::push_gate(const Gate& g) {
  cs_.gates.push_back(g);
  return cs_.gates.size() - 1;
}

void CircuitBuilder::begin_argument(ArgumentKind kind, uint32_t table) {
  if (depth_++ > 0) return;
  open_ = Argument{kind, cs_.gates.size(), cs_.gates.size(), table, label_};
}

void CircuitBuilder::end_argument() {
  if (--depth_ > 0) return;
  open_->row_end = cs_.gates.size();
  if (open_->row_end > open_->row_begin) cs_.arguments.push_back(std::move(*open_));
  open_.reset();
}

namespace {

const Fe kOne(1);
const Fe kMinusOne = -Fe(1);

}  // namespace

std::vector<Operand> CircuitBuilder::cumulative_sum(std::span<const Operand> x, std::optional<Operand> m0) {
  begin_argument(ArgumentKind::kCumulativeSum);
  std::vector<Operand> m;
  Operand prev = m0.value_or(Operand::constant(Fe(0)));
  for (const auto& xi : x) {
    Gate g;
    g.kind = GateKind::kArith;
    g.q_l = kOne;
    g.q_d = kOne;
    g.q_o = kMinusOne;
    g.a = xi;
    g.d = prev;
    g.c = new_advice();
    push_gate(g);
    m.push_back(g.c);
    prev = g.c;
  }
  end_argument();
  return m;
}

std::vector<Operand> CircuitBuilder::cumulative_product(std::span<const Operand> x, std::optional<Operand> m0) {
  begin_argument(ArgumentKind::kCumulativeProduct);
  std::vector<Operand> m;
  Operand prev = m0.value_or(Operand::constant(Fe(1)));
  for (const auto& xi : x) {
    Gate g;
    g.kind = GateKind::kArith;
    g.q_m = kOne;
    g.q_o = kMinusOne;
    g.a = xi;
    g.b = prev;
    g.c = new_advice();
    push_gate(g);
    m.push_back(g.c);
    prev = g.c;
  }
  end_argument();
  return m;
}

std::vector<Operand> CircuitBuilder::cumulative_dot_product(std::span<const Operand> x, std::span<const Operand> y,
                                                            std::optional<Operand> m0) {
  if (x.size() != y.size()) throw LengthMismatch("dot product operands differ in length");
  begin_argument(ArgumentKind::kCumulativeDotProduct);
  std::vector<Operand> m;
  Operand prev = m0.value_or(Operand::constant(Fe(0)));
  for (size_t i = 0; i < x.size(); ++i) {
    Gate g;
    g.kind = GateKind::kArith;
    g.q_m = kOne;
    g.q_d = kOne;
    g.q_o = kMinusOne;
    g.a = x[i];
    g.b = y[i];
    g.d = prev;
    g.c = new_advice();
    push_gate(g);
    m.push_back(g.c);
    prev = g.c;
  }
  end_argument();
  return m;
}

std::vector<Operand> CircuitBuilder::elementwise(std::span<const Operand> x, std::span<const Operand> y,
                                                 ElementwiseOp op) {
  if (x.size() != y.size()) throw LengthMismatch("elementwise operands differ in length");
  begin_argument(op == ElementwiseOp::kAdd   ? ArgumentKind::kElementwiseAdd
                 : op == ElementwiseOp::kSub ? ArgumentKind::kElementwiseSub
                                             : ArgumentKind::kElementwiseMul);
  std::vector<Operand> m;
  for (size_t i = 0; i < x.size(); ++i) {
    Gate g;
    g.kind = GateKind::kArith;
    if (op == ElementwiseOp::kMul) {
      g.q_m = kOne;
    } else {
      g.q_l = kOne;
      g.q_r = op == ElementwiseOp::kAdd ? kOne : kMinusOne;
    }
    g.q_o = kMinusOne;
    g.a = x[i];
    g.b = y[i];
    g.c = new_advice();
    push_gate(g);
    m.push_back(g.c);
  }
  end_argument();
  return m;
}

std::vector<Operand> CircuitBuilder::lookup(std::span<const Operand> x, uint32_t table_id) {
  begin_argument(ArgumentKind::kLookup, table_id);
  std::vector<Operand> y;
  for (const auto& xi : x) {
    Gate g;
    g.kind = GateKind::kLookup;
    g.table = table_id;
    g.a = xi;
    g.c = new_advice();
    push_gate(g);
    y.push_back(g.c);
  }
  end_argument();
  return y;
}

Operand CircuitBuilder::lookup_one(Operand x, uint32_t table_id) {
  return lookup(std::span<const Operand>(&x, 1), table_id).front();
}

void CircuitBuilder::lookup_check(Operand x, Operand expected, uint32_t table_id) {
  begin_argument(ArgumentKind::kLookup, table_id);
  Gate g;
  g.kind = GateKind::kLookup;
  g.table = table_id;
  g.a = x;
  g.c = expected;
  push_gate(g);
  end_argument();
}

void CircuitBuilder::booleanity(std::span<const Operand> y) {
  begin_argument(ArgumentKind::kBooleanity);
  for (const auto& yi : y) {
    // y*y - y = 0
    Gate g;
    g.kind = GateKind::kArith;
    g.q_m = kOne;
    g.q_l = kMinusOne;
    g.a = yi;
    g.b = yi;
    push_gate(g);
  }
  end_argument();
}

Operand CircuitBuilder::affine(Operand a, Fe coeff_a, Operand b, Fe coeff_b, Fe constant, ArgumentKind kind) {
  begin_argument(kind);
  Gate g;
  g.kind = GateKind::kArith;
  g.q_l = coeff_a;
  g.q_r = coeff_b;
  g.q_c = constant;
  g.q_o = kMinusOne;
  g.a = a;
  g.b = b;
  g.c = new_advice();
  push_gate(g);
  end_argument();
  return g.c;
}

void CircuitBuilder::extremum_argument(std::span<const Operand> x, Operand m, int64_t bound, bool is_max) {
  const int64_t n = static_cast<int64_t>(x.size());
  begin_argument(is_max ? ArgumentKind::kMax : ArgumentKind::kMin);
  // w ranges over [-2B+1, 2B+1]; 1 - sum(y) over [1-N, 1].
  uint32_t relu = table(LookupFn::kReLU, 0, std::min(-2 * bound + 1, 1 - n), std::max<int64_t>(2 * bound + 1, 1));
  std::vector<Operand> w;
  for (const auto& xi : x) {
    // max: w = x - m + 1, min: w = m - x + 1
    w.push_back(is_max ? affine(xi, kOne, m, kMinusOne, kOne) : affine(m, kOne, xi, kMinusOne, kOne));
  }
  auto y = lookup(w, relu);
  booleanity(y);
  auto s = cumulative_sum(y);
  Operand u = affine(s.back(), kMinusOne, Operand{}, Fe(), kOne);
  lookup_check(u, Operand::constant(Fe(0)), relu);
  end_argument();
}

void CircuitBuilder::max_argument(std::span<const Operand> x, Operand m, int64_t bound) {
  extremum_argument(x, m, bound, true);
}

void CircuitBuilder::min_argument(std::span<const Operand> x, Operand m, int64_t bound) {
  extremum_argument(x, m, bound, false);
}

Operand CircuitBuilder::max_of(std::span<const Operand> x, int64_t bound) {
  Operand m = new_advice();
  Hint h;
  h.kind = Hint::Kind::kMax;
  h.inputs.assign(x.begin(), x.end());
  h.out = m.index;
  h.at_row = cs_.gates.size();
  cs_.hints.push_back(std::move(h));
  max_argument(x, m, bound);
  return m;
}

Operand CircuitBuilder::min_of(std::span<const Operand> x, int64_t bound) {
  Operand m = new_advice();
  Hint h;
  h.kind = Hint::Kind::kMin;
  h.inputs.assign(x.begin(), x.end());
  h.out = m.index;
  h.at_row = cs_.gates.size();
  cs_.hints.push_back(std::move(h));
  min_argument(x, m, bound);
  return m;
}

// ---- execution and checking ----

Assignment execute(const ConstraintSystem& cs, std::vector<Fe> instance, std::vector<Fe> weights,
                   std::span<const Fe> external) {
  if (instance.size() != cs.n_instance) throw ShapeError("instance column has the wrong length");
  if (weights.size() != cs.n_weights) throw ShapeError("weight column has the wrong length");
  if (external.size() != cs.n_external) throw ShapeError("wrong number of private inputs");
  Assignment asg;
  asg.instance = std::move(instance);
  asg.weights = std::move(weights);
  asg.advice.assign(cs.n_advice, Fe());

  auto run_hint = [&](const Hint& h) {
    switch (h.kind) {
      case Hint::Kind::kExternal:
        asg.advice[h.out] = external[h.slot];
        break;
      case Hint::Kind::kMax:
      case Hint::Kind::kMin: {
        int64_t best = asg.value(h.inputs.at(0)).to_signed();
        for (const auto& op : h.inputs) {
          int64_t v = asg.value(op).to_signed();
          best = h.kind == Hint::Kind::kMax ? std::max(best, v) : std::min(best, v);
        }
        asg.advice[h.out] = Fe::from_signed(best);
        break;
      }
    }
  };

  size_t next_hint = 0;
  for (uint64_t row = 0; row < cs.gates.size(); ++row) {
    while (next_hint < cs.hints.size() && cs.hints[next_hint].at_row <= row) run_hint(cs.hints[next_hint++]);
    const Gate& g = cs.gates[row];
    if (!g.c.is_advice()) continue;  // check-only row
    if (g.kind == GateKind::kLookup) {
      const auto& t = cs.tables.at(g.table);
      int64_t in = asg.value(g.a).to_signed();
      if (!t.contains(in))
        throw DomainError("value " + std::to_string(in) + " outside " + t.name() + " table domain [" +
                          std::to_string(t.lo) + ", " + std::to_string(t.hi) + "] at " + cs.row_label(row));
      asg.advice[g.c.index] = Fe::from_signed(t.eval(in));
    } else if (g.kind == GateKind::kArith && !g.q_o.is_zero()) {
      Fe a = asg.value(g.a), b = asg.value(g.b), d = asg.value(g.d);
      Fe rest = g.q_l * a + g.q_r * b + g.q_m * a * b + g.q_d * d + g.q_c;
      Fe inv = g.q_o == kMinusOne ? kMinusOne : g.q_o.inverse();
      asg.advice[g.c.index] = -(rest * inv);
    }
  }
  while (next_hint < cs.hints.size()) run_hint(cs.hints[next_hint++]);

  for (size_t k = 0; k < cs.outputs.size(); ++k) asg.instance[cs.output_slot(k)] = asg.value(cs.outputs[k]);
  return asg;
}

bool check_gate(const Gate& g, const ConstraintSystem& cs, Fe a, Fe b, Fe c, Fe d, std::string* why) {
  switch (g.kind) {
    case GateKind::kEmpty:
      return true;
    case GateKind::kArith: {
      Fe v = g.q_l * a + g.q_r * b + g.q_m * a * b + g.q_d * d + g.q_o * c + g.q_c;
      if (v.is_zero()) return true;
      if (why) *why = "arithmetic constraint evaluates to " + std::to_string(v.to_signed());
      return false;
    }
    case GateKind::kLookup: {
      if (g.table >= cs.tables.size()) {
        if (why) *why = "unknown table";
        return false;
      }
      const auto& t = cs.tables[g.table];
      int64_t in = a.to_signed(), out = c.to_signed();
      if (!t.contains(in)) {
        if (why) *why = "lookup input " + std::to_string(in) + " outside " + t.name() + " domain";
        return false;
      }
      if (t.eval(in) != out) {
        if (why) *why = "(" + std::to_string(in) + ", " + std::to_string(out) + ") not in " + t.name() + " table";
        return false;
      }
      return true;
    }
  }
  return false;
}

SatisfactionReport check_satisfied(const ConstraintSystem& cs, const Assignment& asg) {
  SatisfactionReport rep;
  if (asg.instance.size() != cs.n_instance || asg.advice.size() != cs.n_advice || asg.weights.size() != cs.n_weights) {
    rep.ok = false;
    rep.message = "assignment does not match the circuit's column sizes";
    return rep;
  }
  for (uint64_t row = 0; row < cs.gates.size(); ++row) {
    const Gate& g = cs.gates[row];
    std::string why;
    if (!check_gate(g, cs, asg.value(g.a), asg.value(g.b), asg.value(g.c), asg.value(g.d), &why)) {
      rep.ok = false;
      rep.row = row;
      rep.cells = g.operands();
      rep.message = why + " at " + cs.row_label(row);
      return rep;
    }
  }
  for (size_t k = 0; k < cs.outputs.size(); ++k) {
    if (asg.instance[cs.output_slot(k)] != asg.value(cs.outputs[k])) {
      rep.ok = false;
      rep.row = cs.gates.size();
      rep.cells = {cs.outputs[k]};
      rep.message = "exposed output " + std::to_string(k) + " differs from its instance slot";
      return rep;
    }
  }
  return rep;
}

}  // namespace zkeval
