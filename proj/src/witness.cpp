#include "zkeval/witness.hpp"

#include "zkeval/errors.hpp"
#include "zkeval/merkle.hpp"

namespace zkeval {

namespace {

constexpr uint32_t kWitnessMagic = 0x54574b5a;  // "ZKWT"
constexpr uint32_t kWitnessVersion = 1;

}  // namespace

std::vector<Fe> weight_column(const ConstraintSystem& cs, const std::map<std::string, Tensor>& weights) {
  if (weights.size() != cs.weight_slots.size()) throw ShapeError("weight set does not match the circuit");
  std::vector<Fe> col;
  col.reserve(cs.n_weights);
  for (const auto& slot : cs.weight_slots) {
    auto it = weights.find(slot.name);
    if (it == weights.end()) throw ShapeError("missing weight '" + slot.name + "'");
    if (it->second.shape != slot.shape) throw ShapeError("weight '" + slot.name + "' has shape " +
                                                         shape_str(it->second.shape) + ", circuit expects " +
                                                         shape_str(slot.shape));
    for (double v : it->second.data) col.push_back(Fe::from_signed(encode_raw(v, slot.scale)));
  }
  return col;
}

Digest hash_weight_column(std::span<const Fe> column) {
  if (column.empty()) return empty_leaf();
  std::vector<Digest> leaves;
  for (size_t i = 0; i < column.size(); i += kWeightChunk) {
    Sha256 h;
    uint8_t tag = static_cast<uint8_t>(LeafTag::kWeightChunk);
    h.update(std::span<const uint8_t>(&tag, 1));
    ByteWriter w;
    for (size_t k = i; k < std::min(column.size(), i + kWeightChunk); ++k) w.fe(column[k]);
    h.update(w.bytes());
    leaves.push_back(h.finish());
  }
  return MerkleTree(std::move(leaves)).root();
}

Digest hash_weights(const std::map<std::string, Tensor>& weights, const std::map<std::string, int>& scales) {
  std::vector<Fe> col;
  for (const auto& [name, t] : weights) {
    auto it = scales.find(name);
    if (it == scales.end()) throw ShapeError("no scale for weight '" + name + "'");
    for (double v : t.data) col.push_back(Fe::from_signed(encode_raw(v, it->second)));
  }
  return hash_weight_column(col);
}

Bytes Witness::serialize() const {
  ByteWriter w;
  w.u32(kWitnessMagic);
  w.u32(kWitnessVersion);
  w.raw(circuit_digest);
  w.raw(weight_hash);
  w.i64(scale);
  w.u64(instance.size());
  for (auto v : instance) w.fe(v);
  w.u64(advice.size());
  for (auto v : advice) w.fe(v);
  return w.take();
}

Witness Witness::deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u32() != kWitnessMagic) throw FormatError("not a witness file");
  if (r.u32() != kWitnessVersion) throw FormatError("unsupported witness version");
  Witness w;
  auto cd = r.raw(32);
  std::copy(cd.begin(), cd.end(), w.circuit_digest.begin());
  auto wh = r.raw(32);
  std::copy(wh.begin(), wh.end(), w.weight_hash.begin());
  w.scale = static_cast<int>(r.i64());
  w.instance.resize(r.count(8));
  for (auto& v : w.instance) v = r.fe();
  w.advice.resize(r.count(8));
  for (auto& v : w.advice) v = r.fe();
  r.expect_end();
  return w;
}

std::vector<Fe> instance_for(const ConstraintSystem& cs, const std::vector<Tensor>& inputs, const Digest& weight_hash) {
  if (inputs.size() != cs.input_specs.size())
    throw ShapeError("circuit expects " + std::to_string(cs.input_specs.size()) + " inputs");
  std::vector<Fe> inst;
  inst.reserve(cs.n_instance);
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (static_cast<int64_t>(inputs[i].data.size()) != shape_size(cs.input_specs[i].shape))
      throw ShapeError("input '" + cs.input_specs[i].name + "' expects shape " + shape_str(cs.input_specs[i].shape));
    for (double v : inputs[i].data) inst.push_back(Fe::from_signed(encode_raw(v, cs.scale)));
  }
  inst.resize(cs.n_public_inputs + cs.outputs.size());
  if (cs.binds_weights) {
    auto limbs = digest_limbs(weight_hash);
    inst.insert(inst.end(), limbs.begin(), limbs.end());
  }
  return inst;
}

Witness make_witness(const ConstraintSystem& cs, const Digest& circuit_digest, std::span<const Fe> weights,
                     const Digest& weight_hash, std::vector<Fe> instance, std::span<const Fe> external) {
  Assignment a = execute(cs, std::move(instance), std::vector<Fe>(weights.begin(), weights.end()), external);
  Witness w;
  w.circuit_digest = circuit_digest;
  w.weight_hash = weight_hash;
  w.scale = cs.scale;
  w.instance = std::move(a.instance);
  w.advice = std::move(a.advice);
  return w;
}

Witness make_witness(const ConstraintSystem& cs, std::span<const Fe> weights, const std::vector<Tensor>& inputs,
                     std::span<const Fe> external) {
  Digest wh = hash_weight_column(weights);
  return make_witness(cs, cs.digest(), weights, wh, instance_for(cs, inputs, wh), external);
}

Assignment assignment_of(const Witness& w, std::span<const Fe> weights) {
  Assignment a;
  a.instance = w.instance;
  a.advice = w.advice;
  a.weights.assign(weights.begin(), weights.end());
  return a;
}

std::vector<Tensor> decode_outputs(const ConstraintSystem& cs, std::span<const Fe> y) {
  std::vector<Tensor> out;
  size_t pos = 0;
  for (const auto& spec : cs.output_specs) {
    Tensor t;
    t.name = spec.name;
    t.shape = spec.shape;
    const size_t n = static_cast<size_t>(shape_size(spec.shape));
    if (pos + n > y.size()) throw ShapeError("output vector is too short for the circuit's outputs");
    for (size_t k = 0; k < n; ++k) t.data.push_back(decode(y[pos + k], FixedPointCodec{cs.scale}));
    pos += n;
    out.push_back(std::move(t));
  }
  return out;
}

int64_t argmax_class(std::span<const Fe> logits) {
  if (logits.empty()) throw ShapeError("argmax of an empty vector");
  int64_t best = 0;
  for (size_t i = 1; i < logits.size(); ++i)
    if (logits[i].to_signed() > logits[best].to_signed()) best = static_cast<int64_t>(i);
  return best;
}

std::vector<Tensor> run_quantized(const ConstraintSystem& cs, std::span<const Fe> weights,
                                  const std::vector<Tensor>& inputs) {
  Witness w = make_witness(cs, Digest{}, weights, Digest{}, instance_for(cs, inputs, Digest{}));
  return decode_outputs(cs, w.y_tilde(cs));
}

}  // namespace zkeval
