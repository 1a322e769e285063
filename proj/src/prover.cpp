#include "zkeval/prover.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <cstring>
#include <chrono>
#include <random>
#include <set>

#include "zkeval/errors.hpp"
#include "zkeval/kernels.hpp"

namespace zkeval {

namespace {

constexpr uint32_t kVkMagic = 0x4b564b5a;     // "ZKVK"
constexpr uint32_t kPkMagic = 0x4b504b5a;     // "ZKPK"
constexpr uint32_t kProofMagic = 0x50504b5a;  // "ZKPP"
constexpr uint32_t kFormatVersion = 1;

void put_digest(ByteWriter& w, const Digest& d) { w.raw(d); }

Digest get_digest(ByteReader& r) {
  Digest d;
  auto s = r.raw(32);
  std::copy(s.begin(), s.end(), d.begin());
  return d;
}

void put_digests(ByteWriter& w, const std::vector<Digest>& ds) {
  w.u64(ds.size());
  for (const auto& d : ds) w.raw(d);
}

std::vector<Digest> get_digests(ByteReader& r) {
  std::vector<Digest> ds(r.count(32));
  for (auto& d : ds) d = get_digest(r);
  return ds;
}

void put_operand(ByteWriter& w, const Operand& op) {
  w.u8(static_cast<uint8_t>(op.kind));
  w.u64(op.index);
}

Operand get_operand(ByteReader& r) {
  uint8_t k = r.u8();
  if (k > 4) throw FormatError("invalid operand kind");
  Operand op{static_cast<Operand::Kind>(k), r.u64()};
  if (op.kind == Operand::Kind::kConst && op.index >= Fe::kModulus) throw FormatError("non-canonical constant");
  return op;
}

void put_openings(ByteWriter& w, const std::vector<CellOpening>& cells) {
  w.u64(cells.size());
  for (const auto& c : cells) {
    w.fe(c.value);
    w.raw(c.salt);
  }
}

std::vector<CellOpening> get_openings(ByteReader& r) {
  std::vector<CellOpening> cells(r.count(24));
  for (auto& c : cells) {
    c.value = r.fe();
    auto s = r.raw(16);
    std::copy(s.begin(), s.end(), c.salt.begin());
  }
  return cells;
}

Digest gate_leaf(const Gate& g) {
  ByteWriter w;
  w.u8(static_cast<uint8_t>(LeafTag::kGate));
  g.serialize(w);
  return sha256(w.bytes());
}

Digest table_leaf(int64_t in, int64_t out) {
  uint8_t buf[17];
  buf[0] = static_cast<uint8_t>(LeafTag::kTable);
  for (int i = 0; i < 8; ++i) {
    buf[1 + i] = static_cast<uint8_t>(static_cast<uint64_t>(in) >> (8 * i));
    buf[9 + i] = static_cast<uint8_t>(static_cast<uint64_t>(out) >> (8 * i));
  }
  return sha256(std::span<const uint8_t>(buf, sizeof buf));
}

MerkleTree build_gate_tree(const ConstraintSystem& cs) {
  const uint64_t padded = cs.padded_rows();
  std::vector<Digest> leaves(padded);
  const Digest empty = gate_leaf(Gate{});
  kernels::for_each_index(static_cast<int64_t>(padded), [&](int64_t i) {
    leaves[i] = static_cast<uint64_t>(i) < cs.gates.size() ? gate_leaf(cs.gates[i]) : empty;
  });
  return MerkleTree(std::move(leaves));
}

MerkleTree build_table_tree(const LookupTable& t) {
  std::vector<Digest> leaves(t.size());
  kernels::for_each_index(static_cast<int64_t>(t.size()), [&](int64_t i) {
    int64_t in = t.lo + i;
    leaves[i] = table_leaf(in, t.eval(in));
  });
  return MerkleTree(std::move(leaves));
}

Digest weight_seed_for(std::span<const Fe> weights) {
  Sha256 h;
  h.update(std::string_view("zkeval.weight-salt"));
  ByteWriter w;
  for (auto v : weights) w.fe(v);
  h.update(w.bytes());
  return h.finish();
}

Digest random_seed() {
  Digest d;
  if (RAND_bytes(d.data(), static_cast<int>(d.size())) != 1) throw Error("io_error", "system random generator failed");
  return d;
}

// Domain-separated hash chain.
class Transcript {
 public:
  Transcript() : state_(sha256(std::string_view("zkeval.transcript.v1"))) {}

  void absorb(std::string_view label, std::span<const uint8_t> data) {
    Sha256 h;
    h.update(state_);
    h.update_u64(label.size());
    h.update(label);
    h.update_u64(data.size());
    h.update(data);
    state_ = h.finish();
  }
  void absorb_fes(std::string_view label, std::span<const Fe> values) {
    ByteWriter w;
    for (auto v : values) w.fe(v);
    absorb(label, w.bytes());
  }
  const Digest& state() const { return state_; }

 private:
  Digest state_;
};

// Four little-endian words per counter block.
std::array<uint64_t, 4> challenge_block(const Digest& state, uint64_t counter) {
  uint8_t buf[32 + 9 + 8];
  std::copy(state.begin(), state.end(), buf);
  std::memcpy(buf + 32, "challenge", 9);
  for (int i = 0; i < 8; ++i) buf[41 + i] = static_cast<uint8_t>(counter >> (8 * i));
  Digest d = sha256(std::span<const uint8_t>(buf, sizeof buf));
  std::array<uint64_t, 4> out{};
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 8; ++i) out[k] |= static_cast<uint64_t>(d[8 * k + i]) << (8 * i);
  return out;
}

size_t tree_depth(uint64_t leaves) { return ceil_log2(std::max<uint64_t>(leaves, 1)); }

// Advice and weight indices an opened row set touches (plus exposed outputs).
void referenced(const std::vector<Gate>& gates, const std::vector<Operand>& outputs, std::vector<uint64_t>& advice,
                std::vector<uint64_t>& weights) {
  std::vector<uint64_t> a, w;
  auto note = [&](const Operand& op) {
    if (op.kind == Operand::Kind::kAdvice) a.push_back(op.index);
    else if (op.kind == Operand::Kind::kWeight) w.push_back(op.index);
  };
  for (const auto& g : gates)
    for (const Operand* op : {&g.a, &g.b, &g.c, &g.d}) note(*op);
  for (const auto& op : outputs) note(op);
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  advice = std::move(a);
  weights = std::move(w);
}

}  // namespace

const char* proof_mode_name(ProofMode m) { return m == ProofMode::kAudit ? "audit" : "spot_check"; }

ProofMode proof_mode_from_name(const std::string& s) {
  if (s == "audit") return ProofMode::kAudit;
  if (s == "spot_check" || s == "spot-check") return ProofMode::kSpotCheck;
  throw InvalidArgument("unknown proof mode '" + s + "' (expected audit or spot_check)");
}

// ---- keys ----

uint64_t VerificationKey::spot_draws() const {
  uint64_t frac = (padded_rows * spot_ppm + 999999) / 1000000;
  return std::max<uint64_t>(lambda, frac);
}

Bytes VerificationKey::serialize() const {
  ByteWriter w;
  w.u32(kVkMagic);
  w.u32(kFormatVersion);
  put_digest(w, circuit_digest);
  put_digest(w, gate_root);
  w.u64(n_con);
  w.u64(padded_rows);
  w.u64(n_advice);
  w.u64(n_instance);
  w.u64(n_public_inputs);
  w.u64(n_weights);
  w.u8(binds_weights ? 1 : 0);
  w.i64(scale);
  w.u64(outputs.size());
  for (const auto& op : outputs) put_operand(w, op);
  w.u64(tables.size());
  for (const auto& t : tables) {
    w.u32(t.id);
    w.u8(static_cast<uint8_t>(t.fn));
    w.i64(t.param);
    w.i64(t.lo);
    w.i64(t.hi);
    put_digest(w, t.root);
  }
  put_digest(w, weight_root);
  put_digest(w, weight_hash);
  w.u32(lambda);
  w.u32(spot_ppm);
  return w.take();
}

VerificationKey VerificationKey::deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u32() != kVkMagic) throw FormatError("not a verification key");
  if (r.u32() != kFormatVersion) throw FormatError("unsupported verification key version");
  VerificationKey vk;
  vk.circuit_digest = get_digest(r);
  vk.gate_root = get_digest(r);
  vk.n_con = r.u64();
  vk.padded_rows = r.u64();
  vk.n_advice = r.u64();
  vk.n_instance = r.u64();
  vk.n_public_inputs = r.u64();
  vk.n_weights = r.u64();
  vk.binds_weights = r.boolean();
  vk.scale = static_cast<int>(r.i64());
  vk.outputs.resize(r.count(9));
  for (auto& op : vk.outputs) op = get_operand(r);
  vk.tables.resize(r.count(61));
  for (auto& t : vk.tables) {
    t.id = r.u32();
    uint8_t fn = r.u8();
    if (fn > static_cast<uint8_t>(LookupFn::kRescale)) throw FormatError("invalid lookup function");
    t.fn = static_cast<LookupFn>(fn);
    t.param = static_cast<int>(r.i64());
    t.lo = r.i64();
    t.hi = r.i64();
    t.root = get_digest(r);
  }
  vk.weight_root = get_digest(r);
  vk.weight_hash = get_digest(r);
  vk.lambda = r.u32();
  vk.spot_ppm = r.u32();
  r.expect_end();
  if (vk.padded_rows != padded_rows_for(vk.n_con)) throw FormatError("inconsistent row count in verification key");
  if (vk.n_public_inputs + vk.outputs.size() + (vk.binds_weights ? ConstraintSystem::kDigestLimbs : 0) !=
      vk.n_instance)
    throw FormatError("inconsistent instance layout in verification key");
  return vk;
}

Bytes ProvingKey::serialize() const {
  ByteWriter w;
  w.u32(kPkMagic);
  w.u32(kFormatVersion);
  w.blob(vk.serialize());
  w.blob(cs.serialize());
  w.u64(weights.size());
  for (auto v : weights) w.fe(v);
  put_digest(w, weight_seed);
  gate_tree.serialize(w);
  weight_tree.serialize(w);
  w.u64(table_trees.size());
  for (const auto& t : table_trees) t.serialize(w);
  return w.take();
}

ProvingKey ProvingKey::deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u32() != kPkMagic) throw FormatError("not a proving key");
  if (r.u32() != kFormatVersion) throw FormatError("unsupported proving key version");
  ProvingKey pk;
  pk.vk = VerificationKey::deserialize(r.blob());
  pk.cs = ConstraintSystem::deserialize(r.blob());
  pk.weights.resize(r.count(8));
  for (auto& v : pk.weights) v = r.fe();
  pk.weight_seed = get_digest(r);
  pk.gate_tree = MerkleTree::deserialize(r);
  pk.weight_tree = MerkleTree::deserialize(r);
  pk.table_trees.resize(r.count(16));
  for (auto& t : pk.table_trees) t = MerkleTree::deserialize(r);
  r.expect_end();
  if (pk.gate_tree.root() != pk.vk.gate_root || pk.weight_tree.root() != pk.vk.weight_root ||
      pk.table_trees.size() != pk.vk.tables.size() || pk.weights.size() != pk.cs.n_weights)
    throw FormatError("proving key is internally inconsistent");
  for (size_t i = 0; i < pk.table_trees.size(); ++i)
    if (pk.table_trees[i].root() != pk.vk.tables[i].root) throw FormatError("proving key table tree mismatch");
  return pk;
}

std::pair<ProvingKey, VerificationKey> setup(const ConstraintSystem& cs, std::span<const Fe> weights,
                                             const SetupOptions& opts) {
  if (weights.size() != cs.n_weights) throw ShapeError("weight column does not match the circuit");
  if (opts.spot_fraction < 0.0 || opts.spot_fraction > 1.0) throw InvalidArgument("spot fraction must be in [0, 1]");
  ProvingKey pk;
  pk.cs = cs;
  pk.weights.assign(weights.begin(), weights.end());
  pk.weight_seed = weight_seed_for(weights);
  pk.gate_tree = build_gate_tree(cs);
  pk.weight_tree =
      MerkleTree(kernels::hash_salted_leaves(static_cast<uint8_t>(LeafTag::kWeight), pk.weight_seed, weights));
  for (const auto& t : cs.tables) {
    if (t.size() > kMaxTableSize) throw DomainError(t.name() + " table exceeds the size limit");
    pk.table_trees.push_back(build_table_tree(t));
  }

  VerificationKey& vk = pk.vk;
  vk.circuit_digest = cs.digest();
  vk.gate_root = pk.gate_tree.root();
  vk.n_con = cs.n_con();
  vk.padded_rows = cs.padded_rows();
  vk.n_advice = cs.n_advice;
  vk.n_instance = cs.n_instance;
  vk.n_public_inputs = cs.n_public_inputs;
  vk.n_weights = cs.n_weights;
  vk.binds_weights = cs.binds_weights;
  vk.scale = cs.scale;
  vk.outputs = cs.outputs;
  for (size_t i = 0; i < cs.tables.size(); ++i) {
    const auto& t = cs.tables[i];
    vk.tables.push_back({t.id, t.fn, t.param, t.lo, t.hi, pk.table_trees[i].root()});
  }
  vk.weight_root = pk.weight_tree.root();
  vk.weight_hash = hash_weight_column(weights);
  vk.lambda = opts.lambda;
  vk.spot_ppm = static_cast<uint32_t>(std::llround(opts.spot_fraction * 1e6));
  VerificationKey out = vk;
  return {std::move(pk), std::move(out)};
}

// ---- transcript ----

Digest transcript_state(const Digest& circuit_digest, std::span<const Fe> instance, const Digest& weight_hash,
                        const Digest& cell_root, const VerificationKey& vk) {
  Transcript t;
  t.absorb("circuit", circuit_digest);
  t.absorb_fes("x", instance.subspan(0, std::min<size_t>(instance.size(), vk.n_public_inputs)));
  if (instance.size() > vk.n_public_inputs)
    t.absorb_fes("y", instance.subspan(vk.n_public_inputs,
                                       std::min<size_t>(instance.size() - vk.n_public_inputs, vk.outputs.size())));
  t.absorb("weights", weight_hash);
  t.absorb("cells", cell_root);
  return t.state();
}

std::vector<uint64_t> opened_rows(const VerificationKey& vk, ProofMode mode, const Digest& state) {
  const uint64_t n = vk.padded_rows;
  std::vector<uint64_t> rows;
  if (mode == ProofMode::kAudit) {
    rows.resize(n);
    for (uint64_t i = 0; i < n; ++i) rows[i] = i;
    return rows;
  }
  // q independent uniform draws (rejection sampling removes modulo bias);
  // repeated draws open the same row once.
  const uint64_t q = vk.spot_draws();
  const uint64_t limit = n == 1 ? UINT64_MAX : (UINT64_MAX / n) * n;
  std::vector<uint64_t> draws;
  draws.reserve(q);
  for (uint64_t ctr = 0; draws.size() < q; ++ctr) {
    for (uint64_t v : challenge_block(state, ctr)) {
      if (draws.size() == q) break;
      if (n > 1 && v >= limit) continue;
      draws.push_back(v % n);
    }
  }
  std::sort(draws.begin(), draws.end());
  draws.erase(std::unique(draws.begin(), draws.end()), draws.end());
  return draws;
}

// ---- proof format ----

Bytes Proof::serialize() const {
  ByteWriter w;
  w.u32(kProofMagic);
  w.u32(kFormatVersion);
  w.u8(static_cast<uint8_t>(mode));
  put_digest(w, circuit_digest);
  put_digest(w, weight_hash);
  w.u64(instance.size());
  for (auto v : instance) w.fe(v);
  put_digest(w, cell_root);
  w.u64(gates.size());
  for (const auto& g : gates) g.serialize(w);
  put_digests(w, gate_siblings);
  put_openings(w, cells);
  put_digests(w, cell_siblings);
  put_openings(w, weights);
  put_digests(w, weight_siblings);
  w.u64(table_siblings.size());
  for (const auto& t : table_siblings) put_digests(w, t);
  return w.take();
}

Proof Proof::deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u32() != kProofMagic) throw FormatError("not a proof");
  if (r.u32() != kFormatVersion) throw FormatError("unsupported proof version");
  Proof p;
  uint8_t mode = r.u8();
  if (mode > 1) throw FormatError("invalid proof mode");
  p.mode = static_cast<ProofMode>(mode);
  p.circuit_digest = get_digest(r);
  p.weight_hash = get_digest(r);
  p.instance.resize(r.count(8));
  for (auto& v : p.instance) v = r.fe();
  p.cell_root = get_digest(r);
  p.gates.resize(r.count(1));
  for (auto& g : p.gates) g = Gate::deserialize(r);
  p.gate_siblings = get_digests(r);
  p.cells = get_openings(r);
  p.cell_siblings = get_digests(r);
  p.weights = get_openings(r);
  p.weight_siblings = get_digests(r);
  p.table_siblings.resize(r.count(8));
  for (auto& t : p.table_siblings) t = get_digests(r);
  r.expect_end();
  return p;
}

// ---- prove ----

Proof prove(const ProvingKey& pk, const Witness& w, const ProveOptions& opts, ProveStats* stats) {
  const auto t0 = std::chrono::steady_clock::now();
  const ConstraintSystem& cs = pk.cs;
  const VerificationKey& vk = pk.vk;
  if (w.circuit_digest != vk.circuit_digest) throw WitnessMismatch("witness was generated for a different circuit");
  if (w.weight_hash != vk.weight_hash) throw WitnessMismatch("witness weight hash does not match the proving key");
  if (w.instance.size() != cs.n_instance || w.advice.size() != cs.n_advice)
    throw WitnessMismatch("witness column sizes do not match the circuit");
  Assignment asg;
  asg.instance = w.instance;
  asg.advice = w.advice;
  asg.weights = pk.weights;
  if (opts.check_witness) {
    auto rep = check_satisfied(cs, asg);
    if (!rep.ok) throw UnsatisfiedWitness("refusing to prove an unsatisfied witness: " + rep.message);
  }

  const Digest seed = opts.seed.value_or(random_seed());
  MerkleTree cell_tree(kernels::hash_salted_leaves(static_cast<uint8_t>(LeafTag::kCell), seed, asg.advice));

  Proof p;
  p.mode = opts.mode;
  p.circuit_digest = vk.circuit_digest;
  p.weight_hash = vk.weight_hash;
  p.instance = asg.instance;
  p.cell_root = cell_tree.root();

  Digest state = transcript_state(p.circuit_digest, p.instance, p.weight_hash, p.cell_root, vk);
  std::vector<uint64_t> rows = opened_rows(vk, opts.mode, state);
  p.gates.reserve(rows.size());
  for (uint64_t r : rows) p.gates.push_back(r < cs.gates.size() ? cs.gates[r] : Gate{});
  p.gate_siblings = pk.gate_tree.multiproof(rows);

  std::vector<uint64_t> adv, wts;
  referenced(p.gates, cs.outputs, adv, wts);
  for (uint64_t i : adv) p.cells.push_back({asg.advice[i], kernels::leaf_salt(seed, i)});
  p.cell_siblings = cell_tree.multiproof(adv);
  for (uint64_t i : wts) p.weights.push_back({pk.weights[i], kernels::leaf_salt(pk.weight_seed, i)});
  p.weight_siblings = pk.weight_tree.multiproof(wts);

  std::vector<std::vector<uint64_t>> entries(cs.tables.size());
  for (const auto& g : p.gates) {
    if (g.kind != GateKind::kLookup) continue;
    const auto& t = cs.tables[g.table];
    entries[g.table].push_back(static_cast<uint64_t>(asg.value(g.a).to_signed() - t.lo));
  }
  for (size_t t = 0; t < entries.size(); ++t) {
    auto& e = entries[t];
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    // A lying witness (unchecked mode) may reference entries off the table.
    e.erase(std::remove_if(e.begin(), e.end(), [&](uint64_t i) { return i >= cs.tables[t].size(); }), e.end());
    p.table_siblings.push_back(pk.table_trees[t].multiproof(e));
  }

  if (stats) {
    stats->seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    stats->opened_rows = rows.size();
    stats->working_set_bytes = cell_tree.byte_size() + 3 * 8 * (asg.advice.size() + asg.weights.size()) +
                               8 * asg.instance.size() + p.serialize().size();
  }
  return p;
}

// ---- verify ----

namespace {

VerifyResult fail(std::string reason, std::string detail) { return {false, std::move(reason), std::move(detail)}; }

template <typename T>
bool equal_span(std::span<const T> a, std::span<const T> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

}  // namespace

VerifyResult verify(const VerificationKey& vk, const Proof& p, std::span<const Fe> x_public,
                    std::span<const Fe> y_public) {
  if (p.circuit_digest != vk.circuit_digest) return fail("circuit_mismatch", "proof was made for another circuit");
  if (p.weight_hash != vk.weight_hash) return fail("hash_mismatch", "proof H(W) differs from the verification key");
  if (p.instance.size() != vk.n_instance) return fail("public_input_mismatch", "instance length differs");
  std::span<const Fe> inst(p.instance);
  if (!equal_span(inst.subspan(0, vk.n_public_inputs), x_public))
    return fail("public_input_mismatch", "public inputs differ from the claimed x");
  if (!equal_span(inst.subspan(vk.n_public_inputs, vk.outputs.size()), y_public))
    return fail("public_input_mismatch", "exposed outputs differ from the claimed y");
  if (vk.binds_weights) {
    auto limbs = digest_limbs(vk.weight_hash);
    if (!equal_span<Fe>(inst.subspan(vk.n_public_inputs + vk.outputs.size()), limbs))
      return fail("hash_mismatch", "H(W) instance limbs differ from the verification key");
  }

  Digest state = transcript_state(p.circuit_digest, p.instance, p.weight_hash, p.cell_root, vk);
  std::vector<uint64_t> rows = opened_rows(vk, p.mode, state);
  if (p.gates.size() != rows.size()) return fail("opening_authentication_failed", "wrong number of opened rows");

  std::vector<std::pair<uint64_t, Digest>> leaves(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) leaves[i] = {rows[i], gate_leaf(p.gates[i])};
  if (!verify_multiproof(vk.gate_root, tree_depth(vk.padded_rows), leaves, p.gate_siblings))
    return fail("opening_authentication_failed", "opened rows do not authenticate against the gate root");

  std::vector<uint64_t> adv, wts;
  referenced(p.gates, vk.outputs, adv, wts);
  if (p.cells.size() != adv.size() || p.weights.size() != wts.size())
    return fail("opening_authentication_failed", "wrong number of opened cells");
  if (!adv.empty() && adv.back() >= vk.n_advice) return fail("constraint_violated", "advice index out of range");
  if (!wts.empty() && wts.back() >= vk.n_weights) return fail("constraint_violated", "weight index out of range");

  leaves.resize(adv.size());
  for (size_t i = 0; i < adv.size(); ++i)
    leaves[i] = {adv[i], kernels::salted_leaf(static_cast<uint8_t>(LeafTag::kCell), p.cells[i].salt, p.cells[i].value)};
  if (!verify_multiproof(p.cell_root, tree_depth(vk.n_advice), leaves, p.cell_siblings))
    return fail("opening_authentication_failed", "cell openings do not authenticate against the trace root");

  leaves.resize(wts.size());
  for (size_t i = 0; i < wts.size(); ++i)
    leaves[i] = {wts[i],
                 kernels::salted_leaf(static_cast<uint8_t>(LeafTag::kWeight), p.weights[i].salt, p.weights[i].value)};
  if (!verify_multiproof(vk.weight_root, tree_depth(vk.n_weights), leaves, p.weight_siblings))
    return fail("opening_authentication_failed", "weight openings do not authenticate against the weight root");

  auto value = [&](const Operand& op, Fe* out) -> bool {
    switch (op.kind) {
      case Operand::Kind::kNone: *out = Fe(); return true;
      case Operand::Kind::kConst: *out = Fe(op.index); return true;
      case Operand::Kind::kInstance:
        if (op.index >= p.instance.size()) return false;
        *out = p.instance[op.index];
        return true;
      case Operand::Kind::kAdvice: {
        auto it = std::lower_bound(adv.begin(), adv.end(), op.index);
        *out = p.cells[it - adv.begin()].value;
        return true;
      }
      case Operand::Kind::kWeight: {
        auto it = std::lower_bound(wts.begin(), wts.end(), op.index);
        *out = p.weights[it - wts.begin()].value;
        return true;
      }
    }
    return false;
  };

  for (size_t k = 0; k < vk.outputs.size(); ++k) {
    Fe v;
    if (!value(vk.outputs[k], &v) || v != p.instance[vk.n_public_inputs + k])
      return fail("public_input_mismatch", "opened output cell " + std::to_string(k) + " differs from the claimed y");
  }

  ConstraintSystem tables_only;
  for (const auto& t : vk.tables) tables_only.tables.push_back({t.id, t.fn, t.param, t.lo, t.hi});
  std::vector<std::vector<std::pair<uint64_t, Digest>>> table_leaves(vk.tables.size());
  for (size_t i = 0; i < p.gates.size(); ++i) {
    const Gate& g = p.gates[i];
    Fe a, b, c, d;
    if (!value(g.a, &a) || !value(g.b, &b) || !value(g.c, &c) || !value(g.d, &d))
      return fail("constraint_violated", "row " + std::to_string(rows[i]) + " references a missing instance slot");
    if (g.kind == GateKind::kLookup) {
      if (g.table >= vk.tables.size())
        return fail("constraint_violated", "row " + std::to_string(rows[i]) + " names an unknown table");
      const auto& t = vk.tables[g.table];
      int64_t in = a.to_signed();
      if (in < t.lo || in > t.hi)
        return fail("constraint_violated", "row " + std::to_string(rows[i]) + " looks up outside the table domain");
      table_leaves[g.table].emplace_back(static_cast<uint64_t>(in - t.lo), table_leaf(in, c.to_signed()));
    } else if (g.kind == GateKind::kArith) {
      std::string why;
      if (!check_gate(g, tables_only, a, b, c, d, &why))
        return fail("constraint_violated", "row " + std::to_string(rows[i]) + ": " + why);
    }
  }
  if (p.table_siblings.size() != vk.tables.size())
    return fail("lookup_membership_failed", "wrong number of table openings");
  for (size_t t = 0; t < vk.tables.size(); ++t) {
    auto& tl = table_leaves[t];
    std::sort(tl.begin(), tl.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    // The same entry looked up twice must carry the same output.
    std::vector<std::pair<uint64_t, Digest>> uniq;
    for (const auto& e : tl) {
      if (!uniq.empty() && uniq.back().first == e.first) {
        if (uniq.back().second != e.second) return fail("lookup_membership_failed", "conflicting lookup outputs");
        continue;
      }
      uniq.push_back(e);
    }
    if (!verify_multiproof(vk.tables[t].root, tree_depth(vk.tables[t].size()), uniq, p.table_siblings[t]))
      return fail("lookup_membership_failed", "lookup pair is not a member of table " + std::to_string(t));
  }
  return {true, "", ""};
}

VerifyResult verify(const VerificationKey& vk, std::span<const uint8_t> bytes, std::span<const Fe> x_public,
                    std::span<const Fe> y_public) {
  Proof p;
  try {
    p = Proof::deserialize(bytes);
  } catch (const Error& e) {
    return fail("malformed_proof", e.what());
  }
  return verify(vk, p, x_public, y_public);
}

VerifyResult verify(const VerificationKey& vk, const Proof& p) {
  std::span<const Fe> inst(p.instance);
  if (inst.size() < vk.n_public_inputs + vk.outputs.size())
    return fail("public_input_mismatch", "instance length differs");
  return verify(vk, p, inst.subspan(0, vk.n_public_inputs), inst.subspan(vk.n_public_inputs, vk.outputs.size()));
}

}  // namespace zkeval
